"""Service configuration from environment variables or a JSON config file.

Model ids starting with "builtin:" select the deterministic in-process
backends (no downloads, stable outputs); anything else is treated as a
Hugging Face checkpoint id and loaded through transformers at startup.
"""

import json
import os
from dataclasses import dataclass

DEFAULT_GEC_MODEL = "grammarly/coedit-large"
DEFAULT_SIM_MODEL = "Elron/bleurt-base-512"
GEC_INSTRUCTION = "Fix grammatical errors in this sentence: "


@dataclass(frozen=True)
class ServiceConfig:
    gec_model_id: str = DEFAULT_GEC_MODEL
    similarity_model_id: str = DEFAULT_SIM_MODEL
    similarity_metric: str = "bleurt"
    paraphrase_model_id: str = ""  # empty disables /v1/paraphrase
    max_input_tokens: int = 256
    port: int = 8765
    device: str = "cpu"

    def __post_init__(self):
        if self.max_input_tokens <= 0:
            raise ValueError("max_input_tokens must be > 0")
        if self.device not in ("cpu", "gpu"):
            raise ValueError("device must be cpu or gpu")


def from_env(path: str | None = None) -> ServiceConfig:
    values = {}
    config_path = path or os.environ.get("GECSERVICE_CONFIG")
    if config_path:
        with open(config_path, encoding="utf-8") as fh:
            values.update(json.load(fh))
    env_map = {
        "GECSERVICE_GEC_MODEL": "gec_model_id",
        "GECSERVICE_SIM_MODEL": "similarity_model_id",
        "GECSERVICE_SIM_METRIC": "similarity_metric",
        "GECSERVICE_PARAPHRASE_MODEL": "paraphrase_model_id",
        "GECSERVICE_MAX_INPUT_TOKENS": "max_input_tokens",
        "GECSERVICE_PORT": "port",
        "GECSERVICE_DEVICE": "device",
    }
    for env, key in env_map.items():
        if env in os.environ:
            values[key] = os.environ[env]
    for int_key in ("max_input_tokens", "port"):
        if int_key in values:
            values[int_key] = int(values[int_key])
    return ServiceConfig(**values)
