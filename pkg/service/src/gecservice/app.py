"""FastAPI application: /v1/correct, /v1/similarity, /v1/paraphrase, /healthz.

All endpoints enforce count alignment and return:
  400 on malformed bodies or unknown metrics,
  503 while models are still loading,
  500 with a diagnostic when inference fails,
  404 for the paraphrase endpoint when no paraphrase model is configured.
"""

import sys
from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import backends
from .config import ServiceConfig, from_env


class Registry:
    def __init__(self, config: ServiceConfig):
        self.config = config
        self.gec = backends.make_gec_backend(config)
        self.similarity = backends.make_similarity_backend(config)
        self.paraphraser = backends.make_paraphrase_backend(config)
        self.load_error: str | None = None

    def load_all(self):
        try:
            self.gec.load()
            self.similarity.load()
            if self.paraphraser is not None:
                self.paraphraser.load()
        except Exception as exc:  # surfaces via /healthz and 503s
            self.load_error = f"{type(exc).__name__}: {exc}"

    @property
    def ready(self) -> bool:
        if self.load_error:
            return False
        parts = [self.gec.ready, self.similarity.ready]
        if self.paraphraser is not None:
            parts.append(self.paraphraser.ready)
        return all(parts)


class CorrectRequest(BaseModel):
    texts: list[str]


class SimilarityPair(BaseModel):
    a: str
    b: str


class SimilarityRequest(BaseModel):
    pairs: list[SimilarityPair]
    metric: str = "bleurt"


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or from_env()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.registry.load_all()
        yield

    app = FastAPI(title="gec-service", lifespan=lifespan)
    app.state.registry = Registry(config)

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": "malformed request body"})

    def registry() -> Registry:
        return app.state.registry

    def require_ready():
        reg = registry()
        if not reg.ready:
            detail = reg.load_error or "models are still loading"
            raise HTTPException(status_code=503, detail=detail)
        return reg

    @app.get("/healthz")
    async def healthz():
        reg = registry()
        return {
            "status": "ok" if reg.ready else "loading",
            "gec_ready": reg.gec.ready,
            "similarity_ready": reg.similarity.ready,
            "paraphrase_enabled": reg.paraphraser is not None,
            "gec_model": reg.gec.name,
            "similarity_model": reg.similarity.name,
            "error": reg.load_error,
        }

    @app.post("/v1/correct")
    async def correct(body: CorrectRequest):
        reg = require_ready()
        if not body.texts or any(not t.strip() for t in body.texts):
            raise HTTPException(status_code=400, detail="texts must be non-empty strings")
        corrected = []
        try:
            for text in body.texts:
                chunks = backends.chunk_by_tokens(text, reg.config.max_input_tokens)
                corrected.append(" ".join(reg.gec.correct(chunks)))
        except Exception as exc:
            raise HTTPException(status_code=500, detail=f"correction failed: {exc}") from exc
        return {"corrected": corrected}

    @app.post("/v1/similarity")
    async def similarity(body: SimilarityRequest):
        reg = require_ready()
        if body.metric != reg.config.similarity_metric:
            raise HTTPException(status_code=400, detail=f"unknown metric {body.metric!r}")
        if not body.pairs:
            raise HTTPException(status_code=400, detail="pairs must be non-empty")
        try:
            scores = reg.similarity.score([(p.a, p.b) for p in body.pairs])
        except Exception as exc:
            raise HTTPException(status_code=500, detail=f"scoring failed: {exc}") from exc
        return {"scores": scores}

    @app.post("/v1/paraphrase")
    async def paraphrase(body: CorrectRequest):
        reg = registry()
        if reg.paraphraser is None:
            raise HTTPException(status_code=404, detail="paraphrase endpoint disabled")
        require_ready()
        if not body.texts or any(not t.strip() for t in body.texts):
            raise HTTPException(status_code=400, detail="texts must be non-empty strings")
        try:
            out = reg.paraphraser.paraphrase(body.texts)
        except Exception as exc:
            raise HTTPException(status_code=500, detail=f"paraphrase failed: {exc}") from exc
        return {"paraphrased": out}

    return app


def main() -> None:
    import uvicorn

    config = from_env()
    uvicorn.run(create_app(config), host="0.0.0.0", port=config.port, log_level="info")


if __name__ == "__main__":
    sys.exit(main())
