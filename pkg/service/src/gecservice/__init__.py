"""HTTP microservice for grammar correction, learned similarity, and paraphrasing."""

from .app import create_app
from .config import ServiceConfig, from_env

__version__ = "0.1.0"
