"""HTTP shim exposing embedding, NLI, log-probability, and generation models."""

from .app import create_app, serve
from .backends import Backends, load_backends
from .config import ServerConfig

__all__ = ["Backends", "ServerConfig", "create_app", "load_backends", "serve"]
