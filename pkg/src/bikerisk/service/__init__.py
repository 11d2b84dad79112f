"""FastAPI service exposing routes, risk surfaces, and statistics."""

from .app import AppState, create_app

__all__ = ["AppState", "create_app"]
