"""HTTP service wrapping the optimizer, harness, and cost models."""

from .app import app, create_app

__all__ = ["app", "create_app"]
