"""Command line interface; see :func:`hypack.cli.main.main`."""
from .main import main

__all__ = ["main"]
