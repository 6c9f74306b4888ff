"""tfm-adapter: file-protocol scoring bridge around tabular foundation
models."""

from .cli import MODELS, AdapterError, adapter_main

__all__ = ["MODELS", "AdapterError", "adapter_main"]

__version__ = "0.1.0"
