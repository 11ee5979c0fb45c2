"""Embedding extraction adapter: pretrained models -> FGEB stores."""

__version__ = "0.1.0"

from .errors import BadAudio, DimMismatch, FgembedError, ModelLoadFailure
from .extract import extract, extract_general
from .models import ExtractorSpec, KNOWN_EXTRACTORS, load_model, resolve_spec
from .store_writer import write_store

__all__ = [
    "BadAudio", "DimMismatch", "FgembedError", "ModelLoadFailure",
    "extract", "extract_general",
    "ExtractorSpec", "KNOWN_EXTRACTORS", "load_model", "resolve_spec",
    "write_store",
]
