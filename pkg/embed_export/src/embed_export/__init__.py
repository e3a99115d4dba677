"""Bridge from pre-trained transformer encoders to the SEMB embedding
container consumed by the semrel toolkit."""

from .export import ExportManifest, ModelLoadError, TokenizationError, export

__all__ = ["ExportManifest", "ModelLoadError", "TokenizationError", "export"]

__version__ = "0.1.0"
