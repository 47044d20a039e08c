"""tagmatch: concept-sentence matching with relational graph convolutions."""

__version__ = "0.1.0"
