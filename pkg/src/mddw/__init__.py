"""Multi-designated-detector watermarking for token streams."""

__version__ = "0.1.0"
