"""Token graphs of (C4, diamond)-free graphs: construction, reconstruction and oracles."""

__version__ = "0.1.0"
