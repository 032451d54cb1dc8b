"""Hybrid extractive/abstractive summarization pipeline with entity-level factuality metrics."""

__version__ = "0.1.0"
