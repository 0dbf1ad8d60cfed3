"""Transformer fine-tuning harness for tweet check-worthiness."""

__version__ = "0.1.0"
