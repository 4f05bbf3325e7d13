"""Certificate checking for model-checking problems in a focused fixed-point logic."""

__version__ = "0.1.0"
