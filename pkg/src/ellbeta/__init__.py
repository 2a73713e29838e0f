"""Exact level-3 modular forms, divided congruences and the 2-primary beta family."""
from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
