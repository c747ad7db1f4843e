"""CHEM: cached homomorphic encryption over radix and zero pools."""

__version__ = "0.1.0"
__description__ = "Cached additively homomorphic encryption with a benchmark harness"
