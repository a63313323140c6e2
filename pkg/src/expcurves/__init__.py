"""Zeros of exponential curves p(z, e^z) and the number theory around them."""

__version__ = "0.1.0"
