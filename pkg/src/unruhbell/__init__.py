"""Bell nonlocality and one-way information deficit for Dirac modes seen by an accelerated observer."""

__version__ = "0.1.0"
