"""Multi-word expression tooling for machine translation corpora."""

__version__ = "0.1.0"
