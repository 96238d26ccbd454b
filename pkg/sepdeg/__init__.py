"""Separating degrees of modular representations, computed exactly."""

from sepdeg.config import Config

__version__ = Config.VERSION
