"""Hybrid FAIRness assessment and fine-grained linked-data annotation for HPC datasets."""

from .registry import Indicator, Mode, Registry, builtin_registry, lookup, partner_of

__version__ = "0.1.0"

__all__ = ["Indicator", "Mode", "Registry", "builtin_registry", "lookup", "partner_of", "__version__"]
