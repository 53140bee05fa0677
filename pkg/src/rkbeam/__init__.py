"""Beamforming in the reproducing-kernel domain via spatial differentiation."""
__version__ = "0.1.0"
