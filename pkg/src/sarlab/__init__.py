"""Desk-scale lab for action-sequence-induced invariant representations on SAC."""

from . import autodiff, checkpoint, layers, optim, verify

__all__ = ["autodiff", "checkpoint", "layers", "optim", "verify"]
__version__ = "0.1.0"
