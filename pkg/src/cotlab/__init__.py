"""Online learning of autoregressive next-token generators at desk scale."""

from .core import Generator, apply_and_append, cot, e2e, generation_tree, trajectory_branch
from .tokens import Bits

__all__ = ["Bits", "Generator", "apply_and_append", "cot", "e2e", "generation_tree", "trajectory_branch"]
