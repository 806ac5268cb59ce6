"""Nilpotent Lazard Lie algebras over prime fields: Hall bases, the Lazard
correspondence, free amalgams and explicit witness algebras."""

from .free_lie import FreeLie, LiePoly, free_lla, hall_set, lev_deg, witt_count
from .lla import Lla, LlaHom, Rank, Violation, validate

__all__ = [
    "FreeLie", "LiePoly", "free_lla", "hall_set", "lev_deg", "witt_count",
    "Lla", "LlaHom", "Rank", "Violation", "validate",
]
__version__ = "0.1.0"
