"""SNG policies and the write-probability plan they imply."""
from __future__ import annotations

import enum

from .errors import DomainError


class Policy(enum.Enum):
    NORMAL = "normal"
    SMART_RESET = "sr"
    SR_BMS = "srbms"

    @property
    def smart_reset(self) -> bool:
        """Reset only after a successful write."""
        return self is not Policy.NORMAL

    @property
    def biased(self) -> bool:
        return self is Policy.SR_BMS

    @classmethod
    def parse(cls, text: str) -> "Policy":
        key = text.strip().lower().replace("-", "").replace("_", "").replace("&", "")
        aliases = {
            "normal": cls.NORMAL,
            "sr": cls.SMART_RESET,
            "smartreset": cls.SMART_RESET,
            "srbms": cls.SR_BMS,
            "bms": cls.SR_BMS,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown policy {text!r}; expected normal, sr or srbms") from None


def plan_generation(p: float, policy: Policy) -> tuple[float, bool]:
    """Return ``(q, inverted)``: the AP->P write probability and whether the
    device output must be inverted to represent ``p``.

    The device is reset to AP (logic 1) and written towards P, so producing
    a fraction ``p`` of ones needs a switching probability of ``1 - p``.
    With the biased policy a value below one half is produced as ``1 - p``
    and inverted downstream, which keeps ``q <= 0.5``.
    """
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"stochastic value must lie in [0, 1], got {p!r}")
    if policy is Policy.SR_BMS and p < 0.5:
        return p, True
    return 1.0 - p, False
