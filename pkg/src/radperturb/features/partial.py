"""Container for the values of one feature family."""

from __future__ import annotations

import math


class Partial(dict):
    """Ordered ``name -> value`` mapping plus reasons for missing values."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.reasons: dict[str, str] = {}

    def missing(self, name: str, reason: str) -> None:
        self[name] = math.nan
        self.reasons[name] = reason

    @classmethod
    def all_missing(cls, names, reason: str) -> Partial:
        out = cls()
        for name in names:
            out.missing(name, reason)
        return out
