from __future__ import annotations

import enum

__all__ = ["Verdict"]


class Verdict(enum.Enum):
    """Outcome of a finite-evidence check.

    PASS is always horizon-certified: it says the data up to the horizon
    are consistent with the property, never that the property is proved.
    """

    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"
    NOT_APPLICABLE = "not-applicable"

    @property
    def exit_code(self) -> int:
        return {Verdict.PASS: 0, Verdict.FAIL: 1}.get(self, 2)

    def __str__(self):
        return self.value
