"""Exit-code policy.

The CLI contract is a fixed table from outcome to process exit code.
exit_code_for(outcome) fails loudly on unknown outcomes so a new outcome
cannot silently map to 0.
"""

from __future__ import annotations

from enum import Enum


class Outcome(str, Enum):
    PASS = "pass"
    USAGE_ERROR = "usage-error"
    INCONCLUSIVE = "inconclusive"
    CHECK_FAILED = "check-failed"


EXIT_CODES: dict = {
    Outcome.PASS:          0,
    Outcome.USAGE_ERROR:   2,
    Outcome.INCONCLUSIVE:  3,
    Outcome.CHECK_FAILED:  4,
}


def exit_code_for(outcome) -> int:
    """Return the registered exit code for an outcome (enum member or its value)."""
    try:
        key = Outcome(outcome)
    except ValueError:
        raise ValueError(f"Unknown outcome: {outcome!r}") from None
    return EXIT_CODES[key]


def worst(outcomes) -> Outcome:
    """Combine several check outcomes; a failed check outranks inconclusive."""
    ranked = [Outcome(o) for o in outcomes]
    for candidate in (Outcome.USAGE_ERROR, Outcome.CHECK_FAILED, Outcome.INCONCLUSIVE):
        if candidate in ranked:
            return candidate
    return Outcome.PASS
