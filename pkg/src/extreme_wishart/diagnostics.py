"""Series bookkeeping shared by the c.d.f. evaluators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import NoConvergence, PrecisionLoss
from .special import DEFAULT_OPTIONS, SeriesOptions

#: values this far outside [0, 1] are treated as rounding and clamped
CLAMP_TOL = 1e-10


@dataclass
class Diagnostics:
    """Mutable record filled by an evaluator: series lengths and clamp events."""

    terms: list = field(default_factory=list)
    clamps: int = 0

    @property
    def max_terms(self) -> int:
        return max(self.terms, default=0)

    def record(self, n: int):
        self.terms.append(int(n))


def adaptive_sum(term, opts: SeriesOptions = DEFAULT_OPTIONS, label: str = "series",
                 floor: float = 0.0):
    """Sum ``term(0) + term(1) + ...`` under the :class:`SeriesOptions` stop rule.

    Stops after the first term (past ``min_terms``) that is no larger than
    its predecessor and below ``rel_tol * max(|total|, floor)``. ``floor``
    lets a caller ask for absolute rather than relative accuracy once the
    total is small next to the quantity it feeds. Returns
    ``(total, terms_used)``.
    """
    total = 0.0
    prev = math.inf
    last = math.nan
    for k in range(opts.max_terms):
        last = term(k)
        if not math.isfinite(last):
            raise NoConvergence(f"{label}: non-finite term at k={k}", terms=k, last_term=last)
        total += last
        small = abs(last) <= opts.rel_tol * max(abs(total), floor)
        if k + 1 >= opts.min_terms and small and abs(last) <= prev:
            return total, k + 1
        prev = abs(last)
    raise NoConvergence(f"{label} did not converge in {opts.max_terms} terms",
                        terms=opts.max_terms, last_term=last)


def clamp_probability(value: float, diag: Diagnostics | None = None, label: str = "c.d.f.") -> float:
    if 0.0 <= value <= 1.0:
        return value
    if -CLAMP_TOL <= value < 0.0 or 1.0 < value <= 1.0 + CLAMP_TOL:
        if diag is not None:
            diag.clamps += 1
        return min(max(value, 0.0), 1.0)
    raise PrecisionLoss(f"{label} evaluated to {value!r}, outside [0, 1]")
