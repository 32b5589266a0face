"""Iterated Markovianisation along time orderings, with convergence monitoring.

On a finite grid every ordering that eventually visits all interior indices
reaches the same fixed point, the chain product of the consecutive two-time
laws, within one pass.  The driver still records a full trace so that the
convergence is observable, and :func:`audit_orderings` compares the limits of
many random orderings.
"""

from __future__ import annotations

import csv
import io
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, TextIO, Tuple

from .errors import ContractError, SpaceMismatch
from .markov import chain_product_oracle, defect_profile, markovianise_at, strong_markov_failures
from .measures import (
    EXACT,
    CylinderFunction,
    PathMeasure,
    Weight,
    coerce_weight,
    default_tol,
    integrate,
    marginal_at,
)
from .paths import PathSpace
from .rational import format_rational


@dataclass(frozen=True)
class SubsetOrdering:
    """Sequence of pins to apply; the driver cycles through it.

    Each step adds at most one new index to the set visited so far, so any
    finite sequence is a valid prefix of a subset ordering.  Repeats are allowed.
    """

    sequence: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sequence", tuple(int(i) for i in self.sequence))
        if any(i < 0 for i in self.sequence):
            raise ContractError("ordering indices must be nonnegative")

    @property
    def sweep_size(self) -> int:
        return len(set(self.sequence))

    def covered_after(self) -> List[int]:
        """Size of the distinct-index set after each prefix."""
        seen: set = set()
        out = []
        for i in self.sequence:
            seen.add(i)
            out.append(len(seen))
        return out

    def check(self, n_times: int) -> "SubsetOrdering":
        if any(i >= n_times for i in self.sequence):
            raise ContractError(f"ordering {list(self.sequence)} leaves a grid of {n_times} points")
        return self

    def covers_interior(self, n_times: int) -> bool:
        return set(range(1, n_times - 1)) <= set(self.sequence)

    @classmethod
    def sweep(cls, n_times: int) -> "SubsetOrdering":
        """Every interior index once, left to right.  Boundary pins act trivially."""
        return cls(tuple(range(1, n_times - 1)))

    @classmethod
    def random(cls, n_times: int, seed: int) -> "SubsetOrdering":
        """Draw interior indices with replacement until all have appeared."""
        rng = random.Random(seed)
        interior = list(range(1, n_times - 1))
        seq: List[int] = []
        seen: set = set()
        while len(seen) < len(interior):
            i = rng.choice(interior)
            seq.append(i)
            seen.add(i)
        return cls(tuple(seq))

    @classmethod
    def parse(cls, text: str, n_times: int) -> "SubsetOrdering":
        """``"sweep"``, ``"random:<seed>"`` or a comma list such as ``"2,1,3"``."""
        text = text.strip()
        if text == "sweep":
            return cls.sweep(n_times)
        if text.startswith("random:"):
            try:
                seed = int(text.split(":", 1)[1])
            except ValueError as exc:
                raise ContractError(f"bad random ordering seed in {text!r}") from exc
            return cls.random(n_times, seed)
        if not text:
            return cls(())
        try:
            seq = tuple(int(tok) for tok in text.split(","))
        except ValueError as exc:
            raise ContractError(f"cannot parse ordering {text!r}") from exc
        return cls(seq).check(n_times)


# -- test functions and metrics --------------------------------------------


def _indicator_keys(space: PathSpace, max_size: Optional[int] = None) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    n, s = space.n_times, space.n_states
    top = n if max_size is None else min(max_size, n)
    for r in range(1, top + 1):
        for coords in itertools.combinations(range(n), r):
            for states in itertools.product(range(s), repeat=r):
                yield coords, states


def family_size(space: PathSpace, max_size: Optional[int] = None) -> int:
    n, s = space.n_times, space.n_states
    top = n if max_size is None else min(max_size, n)
    return sum(len(list(itertools.combinations(range(n), r))) * s**r for r in range(1, top + 1))


def default_count(space: PathSpace) -> int:
    """Single- plus two-coordinate indicators."""
    return family_size(space, 2)


def enumerate_test_functions(space: PathSpace, count: Optional[int] = None) -> List[CylinderFunction]:
    """First ``count`` cylinder indicators in canonical order.

    Order: by number of coordinates, then coordinate tuples lexicographically,
    then state tuples lexicographically.  A ``count`` beyond the full family
    returns the full family, which separates measures.
    """
    count = default_count(space) if count is None else count
    if count < 1:
        raise ValueError("need at least one test function")
    return [CylinderFunction.indicator(c, s) for c, s in itertools.islice(_indicator_keys(space), count)]


def pseudo_metric(a: PathMeasure, b: PathMeasure, phi: CylinderFunction) -> Weight:
    if a.space != b.space:
        raise SpaceMismatch("pseudo-metric needs measures on the same path space")
    return abs(integrate(a, phi) - integrate(b, phi))


def _cylinder_marginal(m: PathMeasure, coords: Tuple[int, ...]) -> Dict[Tuple[int, ...], Weight]:
    out: Dict[Tuple[int, ...], Weight] = {}
    for p, w in m.items():
        key = tuple(p[c] for c in coords)
        out[key] = out.get(key, 0) + w
    return out


def aggregate_metric(a: PathMeasure, b: PathMeasure, k: Optional[int] = None) -> Weight:
    """sum_{j<k} 2^-j |int phi_j da - int phi_j db| over the canonical indicators.

    Indicator integrals are read off cylinder marginals, one marginal per
    coordinate tuple, which keeps this linear in the support size.
    """
    if a.space != b.space:
        raise SpaceMismatch("aggregate metric needs measures on the same path space")
    k = default_count(a.space) if k is None else k
    if k < 1:
        raise ValueError("need at least one test function")
    exact = a.mode == EXACT and b.mode == EXACT
    total: Weight = Fraction(0) if exact else 0.0
    cache: Dict[Tuple[int, ...], Tuple[Dict, Dict]] = {}
    scale: Weight = Fraction(1) if exact else 1.0
    for coords, states in itertools.islice(_indicator_keys(a.space), k):
        if coords not in cache:
            cache = {coords: (_cylinder_marginal(a, coords), _cylinder_marginal(b, coords))}
        ma, mb = cache[coords]
        total += scale * abs(ma.get(states, 0) - mb.get(states, 0))
        scale /= 2
    return total


# -- trace -----------------------------------------------------------------


def _fmt(x: Weight) -> str:
    return format_rational(x) if isinstance(x, (int, Fraction)) else repr(float(x))


@dataclass(frozen=True)
class TraceRecord:
    step: int
    pin_index: Optional[int]
    metric_to_prev: Weight
    defects: Tuple[Weight, ...]
    converged: bool

    def __post_init__(self) -> None:
        if self.metric_to_prev < 0 or any(d < 0 for d in self.defects):
            raise ValueError("trace metrics must be nonnegative")

    @property
    def max_defect(self) -> Weight:
        return max(self.defects) if self.defects else 0


CSV_COLUMNS = ("step", "pin_index", "aggregate_metric_to_prev", "max_markov_defect", "converged")


@dataclass
class ConvergenceTrace:
    """Per-step records; row 0 describes the input before any step."""

    tol: Weight
    records: List[TraceRecord] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return bool(self.records) and self.records[-1].converged

    @property
    def steps(self) -> int:
        return len(self.records) - 1

    def effective_changes(self) -> int:
        return sum(1 for r in self.records[1:] if r.metric_to_prev != 0)

    def to_csv(self, out: Optional[TextIO] = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.records:
            w.writerow(
                [
                    r.step,
                    "" if r.pin_index is None else r.pin_index,
                    _fmt(r.metric_to_prev),
                    _fmt(r.max_defect),
                    "true" if r.converged else "false",
                ]
            )
        text = buf.getvalue()
        if out is not None:
            out.write(text)
        return text


def run_hull(
    m: PathMeasure,
    ordering: SubsetOrdering,
    tol: Optional[float] = None,
    max_steps: int = 1000,
    k: Optional[int] = None,
    monitor: bool = True,
) -> Tuple[PathMeasure, ConvergenceTrace]:
    """Apply ``markovianise_at`` along ``ordering`` (cycled) until every defect is within ``tol``.

    Convergence is tested before each step, so a Markov input takes no steps.
    Running out of ``max_steps`` (or having an empty ordering) leaves the
    trace flagged as not converged; no exception is raised.  With ``monitor``
    off the aggregate metric column is skipped (recorded as 0).
    """
    if m.total_mass() <= 0:
        raise ContractError("hull iteration needs positive mass")
    if max_steps < 0:
        raise ContractError("max_steps must be nonnegative")
    ordering.check(m.space.n_times)
    eps = default_tol(m.mode, tol)
    zero_metric = coerce_weight(0, m.mode)
    current = m
    profile = tuple(defect_profile(current))
    trace = ConvergenceTrace(eps)
    trace.records.append(TraceRecord(0, None, zero_metric, profile, max(profile) <= eps))
    seq = ordering.sequence
    step = 0
    while not trace.converged and step < max_steps and seq:
        pin = seq[step % len(seq)]
        nxt = markovianise_at(current, pin)
        metric = aggregate_metric(current, nxt, k) if monitor else zero_metric
        current = nxt
        profile = tuple(defect_profile(current))
        step += 1
        trace.records.append(TraceRecord(step, pin, metric, profile, max(profile) <= eps))
    return current, trace


@dataclass
class HullReport:
    strong_markov: bool
    failures: List[Tuple[int, int]]
    defects: List[Weight]
    mass_preserved: Optional[bool] = None
    marginals_preserved: Optional[bool] = None

    @property
    def passes(self) -> bool:
        return self.strong_markov and self.mass_preserved is not False and self.marginals_preserved is not False

    def to_json(self) -> dict:
        return {
            "passes": self.passes,
            "strong_markov": self.strong_markov,
            "failures": [list(f) for f in self.failures],
            "defects": [_fmt(d) for d in self.defects],
            "mass_preserved": self.mass_preserved,
            "marginals_preserved": self.marginals_preserved,
        }


def verify_hull_element(
    limit: PathMeasure, initial: Optional[PathMeasure] = None, tol: Optional[float] = None
) -> HullReport:
    """Strong Markov check, per-pin defects and, given ``initial``, a marginal audit."""
    report = HullReport(
        strong_markov=False,
        failures=strong_markov_failures(limit, tol),
        defects=list(defect_profile(limit)),
    )
    report.strong_markov = not report.failures
    if initial is not None:
        eps = default_tol(limit.mode, tol)
        report.mass_preserved = abs(limit.total_mass() - initial.total_mass()) <= eps
        report.marginals_preserved = all(
            marginal_at(limit, t).is_close(marginal_at(initial, t), tol) for t in range(limit.space.n_times)
        )
    return report


@dataclass
class OrderingAudit:
    reference: PathMeasure
    orderings: List[SubsetOrdering]
    mismatches: List[int]
    non_converged: List[int]
    matches_oracle: bool

    @property
    def all_agree(self) -> bool:
        return not self.mismatches and not self.non_converged and self.matches_oracle


def audit_orderings(
    m: PathMeasure,
    n_orderings: int = 25,
    seed: int = 0,
    tol: Optional[float] = None,
    max_steps: int = 1000,
) -> OrderingAudit:
    """Run the hull along a sweep and ``n_orderings`` random orderings and compare limits."""
    n = m.space.n_times
    reference, _ = run_hull(m, SubsetOrdering.sweep(n), tol, max_steps, monitor=False)
    rng = random.Random(seed)
    orderings = [SubsetOrdering.random(n, rng.getrandbits(64)) for _ in range(n_orderings)]
    mismatches, stalled = [], []
    for idx, ordering in enumerate(orderings):
        limit, trace = run_hull(m, ordering, tol, max_steps, monitor=False)
        if not trace.converged:
            stalled.append(idx)
        elif not limit.is_close(reference, tol):
            mismatches.append(idx)
    oracle = chain_product_oracle(m)
    return OrderingAudit(reference, orderings, mismatches, stalled, oracle.is_close(reference, tol))
