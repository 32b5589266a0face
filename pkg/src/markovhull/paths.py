"""Finite path spaces: time grids, state spaces, admissible paths.

A path is a plain tuple of state indices, one per grid point.  Time arguments
everywhere in the package are grid indices, never raw time values.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import ContractError, EnumerationTooLarge, GluingError, ShiftUnsupported
from .rational import RationalLike, as_fraction

Path = Tuple[int, ...]

DEFAULT_ENUM_CAP = 10**7
ENUM_CAP_ENV = "MARKOVHULL_ENUM_CAP"


def enumeration_cap() -> int:
    raw = os.environ.get(ENUM_CAP_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_ENUM_CAP
    cap = int(raw)
    if cap < 1:
        raise ValueError(f"{ENUM_CAP_ENV} must be a positive integer, got {raw!r}")
    return cap


@dataclass(frozen=True)
class TimeGrid:
    points: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        pts = tuple(as_fraction(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise ValueError("a time grid needs at least 2 points")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("time grid points must be strictly increasing")

    @classmethod
    def uniform(cls, n: int, start: RationalLike = 0, step: RationalLike = 1) -> "TimeGrid":
        start, step = as_fraction(start), as_fraction(step)
        return cls(tuple(start + k * step for k in range(n)))

    def __len__(self) -> int:
        return len(self.points)

    @property
    def spacing(self) -> Optional[Fraction]:
        """Common spacing of a uniform grid, ``None`` otherwise."""
        gaps = {b - a for a, b in zip(self.points, self.points[1:])}
        return gaps.pop() if len(gaps) == 1 else None

    def gap(self, i: int) -> Fraction:
        return self.points[i + 1] - self.points[i]


@dataclass(frozen=True)
class StateSpace:
    labels: Tuple[str, ...]
    metric: Optional[Tuple[Tuple[Fraction, ...], ...]] = None

    def __post_init__(self) -> None:
        labels = tuple(str(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise ValueError("state space must be nonempty")
        if len(set(labels)) != len(labels):
            raise ValueError("state labels must be distinct")
        if self.metric is not None:
            metric = tuple(tuple(as_fraction(v) for v in row) for row in self.metric)
            object.__setattr__(self, "metric", metric)
            _validate_metric(metric, len(labels))

    @classmethod
    def of_size(cls, n: int) -> "StateSpace":
        return cls(tuple(str(k) for k in range(n)))

    @classmethod
    def cycle(cls, n: int) -> "StateSpace":
        """Z_n with the shortest-path metric of the n-cycle graph."""
        metric = tuple(
            tuple(Fraction(min((a - b) % n, (b - a) % n)) for b in range(n)) for a in range(n)
        )
        return cls(tuple(str(k) for k in range(n)), metric)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise KeyError(f"unknown state label {label!r}") from None


def _validate_metric(metric: Sequence[Sequence[Fraction]], n: int) -> None:
    if len(metric) != n or any(len(row) != n for row in metric):
        raise ValueError(f"metric must be a {n}x{n} table")
    for a in range(n):
        for b in range(n):
            d = metric[a][b]
            if d < 0:
                raise ValueError("metric entries must be nonnegative")
            if (d == 0) != (a == b):
                raise ValueError("metric must vanish exactly on the diagonal")
            if d != metric[b][a]:
                raise ValueError("metric must be symmetric")
    for a, b, c in itertools.product(range(n), repeat=3):
        if metric[a][c] > metric[a][b] + metric[b][c]:
            raise ValueError("metric violates the triangle inequality")


@dataclass(frozen=True)
class Interval:
    lo: int
    hi: int

    def __post_init__(self) -> None:
        if not 0 <= self.lo <= self.hi:
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> int:
        return self.hi - self.lo

    def indices(self) -> range:
        return range(self.lo, self.hi + 1)

    def check(self, n_times: int) -> "Interval":
        if self.hi >= n_times:
            raise ValueError(f"interval [{self.lo}, {self.hi}] exceeds a grid of {n_times} points")
        return self


@dataclass(frozen=True, order=True)
class PartialPath:
    interval: Interval = field(compare=False)
    states: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        if len(self.states) != self.interval.width + 1:
            raise ValueError("partial path length must equal interval width + 1")

    def at(self, index: int) -> int:
        return self.states[index - self.interval.lo]


@dataclass(frozen=True)
class PathSpace:
    """Admissible state sequences over a finite time grid.

    With a ``step_bound`` L, a path is admissible iff every consecutive move
    satisfies ``metric(a, b) <= L * (t[i+1] - t[i])``.  The constraint is local,
    so gluing two admissible halves at a shared point stays admissible.

    A cyclic space offers whole-step rotations.  Rotations only preserve
    admissibility when the step bound never binds, so cyclic spaces with a
    binding bound are rejected.
    """

    grid: TimeGrid
    states: StateSpace
    step_bound: Optional[Fraction] = None
    cyclic: bool = False

    def __post_init__(self) -> None:
        if self.step_bound is not None:
            bound = as_fraction(self.step_bound)
            object.__setattr__(self, "step_bound", bound)
            if bound < 0:
                raise ValueError("step bound must be nonnegative")
            if self.states.metric is None:
                raise ValueError("a step bound requires a state metric")
        if self.cyclic:
            if self.grid.spacing is None:
                raise ValueError("a cyclic space needs a uniform grid")
            if self.step_bound is not None:
                limit = self.step_bound * self.grid.spacing
                if any(d > limit for row in self.states.metric for d in row):
                    raise ValueError(
                        "cyclic spaces require a non-binding step bound; "
                        "rotation would otherwise leave the space"
                    )

    @classmethod
    def simple(cls, n_states: int, n_times: int, cyclic: bool = False) -> "PathSpace":
        return cls(TimeGrid.uniform(n_times), StateSpace.of_size(n_states), cyclic=cyclic)

    @property
    def n_times(self) -> int:
        return len(self.grid)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def last(self) -> int:
        return self.n_times - 1

    @property
    def full(self) -> Interval:
        return Interval(0, self.last)

    def step_ok(self, i: int, a: int, b: int) -> bool:
        """Is the move a -> b between grid indices i and i+1 admissible?"""
        if self.step_bound is None:
            return True
        return self.states.metric[a][b] <= self.step_bound * self.grid.gap(i)

    def is_admissible(self, path: Sequence[int]) -> bool:
        if len(path) != self.n_times:
            return False
        return self.is_admissible_partial(0, path)

    def is_admissible_partial(self, lo: int, states: Sequence[int]) -> bool:
        n = self.n_states
        if lo < 0 or lo + len(states) > self.n_times:
            return False
        if any(not (isinstance(s, int) and 0 <= s < n) for s in states):
            return False
        return all(self.step_ok(lo + k, a, b) for k, (a, b) in enumerate(zip(states, states[1:])))

    def iter_paths(
        self, interval: Optional[Interval] = None, pins: Optional[Mapping[int, int]] = None
    ) -> Iterator[Tuple[int, ...]]:
        """Lazily yield admissible state tuples over ``interval`` in lexicographic order.

        ``pins`` maps grid indices to forced states.  No enumeration cap is
        applied here; callers that materialise the result should use
        :func:`enumerate_paths`.
        """
        interval = (interval or self.full).check(self.n_times)
        pins = dict(pins or {})
        lo, hi = interval.lo, interval.hi

        def choices(i: int) -> range | Tuple[int, ...]:
            return (pins[i],) if i in pins else range(self.n_states)

        prefix: List[int] = []

        def extend(i: int) -> Iterator[Tuple[int, ...]]:
            for s in choices(i):
                if prefix and not self.step_ok(i - 1, prefix[-1], s):
                    continue
                prefix.append(s)
                if i == hi:
                    yield tuple(prefix)
                else:
                    yield from extend(i + 1)
                prefix.pop()

        yield from extend(lo)

    def raw_count(self) -> int:
        return self.n_states**self.n_times


def enumerate_paths(space: PathSpace, cap: Optional[int] = None) -> List[Path]:
    """All admissible paths of ``space``, lexicographically ordered."""
    cap = enumeration_cap() if cap is None else cap
    if space.raw_count() > cap:
        raise EnumerationTooLarge(space.raw_count(), cap)
    return list(space.iter_paths())


def evaluate(path: Sequence[int], index: int) -> int:
    return path[index]


def restrict(path: Sequence[int], interval: Interval) -> PartialPath:
    if interval.hi >= len(path):
        raise ValueError("interval exceeds path length")
    return PartialPath(interval, tuple(path[interval.lo : interval.hi + 1]))


def glue(past: PartialPath, future: PartialPath, pin_index: int, pin_state: int) -> Tuple[int, ...]:
    """Concatenate ``past`` (ending at the pin) and ``future`` (starting at it).

    Works for any adjacent intervals ``[a, pin]`` and ``[pin, b]``; the result
    covers ``[a, b]``.
    """
    if past.interval.hi != pin_index or future.interval.lo != pin_index:
        raise GluingError(
            f"intervals [{past.interval.lo}, {past.interval.hi}] and "
            f"[{future.interval.lo}, {future.interval.hi}] do not meet at index {pin_index}"
        )
    if past.states[-1] != pin_state or future.states[0] != pin_state:
        raise GluingError(
            f"pin state {pin_state} not matched: past ends at {past.states[-1]}, "
            f"future starts at {future.states[0]}"
        )
    return past.states + future.states[1:]


def shift(path: Sequence[int], steps: int, space: Optional[PathSpace] = None) -> Tuple[int, ...]:
    """Rotate a path forward in time by ``steps`` grid points: out[i] = path[i - steps].

    Without a ``space`` the rotation is applied unconditionally.  With one, a
    non-cyclic or non-uniform space only accepts ``steps == 0``.
    """
    if space is not None:
        if space.grid.spacing is None:
            raise ShiftUnsupported("shift needs a uniform time grid")
        if not space.cyclic and steps != 0:
            raise ShiftUnsupported("non-cyclic spaces only support the zero shift")
    n = len(path)
    k = steps % n
    return tuple(path[-k:]) + tuple(path[:-k]) if k else tuple(path)


def check_gluing_closure(space: PathSpace, cap: Optional[int] = None) -> bool:
    """Exhaustively verify that gluing admissible halves stays admissible."""
    paths = enumerate_paths(space, cap)
    for k in range(space.n_times):
        pasts: Dict[int, set] = {}
        futures: Dict[int, set] = {}
        for p in paths:
            pasts.setdefault(p[k], set()).add(p[: k + 1])
            futures.setdefault(p[k], set()).add(p[k:])
        for x, ps in pasts.items():
            for a in ps:
                for b in futures.get(x, ()):
                    if not space.is_admissible(a + b[1:]):
                        return False
    return True


def check_shift_closure(space: PathSpace, cap: Optional[int] = None) -> bool:
    if not space.cyclic:
        raise ShiftUnsupported("shift closure is only defined for cyclic spaces")
    paths = enumerate_paths(space, cap)
    return all(space.is_admissible(shift(p, s)) for p in paths for s in range(space.n_times))


def path_from_labels(space: PathSpace, labels: Sequence[str]) -> Path:
    path = tuple(space.states.index(lab) for lab in labels)
    if not space.is_admissible(path):
        raise ContractError(f"path {list(labels)} is not admissible")
    return path
