"""Tensor product of pinned partial-path measures through the gluing map.

Given a measure on ``[a, k]`` concentrated on paths ending at state ``x`` and a
measure on ``[k, b]`` concentrated on paths starting at ``x``, the tensor is the
unique measure on ``[a, b]`` whose (past, future) restriction pair has the
product law.  It is computed by enumerating support pairs; :func:`tensor_via_pullback`
rebuilds it by pulling the product back through the restriction map and serves
as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Hashable, Mapping, Optional, Tuple

from .errors import (
    ContractError,
    EnumerationTooLarge,
    GluingError,
    ModeMismatch,
    PinError,
    SpaceMismatch,
)
from .measures import (
    PartialPathMeasure,
    PathMeasure,
    StateMeasure,
    Weight,
    mixture,
    product,
    pullback,
    pushforward,
    restrict_measure,
)
from .paths import Interval, enumeration_cap


@dataclass(frozen=True)
class PinnedMeasure:
    """A partial-path measure concentrated on ``{path[pin_index] == pin_state}``.

    The pin must be an endpoint of the measure's interval.  Pinning is checked
    structurally, with no tolerance, in both arithmetic modes.
    """

    measure: PartialPathMeasure
    pin_index: int
    pin_state: int

    def __post_init__(self) -> None:
        iv = self.measure.interval
        if self.pin_index not in (iv.lo, iv.hi):
            raise PinError(f"pin {self.pin_index} is not an endpoint of [{iv.lo}, {iv.hi}]")
        off = self.pin_index - iv.lo
        for atom in self.measure:
            if atom[off] != self.pin_state:
                raise PinError(
                    f"atom {atom} does not pass through state {self.pin_state} at index {self.pin_index}"
                )

    @property
    def interval(self) -> Interval:
        return self.measure.interval

    @property
    def mode(self) -> str:
        return self.measure.mode

    @classmethod
    def past_of(cls, m, pin_index: int, pin_state: int) -> "PinnedMeasure":
        """Restriction of a path measure to ``[start, pin_index]``, pinned at its right end."""
        lo = getattr(m, "interval", m.space.full).lo
        return cls(restrict_measure(m, Interval(lo, pin_index)), pin_index, pin_state)

    @classmethod
    def future_of(cls, m, pin_index: int, pin_state: int) -> "PinnedMeasure":
        hi = getattr(m, "interval", m.space.full).hi
        return cls(restrict_measure(m, Interval(pin_index, hi)), pin_index, pin_state)


def _check_pair(past: PinnedMeasure, future: PinnedMeasure) -> None:
    if past.measure.space != future.measure.space:
        raise SpaceMismatch("tensor factors live on different path spaces")
    if past.mode != future.mode:
        raise ModeMismatch("tensor factors use different arithmetic modes")
    if past.pin_index != future.pin_index or past.pin_state != future.pin_state:
        raise GluingError(
            f"pins differ: ({past.pin_index}, {past.pin_state}) vs ({future.pin_index}, {future.pin_state})"
        )
    k = past.pin_index
    if past.interval.hi != k or future.interval.lo != k:
        raise GluingError(
            f"intervals [{past.interval.lo}, {past.interval.hi}] and "
            f"[{future.interval.lo}, {future.interval.hi}] must meet exactly at index {k}"
        )


def tensor(past: PinnedMeasure, future: PinnedMeasure) -> PartialPathMeasure:
    """Glued product measure on ``[past.lo, future.hi]``.

    Total mass is the product of the factor masses; no normalisation happens.
    """
    _check_pair(past, future)
    atoms: Dict[Hashable, Weight] = {}
    for p, wp in past.measure.items():
        for q, wq in future.measure.items():
            atoms[p + q[1:]] = wp * wq
    space = past.measure.space
    return PartialPathMeasure._trusted(
        atoms, past.mode, space=space, interval=Interval(past.interval.lo, future.interval.hi)
    )


def tensor_at(past: PinnedMeasure, future: PinnedMeasure) -> PathMeasure:
    """Tensor of a past on ``[0, k]`` and a future on ``[k, last]`` as a full path measure."""
    out = tensor(past, future)
    if not out.covers_grid():
        raise GluingError("tensor_at needs factors covering the whole grid; use tensor() for windows")
    return out.to_path_measure()


def pair_restriction(k: int, lo: int = 0) -> Callable[[Tuple[int, ...]], Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """The injective map path -> (path restricted to [lo, k], path restricted to [k, hi])."""
    cut = k - lo

    def f(path):
        return (tuple(path[: cut + 1]), tuple(path[cut:]))

    return f


def tensor_via_pullback(
    past: PinnedMeasure, future: PinnedMeasure, cap: Optional[int] = None
) -> PartialPathMeasure:
    """Pull the product measure back through the gluing bijection.

    The domain is every admissible partial path over the glued window passing
    through the pin, enumerated lazily.
    """
    _check_pair(past, future)
    space = past.measure.space
    window = Interval(past.interval.lo, future.interval.hi)
    cap = enumeration_cap() if cap is None else cap
    raw = space.n_states ** (window.width)
    if raw > cap:
        raise EnumerationTooLarge(raw, cap)
    domain = space.iter_paths(window, pins={past.pin_index: past.pin_state})
    prod = product(past.measure, future.measure)
    return pullback(prod, pair_restriction(past.pin_index, window.lo), domain, space=space, interval=window)


def check_characterization(past: PinnedMeasure, future: PinnedMeasure, candidate) -> bool:
    """Is ``candidate`` the measure whose restriction pair has the product law?"""
    _check_pair(past, future)
    window = Interval(past.interval.lo, future.interval.hi)
    cand_iv = getattr(candidate, "interval", candidate.space.full)
    if cand_iv != window or candidate.mode != past.mode:
        return False
    off = past.pin_index - window.lo
    if any(path[off] != past.pin_state for path in candidate):
        return False
    image = pushforward(candidate, pair_restriction(past.pin_index, window.lo))
    prod = product(past.measure, future.measure)
    return dict(image.items()) == dict(prod.items()) if past.mode == "exact" else _close(image, prod)


def _close(a, b, tol: float = 1e-12) -> bool:
    keys = set(a.atoms) | set(b.atoms)
    return all(abs(float(a.weight(k)) - float(b.weight(k))) <= tol for k in keys)


@dataclass(frozen=True)
class IntervalMap:
    """A map between partial paths: applies ``fn`` to state tuples and lands on ``target``."""

    fn: Callable[[Tuple[int, ...]], Tuple[int, ...]]
    target: Interval

    def push(self, m: PartialPathMeasure, space=None) -> PartialPathMeasure:
        return pushforward(m, self.fn, space=space or m.space, interval=self.target)


def time_shift_map(interval: Interval, steps: int, n_times: int) -> IntervalMap:
    """Move a window ``steps`` grid points later (earlier if negative) without wrapping."""
    target = Interval(interval.lo + steps, interval.hi + steps) if interval.lo + steps >= 0 else None
    if target is None or target.hi >= n_times:
        raise ContractError(f"shifting [{interval.lo}, {interval.hi}] by {steps} leaves the grid")
    return IntervalMap(lambda states: tuple(states), target)


def state_relabel_map(interval: Interval, relabel: Callable[[int], int]) -> IntervalMap:
    """Apply a state map pointwise in time, keeping the window."""
    return IntervalMap(lambda states: tuple(relabel(s) for s in states), interval)


def check_composition(
    past: PinnedMeasure,
    future: PinnedMeasure,
    g_past: IntervalMap,
    g_future: IntervalMap,
    g_full: Optional[IntervalMap],
) -> bool:
    """Tensor of pushforwards equals pushforward of the tensor.

    The three maps must commute with the restriction pair on the support of
    the tensor; a missing or incompatible ``g_full`` is a contract violation.
    """
    if g_full is None:
        raise ContractError("composition check needs the map on glued paths")
    _check_pair(past, future)
    glued = tensor(past, future)
    k, lo = past.pin_index, glued.interval.lo
    new_k = g_past.target.hi
    if g_future.target.lo != new_k or g_full.target != Interval(g_past.target.lo, g_future.target.hi):
        raise ContractError("target intervals of the maps do not fit together")
    split = pair_restriction(k, lo)
    new_split = pair_restriction(new_k, g_full.target.lo)
    for path in glued:
        a, b = split(path)
        if new_split(g_full.fn(path)) != (g_past.fn(a), g_future.fn(b)):
            raise ContractError(f"maps do not commute with the gluing map on {path}")
    space = past.measure.space
    pushed_past = g_past.push(past.measure, space)
    pushed_future = g_future.push(future.measure, space)
    states = {atom[-1] for atom in pushed_past} | {atom[0] for atom in pushed_future}
    if len(states) > 1:
        raise ContractError("pushed factors are not pinned at a common state")
    if not states:
        return g_full.push(glued, space).is_zero()
    new_x = states.pop()
    lhs = tensor(PinnedMeasure(pushed_past, new_k, new_x), PinnedMeasure(pushed_future, new_k, new_x))
    rhs = g_full.push(glued, space)
    return lhs.is_close(rhs)


def check_bilinearity(
    family: Mapping[int, PinnedMeasure],
    weights: StateMeasure,
    fixed: PinnedMeasure,
    mirrored: bool = False,
) -> bool:
    """sum_y w_y (alpha_y (x) fixed) == (sum_y w_y alpha_y) (x) fixed.

    With ``mirrored`` the family supplies futures and ``fixed`` is the past.
    """
    keys = sorted(y for y in family if weights.weight(y) != 0)
    if not keys:
        return True
    pins = {(family[y].pin_index, family[y].pin_state) for y in keys}
    if len(pins) != 1:
        raise PinError("family members must share one (time, state) pin")
    coeffs = [weights.weight(y) for y in keys]

    def tens(a: PinnedMeasure) -> PartialPathMeasure:
        return tensor(fixed, a) if mirrored else tensor(a, fixed)

    lhs = mixture(coeffs, [tens(family[y]) for y in keys])
    (k, x), = pins
    mixed = PinnedMeasure(mixture(coeffs, [family[y].measure for y in keys]), k, x)
    rhs = tens(mixed)
    return lhs.is_close(rhs)


def check_associativity(a: PinnedMeasure, b: PartialPathMeasure, c: PinnedMeasure) -> bool:
    """a (x)_{t1,x1} [b (x)_{t2,x2} c] == [a (x)_{t1,x1} b] (x)_{t2,x2} c.

    ``b`` lives on ``[t1, t2]`` and must pass through ``x1`` at ``t1`` and ``x2`` at ``t2``.
    """
    t1, x1, t2, x2 = a.pin_index, a.pin_state, c.pin_index, c.pin_state
    b_left = PinnedMeasure(b, t1, x1)
    b_right = PinnedMeasure(b, t2, x2)
    bc = tensor(b_right, c)
    left = tensor(a, PinnedMeasure(bc, t1, x1))
    ab = tensor(a, b_left)
    right = tensor(PinnedMeasure(ab, t2, x2), c)
    return left.is_close(right)
