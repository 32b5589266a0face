"""Seeded generators for random measures and the standard fixtures.

Every generator takes a ``random.Random`` so that a seed fixes the output
exactly.  Weights are small positive integers normalised to rationals.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import ContractError
from .groups import FiniteGroup, GroupAction, group_average
from .measures import EXACT, PartialPathMeasure, PathMeasure, mixture
from .paths import Interval, PathSpace
from .tensor import PinnedMeasure, tensor_at

Rng = random.Random


def random_partial_path(
    space: PathSpace, interval: Interval, rng: Rng, pins: Optional[Mapping[int, int]] = None
) -> Tuple[int, ...]:
    """Uniform-ish admissible state tuple over ``interval`` honouring ``pins``.

    Rejection sampling first; spaces where the step bound makes that hopeless
    fall back to a choice from the full enumeration of the window.
    """
    pins = dict(pins or {})
    lo, hi = interval.lo, interval.hi
    for _ in range(64):
        states = tuple(pins.get(i, rng.randrange(space.n_states)) for i in range(lo, hi + 1))
        if space.is_admissible_partial(lo, states):
            return states
    candidates = list(space.iter_paths(interval, pins))
    if not candidates:
        raise ContractError(f"no admissible path over [{lo}, {hi}] through {pins}")
    return rng.choice(candidates)


def random_weights(rng: Rng, n: int, max_weight: int = 5, mass: Fraction = Fraction(1)) -> List[Fraction]:
    raw = [rng.randint(1, max_weight) for _ in range(n)]
    total = sum(raw)
    return [Fraction(r, total) * mass for r in raw]


def random_partial_measure(
    space: PathSpace,
    interval: Interval,
    rng: Rng,
    pins: Optional[Mapping[int, int]] = None,
    atoms: Tuple[int, int] = (1, 4),
    mass: Fraction = Fraction(1),
) -> PartialPathMeasure:
    k = rng.randint(*atoms)
    paths = [random_partial_path(space, interval, rng, pins) for _ in range(k)]
    return PartialPathMeasure(space, interval, zip(paths, random_weights(rng, k, mass=mass)))


def random_measure(
    space: PathSpace, rng: Rng, atoms: Tuple[int, int] = (1, 6), pins: Optional[Mapping[int, int]] = None
) -> PathMeasure:
    return random_partial_measure(space, space.full, rng, pins, atoms).to_path_measure()


def random_pinned(
    space: PathSpace, interval: Interval, pin: int, state: int, rng: Rng, atoms: Tuple[int, int] = (1, 4),
    mass: Fraction = Fraction(1),
) -> PinnedMeasure:
    return PinnedMeasure(random_partial_measure(space, interval, rng, {pin: state}, atoms, mass), pin, state)


def random_space(rng: Rng, max_states: int = 4, max_times: int = 5, min_times: int = 2) -> PathSpace:
    return PathSpace.simple(rng.randint(2, max_states), rng.randint(min_times, max_times))


# -- invariant measures ----------------------------------------------------


def cyclic_state_action(space: PathSpace) -> GroupAction:
    """Z_n acting on the n states by rotation of labels."""
    return GroupAction(FiniteGroup.cyclic(space.n_states))


def random_mu_invariant(space: PathSpace, rng: Rng, atoms: Tuple[int, int] = (1, 4)) -> PathMeasure:
    """Random measure averaged over rotations of the states.

    Every one-time marginal of the result is uniform.
    """
    base = random_measure(space, rng, atoms)
    n = space.n_states
    shifted = []
    for y in range(n):
        moved: Dict[Tuple[int, ...], Fraction] = {}
        for p, w in base.items():
            q = tuple((s + y) % n for s in p)
            if not space.is_admissible(q):
                raise ContractError("state rotation does not preserve admissibility on this space")
            moved[q] = moved.get(q, Fraction(0)) + w
        shifted.append(PathMeasure(space, moved))
    return mixture([Fraction(1, n)] * n, shifted)


def group_invariant(
    group: FiniteGroup, n_times: int, rng: Rng, side: str = "left", atoms: Tuple[int, int] = (1, 3)
) -> PathMeasure:
    space = group.path_space(n_times)
    return group_average(random_measure(space, rng, atoms), GroupAction(group, side))


# -- fixtures --------------------------------------------------------------


def correlated_pair(mode: str = EXACT) -> PathMeasure:
    """Half on (0,0,0), half on (1,0,1): start and end agree, the middle is fixed."""
    space = PathSpace.simple(2, 3)
    return PathMeasure(space, {(0, 0, 0): Fraction(1, 2), (1, 0, 1): Fraction(1, 2)}).to_mode(mode)


def dirac(space: PathSpace, path: Sequence[int], mode: str = EXACT) -> PathMeasure:
    return PathMeasure.dirac(space, tuple(path), mode)


def chain_measure(space: PathSpace, rng: Rng, max_weight: int = 4) -> PathMeasure:
    """Time-inhomogeneous Markov chain with random rational kernels (zeros allowed)."""
    s = space.n_states

    def row() -> List[Fraction]:
        raw = [rng.randint(0, max_weight) for _ in range(s)]
        if not any(raw):
            raw[rng.randrange(s)] = 1
        total = sum(raw)
        return [Fraction(r, total) for r in raw]

    init = row()
    kernels = [[row() for _ in range(s)] for _ in range(space.n_times - 1)]
    atoms: Dict[Tuple[int, ...], Fraction] = {}
    for p in space.iter_paths():
        w = init[p[0]]
        for i, (a, b) in enumerate(zip(p, p[1:])):
            w *= kernels[i][a][b]
            if not w:
                break
        if w:
            atoms[p] = w
    return PathMeasure(space, atoms)


# -- cyclic-shift fixtures -------------------------------------------------


@dataclass(frozen=True)
class ShiftCase:
    measure: PathMeasure
    pin: int
    state: int
    steps: int


def padded_cyclic_case(space: PathSpace, rng: Rng, atoms: Tuple[int, int] = (1, 5)) -> ShiftCase:
    """A pinned measure and a rotation under which one swapped block is constant.

    A rotation by ``h`` exchanges the blocks ``[0, n-h)`` and ``[n-h, n)``.  One
    of them is frozen to a single random state sequence across the support, so
    the pin sees the same conditional structure before and after rotating.
    """
    if not space.cyclic:
        raise ContractError("shift cases need a cyclic space")
    n = space.n_times
    h = rng.randrange(1, n)
    blocks = [range(0, n - h), range(n - h, n)]
    frozen = blocks[rng.randrange(2)]
    fixed = {i: rng.randrange(space.n_states) for i in frozen}
    pin = rng.randrange(n)
    state = fixed[pin] if pin in fixed else rng.randrange(space.n_states)
    pins = dict(fixed)
    pins[pin] = state
    return ShiftCase(random_measure(space, rng, atoms, pins), pin, state, h)


def wrapping_counterexample() -> ShiftCase:
    """Rotation that carries correlated coordinates across the pin.

    Under rotation by 1 on a 4-point cyclic grid, the coordinate behind the pin
    moves in front of it, so pinning then rotating differs from rotating then
    pinning.
    """
    space = PathSpace.simple(2, 4, cyclic=True)
    m = PathMeasure(space, {(0, 0, 0, 0): Fraction(1, 2), (1, 0, 1, 1): Fraction(1, 2)})
    return ShiftCase(m, 1, 0, 1)


# -- limit-stability sequences ---------------------------------------------


@dataclass(frozen=True)
class StabilitySequence:
    sequence: Tuple[PathMeasure, ...]
    pins: Tuple[int, ...]
    bounds: Tuple[Fraction, ...]
    limit: PathMeasure
    pin: int
    state: int


def _blend(a: PinnedMeasure, b: PinnedMeasure, eps: Fraction) -> PinnedMeasure:
    return PinnedMeasure(mixture([1 - eps, eps], [a.measure, b.measure]), a.pin_index, a.pin_state)


def convergent_fixed_points(
    space: PathSpace, rng: Rng, length: int = 6, lead_in: int = 2
) -> StabilitySequence:
    """Pinned tensors (fixed points of the pinned operator) converging in tv.

    Term ``k`` of the tail is ``blend(a, a', e_k) (x) blend(b, b', e_k)`` with
    ``e_k = 2^-(k+1)``; its tv distance to ``a (x) b`` is at most ``2 e_k``.
    The first ``lead_in`` terms are Dirac measures pinned elsewhere, which are
    fixed at their own pin.
    """
    n = space.n_times
    if n < 3:
        raise ContractError("need an interior pin")
    pin = rng.randrange(1, n - 1)
    x = rng.randrange(space.n_states)
    past_iv, fut_iv = Interval(0, pin), Interval(pin, n - 1)
    a, a2 = (random_pinned(space, past_iv, pin, x, rng) for _ in range(2))
    b, b2 = (random_pinned(space, fut_iv, pin, x, rng) for _ in range(2))
    limit = tensor_at(a, b)
    seq: List[PathMeasure] = []
    pins: List[int] = []
    bounds: List[Fraction] = []
    other = [t for t in range(n) if t != pin]
    for _ in range(lead_in):
        t = rng.choice(other)
        seq.append(dirac(space, random_partial_path(space, space.full, rng, {t: x})))
        pins.append(t)
        bounds.append(Fraction(1))
    for k in range(length):
        eps = Fraction(1, 2 ** (k + 1))
        seq.append(tensor_at(_blend(a, a2, eps), _blend(b, b2, eps)))
        pins.append(pin)
        bounds.append(2 * eps)
    return StabilitySequence(tuple(seq), tuple(pins), tuple(bounds), limit, pin, x)
