"""Markovianisation operators and Markov-property predicates.

``markovianise_at(m, t)`` keeps the law of the path before ``t`` and the law
after ``t`` but makes them conditionally independent given the state at
``t``.  It is computed through the disintegration at ``t`` followed by one
tensor per pinned state, and cross-checked against the closed form

    M_t(m)(path) = m_past(path[:t+1]) * m_future(path[t:]) / w_t(path[t])

where ``m_past`` and ``m_future`` are the restriction laws and ``w_t`` the
marginal at ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from .disintegration import disintegrate
from .errors import ContractError, EmptyMeasureError, InvarianceError, MarkovHullError, PinError
from .measures import (
    PathMeasure,
    StateMeasure,
    Weight,
    default_tol,
    is_mu_invariant,
    marginal_at,
    mixture,
    pair_marginal,
    pushforward,
    restrict_measure,
    tv_distance,
)
from .paths import Interval, shift
from .tensor import PinnedMeasure, tensor_at


def _require_mass(m: PathMeasure) -> None:
    if m.total_mass() <= 0:
        raise EmptyMeasureError("Markovianisation needs a measure of positive mass")


def _check_pin(m: PathMeasure, pin: int) -> None:
    if not 0 <= pin < m.space.n_times:
        raise ContractError(f"pin {pin} is outside the grid")


def _cross_check_tol(m: PathMeasure) -> float:
    return 1e-12 * max(1.0, float(m.total_mass()))


def markovianise_closed_form(m: PathMeasure, pin: int) -> PathMeasure:
    """The ratio formula, computed from restriction laws and the pin marginal only."""
    _require_mass(m)
    _check_pin(m, pin)
    space = m.space
    past = restrict_measure(m, Interval(0, pin))
    future = restrict_measure(m, Interval(pin, space.last))
    w = marginal_at(m, pin)
    by_state: Dict[int, List[Tuple[Tuple[int, ...], Weight]]] = {}
    for q, wq in future.items():
        by_state.setdefault(q[0], []).append((q, wq))
    atoms: Dict[Hashable, Weight] = {}
    for p, wp in past.items():
        x = p[-1]
        denom = w.weight(x)
        for q, wq in by_state.get(x, ()):
            atoms[p + q[1:]] = wp * wq / denom
    return PathMeasure._trusted(atoms, m.mode, space=space)


def markovianise_at(
    m: PathMeasure,
    pin: int,
    strict: bool = False,
    mu: Optional[StateMeasure] = None,
    cross_check: bool = True,
) -> PathMeasure:
    """Markovianise ``m`` at grid index ``pin``.

    The integrating measure is the pin marginal of ``m`` itself.  With
    ``strict=True`` the input must first be invariant: every one-time marginal
    equal to ``mu`` (default: the marginal at index 0).
    """
    _require_mass(m)
    _check_pin(m, pin)
    if strict:
        ref = mu if mu is not None else marginal_at(m, 0)
        if not is_mu_invariant(m, ref):
            raise InvarianceError("strict Markovianisation needs equal one-time marginals")
    d = disintegrate(m, pin)
    keys = sorted(d.family)
    pieces = []
    for x in keys:
        cond = d.family[x]
        pieces.append(
            tensor_at(PinnedMeasure.past_of(cond, pin, x), PinnedMeasure.future_of(cond, pin, x))
        )
    out = mixture([d.marginal.weight(x) for x in keys], pieces)
    if cross_check:
        other = markovianise_closed_form(m, pin)
        if not out.is_close(other, _cross_check_tol(m)):
            raise MarkovHullError(f"Markovianisation routes disagree at pin {pin}")
    return out


def _pin_state(nu: PathMeasure, pin: int, state: Optional[int]) -> int:
    states = {path[pin] for path in nu}
    if state is None:
        if len(states) != 1:
            raise PinError(f"measure is not pinned at index {pin}: states {sorted(states)}")
        return states.pop()
    if states - {state}:
        raise PinError(f"measure has atoms off state {state} at index {pin}")
    return state


def markovianise_at_point(nu: PathMeasure, pin: int, state: Optional[int] = None) -> PathMeasure:
    """Tensor of the past and future restrictions of a measure pinned at ``(pin, state)``.

    The tensor of the two restrictions has mass ``mass**2``; the result is
    rescaled so that mass is preserved (no-op for probabilities).
    """
    _require_mass(nu)
    _check_pin(nu, pin)
    x = _pin_state(nu, pin, state)
    out = tensor_at(PinnedMeasure.past_of(nu, pin, x), PinnedMeasure.future_of(nu, pin, x))
    mass = nu.total_mass()
    if mass != 1:
        out = out.scaled(1 / mass)
    return out


def as_time_set(indices: Sequence[int], n_times: int) -> Tuple[int, ...]:
    """Validate pins against the grid, keeping order.

    Repeats are kept: applying the same pin twice is harmless since each
    operator is idempotent.
    """
    idx = tuple(int(i) for i in indices)
    if any(not 0 <= i < n_times for i in idx):
        raise ContractError(f"time set {list(idx)} leaves the grid")
    return idx


def markovianise_set(m: PathMeasure, times: Sequence[int], cross_check: bool = True) -> PathMeasure:
    """Apply ``markovianise_at`` at each index of ``times``, first to last."""
    _require_mass(m)
    out = m
    for t in as_time_set(times, m.space.n_times):
        out = markovianise_at(out, t, cross_check=cross_check)
    return out


def chain_product_oracle(m: PathMeasure) -> PathMeasure:
    """The Markov chain sharing the consecutive two-time laws of ``m``.

    weight(path) = p_01(g0, g1) * prod_{i>=1} p_{i,i+1}(g_i, g_{i+1}) / w_i(g_i)

    Built only from pair and single marginals, independently of the
    tensor machinery.
    """
    _require_mass(m)
    n = m.space.n_times
    pairs = [pair_marginal(m, i, i + 1) for i in range(n - 1)]
    margs = [marginal_at(m, i) for i in range(n)]
    steps: List[Dict[int, List[Tuple[int, Weight]]]] = []
    for i in range(1, n - 1):
        table: Dict[int, List[Tuple[int, Weight]]] = {}
        for (a, b), w in pairs[i].items():
            table.setdefault(a, []).append((b, w / margs[i].weight(a)))
        steps.append(table)
    atoms: Dict[Hashable, Weight] = {}

    def extend(prefix: Tuple[int, ...], weight: Weight) -> None:
        i = len(prefix) - 1
        if i == n - 1:
            atoms[prefix] = weight
            return
        for b, p in steps[i - 1].get(prefix[-1], ()):
            extend(prefix + (b,), weight * p)

    for (a, b), w in pairs[0].items():
        extend((a, b), w)
    return PathMeasure._trusted(atoms, m.mode, space=m.space)


def markov_defect(m: PathMeasure, pin: int) -> Weight:
    return tv_distance(m, markovianise_at(m, pin))


def defect_profile(m: PathMeasure) -> List[Weight]:
    """Markov defect at every grid index, boundaries included."""
    return [markov_defect(m, t) for t in range(m.space.n_times)]


def is_markov_at(m: PathMeasure, pin: int, tol: Optional[float] = None) -> bool:
    return markov_defect(m, pin) <= default_tol(m.mode, tol)


def is_markov(m: PathMeasure, tol: Optional[float] = None) -> bool:
    return all(is_markov_at(m, t, tol) for t in range(m.space.n_times))


def strong_markov_failures(m: PathMeasure, tol: Optional[float] = None) -> List[Tuple[int, int]]:
    """(pin, state) pairs whose conditional does not factor as past (x) future."""
    _require_mass(m)
    eps = default_tol(m.mode, tol)
    bad = []
    for t in range(m.space.n_times):
        d = disintegrate(m, t)
        for x, cond in d.family.items():
            if tv_distance(cond, markovianise_at_point(cond, t, x)) > eps:
                bad.append((t, x))
    return bad


def is_strong_markov(m: PathMeasure, tol: Optional[float] = None) -> bool:
    return not strong_markov_failures(m, tol)


# -- time shifts on cyclic spaces ------------------------------------------


def shift_measure(m: PathMeasure, steps: int) -> PathMeasure:
    space = m.space
    return pushforward(m, lambda p: shift(p, steps, space), space=space)


def seam_blocks(n_times: int, steps: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Split the grid into the two blocks a rotation by ``steps`` swaps.

    Rotating by ``k = steps mod n`` turns ``A + C`` into ``C + A`` with
    ``A = [0, n-k)`` and ``C = [n-k, n)``.
    """
    k = steps % n_times
    return tuple(range(0, n_times - k)), tuple(range(n_times - k, n_times))


def seam_is_deterministic(m: PathMeasure, steps: int) -> bool:
    """Does one of the two swapped blocks carry a single value over the whole support?

    This is the finite condition under which a cyclic rotation behaves like a
    boundary-free time translation for the Markov operators: the block that
    changes sides of the pin carries no randomness.
    """
    if steps % m.space.n_times == 0:
        return True
    for block in seam_blocks(m.space.n_times, steps):
        if len({tuple(p[i] for i in block) for p in m}) <= 1:
            return True
    return False


def check_shift_equivariance(nu: PathMeasure, pin: int, steps: int, state: Optional[int] = None) -> bool:
    """shift_# M_{t,x}(nu) == M_{t+h,x}(shift_# nu), compared exactly (or at float tolerance)."""
    x = _pin_state(nu, pin, state)
    n = nu.space.n_times
    lhs = shift_measure(markovianise_at_point(nu, pin, x), steps)
    rhs = markovianise_at_point(shift_measure(nu, steps), (pin + steps) % n, x)
    return lhs.is_close(rhs)


# -- limit stability -------------------------------------------------------


@dataclass(frozen=True)
class LimitStabilityReport:
    members_fixed: bool
    pins_settle: bool
    converges: bool
    limit_fixed: bool
    distances: Tuple[Weight, ...]

    @property
    def hypotheses_hold(self) -> bool:
        return self.members_fixed and self.pins_settle and self.converges

    @property
    def holds(self) -> bool:
        """The implication: hypotheses force a fixed-point limit."""
        return (not self.hypotheses_hold) or self.limit_fixed


def check_limit_stability(
    sequence: Sequence[PathMeasure],
    pins: Sequence[int],
    state: int,
    limit: PathMeasure,
    pin: int,
    bounds: Sequence[Weight],
) -> LimitStabilityReport:
    """Finite rendering of: pinned fixed points converging in tv have a fixed-point limit.

    ``pins[n]`` is the pin of ``sequence[n]``; on a finite grid the pins must
    end on ``pin`` and stay there.  Convergence is evidenced by
    ``tv(sequence[n], limit) <= bounds[n]`` on that tail, with ``bounds``
    strictly decreasing and ending at most ``bounds[0] / len(bounds)``.
    """
    if not (len(sequence) == len(pins) == len(bounds)):
        raise ContractError("sequence, pins and bounds must have equal length")
    members_fixed = True
    for nu, t in zip(sequence, pins):
        try:
            _pin_state(nu, t, state)
        except PinError:
            members_fixed = False
            break
        if not markovianise_at_point(nu, t, state).is_close(nu):
            members_fixed = False
            break
    tail_start = len(pins)
    while tail_start > 0 and pins[tail_start - 1] == pin:
        tail_start -= 1
    pins_settle = tail_start < len(pins)
    dists = tuple(tv_distance(nu, limit) for nu in sequence)
    tail_bounds = list(bounds[tail_start:])
    decreasing = all(b2 < b1 for b1, b2 in zip(tail_bounds, tail_bounds[1:]))
    converges = (
        pins_settle
        and len(tail_bounds) >= 2
        and decreasing
        and tail_bounds[-1] * len(bounds) <= bounds[0]
        and all(d <= b for d, b in zip(dists[tail_start:], tail_bounds))
    )
    try:
        x = _pin_state(limit, pin, state)
        limit_fixed = markovianise_at_point(limit, pin, x).is_close(limit)
    except PinError:
        limit_fixed = False
    return LimitStabilityReport(members_fixed, pins_settle, converges, limit_fixed, dists)
