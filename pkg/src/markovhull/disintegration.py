"""Disintegration of path measures along evaluation maps, and reassembly."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Hashable, Mapping, Optional, Tuple

from .errors import EmptyMeasureError
from .measures import (
    FLOAT,
    PairMeasure,
    PathMeasure,
    StateMeasure,
    Weight,
    default_tol,
    marginal_at,
    mixture,
    pushforward,
    zero,
)


@dataclass(frozen=True)
class Disintegration:
    """Conditional laws ``family[x]`` of paths given ``path[pin_index] == x``.

    Only states of positive marginal weight have a family member.
    """

    pin_index: int
    family: Mapping[int, PathMeasure]
    marginal: StateMeasure

    def check(self, tol: Optional[float] = None) -> bool:
        """Verify keying, unit mass and pin concentration of every member."""
        if set(self.family) != set(self.marginal.support()):
            return False
        for x, member in self.family.items():
            eps = default_tol(member.mode, tol)
            if abs(member.total_mass() - 1) > eps:
                return False
            if any(path[self.pin_index] != x for path in member):
                return False
        return True


@dataclass(frozen=True)
class TwoTimeDisintegration:
    pin_indices: Tuple[int, int]
    family: Mapping[Tuple[int, int], PathMeasure]
    pair_marginal: PairMeasure


def _split(m: PathMeasure, key: Callable) -> Tuple[Dict[Hashable, Dict], Dict[Hashable, Weight]]:
    groups: Dict[Hashable, Dict] = {}
    weights: Dict[Hashable, Weight] = {}
    for path, w in m.items():
        k = key(path)
        groups.setdefault(k, {})[path] = w
        weights[k] = weights.get(k, zero(m.mode)) + w
    return groups, weights


def _conditionals(m: PathMeasure, groups, weights) -> Dict[Hashable, PathMeasure]:
    family = {}
    for k, atoms in groups.items():
        w = weights[k]
        cond = {p: v / w for p, v in atoms.items()}
        if m.mode == FLOAT:
            s = sum(cond.values())
            cond = {p: v / s for p, v in cond.items()}
        family[k] = PathMeasure._trusted(cond, m.mode, space=m.space)
    return family


def disintegrate(m: PathMeasure, pin_index: int) -> Disintegration:
    if m.total_mass() <= 0:
        raise EmptyMeasureError("cannot disintegrate a zero measure")
    groups, weights = _split(m, lambda p: p[pin_index])
    family = _conditionals(m, groups, weights)
    return Disintegration(pin_index, dict(sorted(family.items())), StateMeasure._trusted(weights, m.mode))


def reassemble(d: Disintegration) -> PathMeasure:
    keys = sorted(d.family)
    if not keys:
        raise EmptyMeasureError("empty disintegration")
    return mixture([d.marginal.weight(x) for x in keys], [d.family[x] for x in keys])


def disintegrate_two_time(m: PathMeasure, i: int, j: int) -> TwoTimeDisintegration:
    if not i < j:
        raise ValueError("two-time disintegration needs i < j")
    if m.total_mass() <= 0:
        raise EmptyMeasureError("cannot disintegrate a zero measure")
    groups, weights = _split(m, lambda p: (p[i], p[j]))
    family = _conditionals(m, groups, weights)
    return TwoTimeDisintegration((i, j), dict(sorted(family.items())), PairMeasure._trusted(weights, m.mode))


def reassemble_two_time(d: TwoTimeDisintegration) -> PathMeasure:
    keys = sorted(d.family)
    return mixture([d.pair_marginal.weight(k) for k in keys], [d.family[k] for k in keys])


def check_mixture_compatibility(m: PathMeasure, i: int, j: int) -> bool:
    """Conditionals at pin j are mixtures of the two-time conditionals.

    family_j[y] == sum_x pair_conditional[x, y] * nu(x, y) / marginal_j(y),
    checked exactly (or at float tolerance).
    """
    single = disintegrate(m, j)
    double = disintegrate_two_time(m, i, j)
    for y, member in single.family.items():
        wy = single.marginal.weight(y)
        keys = [k for k in double.family if k[1] == y]
        rebuilt = mixture(
            [double.pair_marginal.weight(k) / wy for k in keys], [double.family[k] for k in keys]
        )
        if not rebuilt.is_close(member):
            return False
    return True


def check_pushforward_disintegration(
    d: Disintegration,
    path_map: Callable,
    new_pin: int,
    state_map: Optional[Callable[[int], int]] = None,
    space=None,
    tol: Optional[float] = None,
) -> bool:
    """Does pushing every conditional through ``path_map`` disintegrate the pushed measure?

    The target disintegration is taken along evaluation at ``new_pin``, with the
    member formerly keyed by ``x`` now expected to sit over ``state_map(x)``
    (identity by default).  Returns False when the pushed members are not
    concentrated on their level sets, when the relabelled marginal is not the
    law of the new pin state, or when they fail to reassemble the pushforward.
    """
    state_map = state_map or (lambda x: x)
    if not d.family:
        return False
    first = next(iter(d.family.values()))
    space = space or first.space
    pushed = {x: pushforward(member, path_map, space=space) for x, member in d.family.items()}
    # concentration on h^{-1}(state_map(x))
    for x, member in pushed.items():
        if any(path[new_pin] != state_map(x) for path in member):
            return False
    keys = sorted(d.family)
    whole = pushforward(reassemble(d), path_map, space=space)
    relabelled = pushforward(d.marginal, state_map)
    if not relabelled.is_close(pushforward(marginal_at(whole, new_pin), lambda s: s), tol):
        return False
    rebuilt = mixture([d.marginal.weight(x) for x in keys], [pushed[x] for x in keys])
    return rebuilt.is_close(whole, tol)
