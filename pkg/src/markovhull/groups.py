"""Finite groups acting on states and paths; Haar measure and translation invariance.

The state space is identified with the group itself, so every action is free
and transitive.  A left action moves a path pointwise as ``y . path(t)``, a
right action as ``path(t) . y``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .disintegration import disintegrate
from .errors import ContractError, GroupTableError, InvarianceError
from .markov import as_time_set, markovianise_at, markovianise_set
from .measures import (
    PathMeasure,
    StateMeasure,
    default_tol,
    marginal_at,
    mixture,
    pushforward,
    tv_distance,
)
from .paths import PathSpace, StateSpace, TimeGrid

# S_3 as permutations of {0,1,2}, element order: e, (01), (02), (12), (012), (021);
# table[a][b] is "a after b".
S3_LABELS = ("e", "(01)", "(02)", "(12)", "(012)", "(021)")
S3_TABLE = (
    (0, 1, 2, 3, 4, 5),
    (1, 0, 5, 4, 3, 2),
    (2, 4, 0, 5, 1, 3),
    (3, 5, 4, 0, 2, 1),
    (4, 2, 3, 1, 5, 0),
    (5, 3, 1, 2, 0, 4),
)


@dataclass(frozen=True)
class FiniteGroup:
    """Group given by its multiplication table, validated on construction (O(n^3))."""

    table: Tuple[Tuple[int, ...], ...]
    labels: Tuple[str, ...] = ()
    identity: int = field(init=False)
    inverses: Tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        table = tuple(tuple(int(v) for v in row) for row in self.table)
        object.__setattr__(self, "table", table)
        n = len(table)
        if n == 0:
            raise GroupTableError("a group needs at least one element")
        labels = tuple(str(x) for x in self.labels) or tuple(str(k) for k in range(n))
        if len(labels) != n or len(set(labels)) != n:
            raise GroupTableError("need one distinct label per group element")
        object.__setattr__(self, "labels", labels)
        full = set(range(n))
        for row in table:
            if len(row) != n or set(row) != full:
                raise GroupTableError("multiplication table is not a Latin square")
        for col in range(n):
            if {table[r][col] for r in range(n)} != full:
                raise GroupTableError("multiplication table is not a Latin square")
        for a, b, c in itertools.product(range(n), repeat=3):
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise GroupTableError(f"multiplication is not associative at ({a}, {b}, {c})")
        ids = [e for e in range(n) if all(table[e][a] == a == table[a][e] for a in range(n))]
        if not ids:
            raise GroupTableError("no identity element")
        e = ids[0]
        object.__setattr__(self, "identity", e)
        object.__setattr__(self, "inverses", tuple(table[a].index(e) for a in range(n)))

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        if n < 1:
            raise ValueError("cyclic group order must be positive")
        return cls(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)))

    @classmethod
    def symmetric3(cls) -> "FiniteGroup":
        return cls(S3_TABLE, S3_LABELS)

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverses[a]

    def is_abelian(self) -> bool:
        n = self.order
        return all(self.table[a][b] == self.table[b][a] for a in range(n) for b in range(n))

    def state_space(self) -> StateSpace:
        return StateSpace(self.labels)

    def path_space(self, n_times: int, cyclic: bool = False) -> PathSpace:
        return PathSpace(TimeGrid.uniform(n_times), self.state_space(), cyclic=cyclic)

    def to_json(self) -> dict:
        return {"order": self.order, "table": [list(r) for r in self.table], "labels": list(self.labels)}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteGroup":
        try:
            table = data["table"]
            order = int(data["order"])
        except (KeyError, TypeError, ValueError) as exc:
            raise GroupTableError(f"malformed group file: {exc}") from exc
        if len(table) != order:
            raise GroupTableError(f"declared order {order} but table has {len(table)} rows")
        return cls(tuple(tuple(r) for r in table), tuple(data.get("labels") or ()))


@dataclass(frozen=True)
class GroupAction:
    group: FiniteGroup
    side: str = "left"

    def __post_init__(self) -> None:
        if self.side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")

    def act(self, y: int, state: int) -> int:
        g = self.group
        return g.mul(y, state) if self.side == "left" else g.mul(state, y)

    def translate_path(self, y: int, path: Sequence[int]) -> Tuple[int, ...]:
        return tuple(self.act(y, s) for s in path)

    def check_laws(self) -> bool:
        """Identity acts trivially; composition follows the side convention."""
        g = self.group
        n = g.order
        if any(self.act(g.identity, s) != s for s in range(n)):
            return False
        for y, z, s in itertools.product(range(n), repeat=3):
            composed = g.mul(y, z) if self.side == "left" else g.mul(z, y)
            if self.act(y, self.act(z, s)) != self.act(composed, s):
                return False
        return True

    @property
    def transitive(self) -> bool:
        return True


def _check_states(space: PathSpace, group: FiniteGroup) -> None:
    if space.states.labels != group.labels:
        raise ContractError("path space states are not identified with the group elements")


def haar(group: FiniteGroup, states: Optional[StateSpace] = None, mode: str = "exact") -> StateMeasure:
    """Uniform probability on the group; both left and right invariant."""
    if states is not None and states.labels != group.labels:
        raise ContractError("states are not in bijection with the group elements")
    return StateMeasure.uniform(group.order, 1, mode)


def translate_measure(y: int, m: PathMeasure, action: GroupAction) -> PathMeasure:
    _check_states(m.space, action.group)
    return pushforward(m, lambda p: action.translate_path(y, p), space=m.space)


def group_average(rho: PathMeasure, action: GroupAction) -> PathMeasure:
    """(1/|G|) sum_y translate(y, rho): the orbit average, always translation invariant."""
    if rho.total_mass() <= 0:
        raise ContractError("group average needs positive mass")
    n = action.group.order
    return mixture([Fraction(1, n)] * n, [translate_measure(y, rho, action) for y in range(n)])


def is_translation_invariant(m: PathMeasure, action: GroupAction, tol: Optional[float] = None) -> bool:
    eps = default_tol(m.mode, tol)
    return all(
        tv_distance(translate_measure(y, m, action), m) <= eps for y in range(action.group.order)
    )


def _require_invariant(m: PathMeasure, action: GroupAction) -> None:
    if not is_translation_invariant(m, action):
        raise InvarianceError(f"measure is not {action.side}-translation invariant")


def invariant_disintegration(m: PathMeasure, pin: int, action: GroupAction) -> PathMeasure:
    """Conditional law given the identity state at ``pin``.

    For an invariant measure every other conditional is its translate:
    ``family[x] == translate(x, family[e])``.  That identity is verified here
    and a mismatch raises :class:`InvarianceError`.
    """
    _require_invariant(m, action)
    g = action.group
    marg = marginal_at(m, pin)
    if marg != haar(g, mode=m.mode).scaled(m.total_mass()):
        raise InvarianceError("pin marginal is not a multiple of Haar measure")
    d = disintegrate(m, pin)
    base = d.family[g.identity]
    for x in range(g.order):
        if not translate_measure(x, base, action).is_close(d.family[x]):
            raise InvarianceError(f"conditional at state {x} is not the translate of the identity conditional")
    return base


def check_markov_preserves_invariance(m: PathMeasure, pin: int, action: GroupAction) -> bool:
    _require_invariant(m, action)
    return is_translation_invariant(markovianise_at(m, pin), action)


def check_translation_commutes(m: PathMeasure, pin: int, action: GroupAction, y: int) -> bool:
    """translate_y o M_t == M_t o translate_y (holds with or without invariance)."""
    lhs = translate_measure(y, markovianise_at(m, pin), action)
    rhs = markovianise_at(translate_measure(y, m, action), pin)
    return lhs.is_close(rhs)


@dataclass
class RegularityEntry:
    times: Tuple[int, ...]
    invariant: bool
    failing_pins: List[int]

    @property
    def ok(self) -> bool:
        return self.invariant and not self.failing_pins


@dataclass
class RegularityReport:
    """Finite witness of Markov regularity for an invariant measure.

    For each sampled time set F, ``M_F(m)`` must stay invariant and each of its
    disintegrations must be the translate family of one identity conditional.
    """

    side: str
    entries: List[RegularityEntry]

    @property
    def all_pass(self) -> bool:
        return all(e.ok for e in self.entries)

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "all_pass": self.all_pass,
            "entries": [
                {"times": list(e.times), "invariant": e.invariant, "failing_pins": e.failing_pins}
                for e in self.entries
            ],
        }


def default_time_sets(n_times: int, max_size: int = 2) -> List[Tuple[int, ...]]:
    interior = range(1, n_times - 1)
    sets: List[Tuple[int, ...]] = [()]
    for k in range(1, max_size + 1):
        sets.extend(itertools.combinations(interior, k))
    return sets


def markov_regularity_report(
    m: PathMeasure, action: GroupAction, time_sets: Optional[Iterable[Sequence[int]]] = None
) -> RegularityReport:
    _require_invariant(m, action)
    n = m.space.n_times
    sets = default_time_sets(n) if time_sets is None else [as_time_set(F, n) for F in time_sets]
    entries = []
    for F in sets:
        mf = markovianise_set(m, F)
        inv = is_translation_invariant(mf, action)
        failing = []
        if inv:
            for t in range(n):
                try:
                    invariant_disintegration(mf, t, action)
                except InvarianceError:
                    failing.append(t)
        entries.append(RegularityEntry(tuple(F), inv, failing))
    return RegularityReport(action.side, entries)
