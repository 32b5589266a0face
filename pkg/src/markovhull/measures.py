"""Finitely supported nonnegative measures on paths, partial paths and states.

Every measure carries an arithmetic ``mode``: ``"exact"`` stores weights as
:class:`fractions.Fraction`, ``"float"`` as Python floats.  Zero-weight atoms
are never stored and atoms are kept in sorted key order, so ``==`` between two
measures is structural equality of their atom maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import (
    Any,
    Callable,
    Dict,
    Hashable,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from .errors import (
    ContractError,
    EmptyMeasureError,
    ModeMismatch,
    PullbackDomainError,
    SpaceMismatch,
)
from .paths import Interval, PathSpace
from .rational import as_fraction

Weight = Union[Fraction, float]

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)
DEFAULT_FLOAT_TOL = 1e-12


def coerce_weight(value: Any, mode: str) -> Weight:
    if mode == EXACT:
        return as_fraction(value)
    if mode == FLOAT:
        if isinstance(value, str):
            return float(Fraction(value))
        return float(value)
    raise ValueError(f"unknown arithmetic mode {mode!r}")


def zero(mode: str) -> Weight:
    return Fraction(0) if mode == EXACT else 0.0


def default_tol(mode: str, tol: Optional[float] = None) -> Weight:
    """Exact mode compares with tolerance 0, whatever the caller asked for."""
    if mode == EXACT:
        return Fraction(0)
    return DEFAULT_FLOAT_TOL if tol is None else tol


class FiniteMeasure:
    """A finitely supported nonnegative measure on hashable, sortable atoms."""

    __slots__ = ("_atoms", "mode")

    def __init__(self, atoms: Union[Mapping, Iterable[Tuple[Any, Any]]] = (), mode: str = EXACT):
        if mode not in MODES:
            raise ValueError(f"unknown arithmetic mode {mode!r}")
        pairs = atoms.items() if isinstance(atoms, Mapping) else atoms
        acc: Dict[Hashable, Weight] = {}
        for key, w in pairs:
            w = coerce_weight(w, mode)
            if w < 0:
                raise ValueError(f"negative weight {w} on atom {key!r}")
            key = self._check_key(key)
            acc[key] = acc.get(key, zero(mode)) + w
        self.mode = mode
        self._atoms = _canonical(acc)

    @classmethod
    def _trusted(cls, atoms: Dict[Hashable, Weight], mode: str, **context: Any) -> "FiniteMeasure":
        obj = cls.__new__(cls)
        obj.mode = mode
        obj._atoms = _canonical(atoms)
        for name, value in context.items():
            object.__setattr__(obj, name, value)
        return obj

    def _check_key(self, key: Hashable) -> Hashable:
        return key

    def _context(self) -> Dict[str, Any]:
        return {}

    def _like(self, atoms: Dict[Hashable, Weight]) -> "FiniteMeasure":
        """Same type and context as ``self``, new (already validated) atoms."""
        return type(self)._trusted(atoms, self.mode, **self._context())

    @property
    def atoms(self) -> Mapping[Hashable, Weight]:
        return self._atoms

    def weight(self, key: Hashable) -> Weight:
        return self._atoms.get(key, zero(self.mode))

    def __getitem__(self, key: Hashable) -> Weight:
        return self.weight(key)

    def __iter__(self) -> Iterator[Hashable]:
        return iter(self._atoms)

    def __len__(self) -> int:
        return len(self._atoms)

    def __contains__(self, key: object) -> bool:
        return key in self._atoms

    def items(self):
        return self._atoms.items()

    def support(self) -> List[Hashable]:
        return list(self._atoms)

    def total_mass(self) -> Weight:
        return sum(self._atoms.values(), zero(self.mode))

    def is_zero(self) -> bool:
        return not self._atoms

    def scaled(self, c: Any) -> "FiniteMeasure":
        c = coerce_weight(c, self.mode)
        if c < 0:
            raise ValueError("scale factor must be nonnegative")
        return self._like({k: w * c for k, w in self.items()})

    def normalized(self) -> "FiniteMeasure":
        mass = self.total_mass()
        if mass == 0:
            raise EmptyMeasureError("cannot normalize a zero measure")
        out = {k: w / mass for k, w in self.items()}
        if self.mode == FLOAT:
            s = sum(out.values())
            out = {k: w / s for k, w in out.items()}
        return self._like(out)

    def to_mode(self, mode: str) -> "FiniteMeasure":
        if mode == self.mode:
            return self
        conv = float if mode == FLOAT else Fraction
        obj = type(self)._trusted({k: conv(w) for k, w in self.items()}, mode, **self._context())
        return obj

    def same_context(self, other: "FiniteMeasure") -> bool:
        return type(self) is type(other) and self._context() == other._context()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteMeasure):
            return NotImplemented
        return (
            self.same_context(other)
            and self.mode == other.mode
            and dict(self._atoms) == dict(other._atoms)
        )

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.mode, tuple(self._atoms.items())))

    def is_close(self, other: "FiniteMeasure", tol: Optional[float] = None) -> bool:
        """Atomwise comparison; exact mode ignores ``tol`` and demands equality."""
        if not self.same_context(other):
            return False
        if self.mode == EXACT and other.mode == EXACT:
            return self == other
        tol = DEFAULT_FLOAT_TOL if tol is None else tol
        keys = set(self._atoms) | set(other._atoms)
        return all(abs(float(self.weight(k)) - float(other.weight(k))) <= tol for k in keys)

    def __repr__(self) -> str:
        body = ", ".join(f"{k!r}: {w}" for k, w in self.items())
        return f"{type(self).__name__}({{{body}}}, mode={self.mode!r})"


def _canonical(atoms: Dict[Hashable, Weight]) -> Mapping[Hashable, Weight]:
    return MappingProxyType({k: atoms[k] for k in sorted(atoms) if atoms[k] != 0})


class PathMeasure(FiniteMeasure):
    """Measure on the admissible full-length paths of a :class:`PathSpace`."""

    __slots__ = ("space",)

    def __init__(self, space: PathSpace, atoms=(), mode: str = EXACT):
        object.__setattr__(self, "space", space)
        super().__init__(atoms, mode)

    def _check_key(self, key):
        key = tuple(key)
        if not self.space.is_admissible(key):
            raise ValueError(f"path {key} is not admissible in this space")
        return key

    def _context(self):
        return {"space": self.space}

    @classmethod
    def dirac(cls, space: PathSpace, path: Sequence[int], mode: str = EXACT) -> "PathMeasure":
        return cls(space, {tuple(path): 1}, mode)


class PartialPathMeasure(FiniteMeasure):
    """Measure on restrictions of admissible paths to a sub-interval of the grid.

    Atoms are state tuples covering ``interval``.
    """

    __slots__ = ("space", "interval")

    def __init__(self, space: PathSpace, interval: Interval, atoms=(), mode: str = EXACT):
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "interval", interval.check(space.n_times))
        super().__init__(atoms, mode)

    def _check_key(self, key):
        key = tuple(key)
        if len(key) != self.interval.width + 1 or not self.space.is_admissible_partial(
            self.interval.lo, key
        ):
            raise ValueError(f"partial path {key} is not admissible on {self.interval}")
        return key

    def _context(self):
        return {"space": self.space, "interval": self.interval}

    def covers_grid(self) -> bool:
        return self.interval == self.space.full

    def to_path_measure(self) -> PathMeasure:
        if not self.covers_grid():
            raise ContractError("only a partial measure on the whole grid is a path measure")
        return PathMeasure._trusted(dict(self.items()), self.mode, space=self.space)


class StateMeasure(FiniteMeasure):
    """Measure on state indices."""

    __slots__ = ()

    @classmethod
    def uniform(cls, n: int, mass: Any = 1, mode: str = EXACT) -> "StateMeasure":
        mass = coerce_weight(mass, mode)
        return cls({k: mass / n for k in range(n)}, mode)


class PairMeasure(FiniteMeasure):
    """Measure on pairs: state pairs, or (past, future) partial-path pairs."""

    __slots__ = ()


# -- operations ------------------------------------------------------------


def total_mass(m: FiniteMeasure) -> Weight:
    return m.total_mass()


def _check_compatible(measures: Sequence[FiniteMeasure]) -> None:
    first = measures[0]
    for m in measures[1:]:
        if not first.same_context(m):
            raise SpaceMismatch("measures live on different spaces")
        if m.mode != first.mode:
            raise ModeMismatch("measures use different arithmetic modes")


def mixture(coefficients: Sequence[Any], measures: Sequence[FiniteMeasure]) -> FiniteMeasure:
    """Atomwise conic combination ``sum_i c_i * m_i``."""
    if len(coefficients) != len(measures):
        raise ValueError("need one coefficient per measure")
    if not measures:
        raise ValueError("mixture of no measures has no space")
    _check_compatible(measures)
    mode = measures[0].mode
    acc: Dict[Hashable, Weight] = {}
    for c, m in zip(coefficients, measures):
        c = coerce_weight(c, mode)
        if c < 0:
            raise ValueError("mixture coefficients must be nonnegative")
        for k, w in m.items():
            acc[k] = acc.get(k, zero(mode)) + c * w
    return measures[0]._like(acc)


def pushforward(
    m: FiniteMeasure,
    f: Callable[[Any], Any],
    space: Optional[PathSpace] = None,
    interval: Optional[Interval] = None,
) -> FiniteMeasure:
    """Image measure: weights of atoms with a common image are summed.

    The result is a :class:`PathMeasure` on ``space`` when only ``space`` is
    given, a :class:`PartialPathMeasure` when ``interval`` is given too, and a
    bare :class:`FiniteMeasure` otherwise.
    """
    acc: Dict[Hashable, Weight] = {}
    for k, w in m.items():
        try:
            img = f(k)
        except (KeyError, IndexError) as exc:
            raise ContractError(f"map undefined on atom {k!r}") from exc
        if img is None:
            raise ContractError(f"map undefined on atom {k!r}")
        acc[img] = acc.get(img, zero(m.mode)) + w
    if space is not None and interval is not None:
        return PartialPathMeasure(space, interval, acc, m.mode)
    if space is not None:
        return PathMeasure(space, acc, m.mode)
    return FiniteMeasure(acc, m.mode)


def pullback(
    m: FiniteMeasure,
    f: Callable[[Any], Any],
    domain: Iterable[Any],
    space: Optional[PathSpace] = None,
    interval: Optional[Interval] = None,
) -> FiniteMeasure:
    """The unique measure on ``domain`` whose pushforward under ``f`` is ``m``.

    ``f`` must be injective on ``domain`` and every atom of ``m`` must lie in
    its image.  Result typing follows :func:`pushforward`.
    """
    preimage: Dict[Hashable, Any] = {}
    for d in domain:
        img = f(d)
        if img in preimage:
            raise ContractError(f"map is not injective: {preimage[img]!r} and {d!r} -> {img!r}")
        preimage[img] = d
    acc: Dict[Hashable, Weight] = {}
    for k, w in m.items():
        if k not in preimage:
            raise PullbackDomainError(f"atom {k!r} is outside the image of the map")
        acc[preimage[k]] = w
    if space is not None and interval is not None:
        return PartialPathMeasure(space, interval, acc, m.mode)
    if space is not None:
        return PathMeasure(space, acc, m.mode)
    return FiniteMeasure(acc, m.mode)


def product(a: FiniteMeasure, b: FiniteMeasure) -> PairMeasure:
    if a.mode != b.mode:
        raise ModeMismatch("product of measures in different modes")
    return PairMeasure._trusted({(p, q): wa * wb for p, wa in a.items() for q, wb in b.items()}, a.mode)


def restrict_measure(m: FiniteMeasure, interval: Interval) -> PartialPathMeasure:
    """Pushforward of a path (or partial path) measure onto a sub-interval."""
    space = m.space
    lo = getattr(m, "interval", space.full).lo
    hi_cur = getattr(m, "interval", space.full).hi
    if interval.lo < lo or interval.hi > hi_cur:
        raise ContractError(f"{interval} is not inside the measure's interval")
    a, b = interval.lo - lo, interval.hi - lo + 1
    acc: Dict[Hashable, Weight] = {}
    for k, w in m.items():
        part = k[a:b]
        acc[part] = acc.get(part, zero(m.mode)) + w
    return PartialPathMeasure._trusted(acc, m.mode, space=space, interval=interval)


def marginal_at(m: FiniteMeasure, index: int) -> StateMeasure:
    """Law of the state at grid ``index`` (pushforward under evaluation)."""
    lo = m.interval.lo if isinstance(m, PartialPathMeasure) else 0
    acc: Dict[Hashable, Weight] = {}
    for k, w in m.items():
        s = k[index - lo]
        acc[s] = acc.get(s, zero(m.mode)) + w
    return StateMeasure._trusted(acc, m.mode)


def pair_marginal(m: FiniteMeasure, i: int, j: int) -> PairMeasure:
    lo = m.interval.lo if isinstance(m, PartialPathMeasure) else 0
    acc: Dict[Hashable, Weight] = {}
    for k, w in m.items():
        key = (k[i - lo], k[j - lo])
        acc[key] = acc.get(key, zero(m.mode)) + w
    return PairMeasure._trusted(acc, m.mode)


def is_mu_invariant(m: PathMeasure, mu: StateMeasure, tol: Optional[float] = None) -> bool:
    """Does every one-time marginal of ``m`` equal ``mu``?"""
    for k in range(m.space.n_times):
        marg = marginal_at(m, k)
        if m.mode == EXACT and mu.mode == EXACT:
            if marg != mu:
                return False
        elif not marg.is_close(mu.to_mode(FLOAT), default_tol(FLOAT, tol)):
            return False
    return True


def tv_distance(a: FiniteMeasure, b: FiniteMeasure) -> Weight:
    """Half the l1 distance between atom weights."""
    if not a.same_context(b):
        raise SpaceMismatch("tv distance between measures on different spaces")
    if a.mode != b.mode:
        raise ModeMismatch("tv distance between measures in different modes")
    keys = set(a.atoms) | set(b.atoms)
    total = sum((abs(a.weight(k) - b.weight(k)) for k in keys), zero(a.mode))
    return total / 2


@dataclass(frozen=True)
class CylinderFunction:
    """A path function that only reads the states at ``coordinates``.

    ``table`` maps state tuples (one entry per coordinate) to rational values;
    tuples absent from the table evaluate to ``default``.
    """

    coordinates: Tuple[int, ...]
    table: Mapping[Tuple[int, ...], Fraction] = field(default_factory=dict)
    default: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        coords = tuple(self.coordinates)
        if len(set(coords)) != len(coords):
            raise ValueError("cylinder coordinates must be distinct")
        object.__setattr__(self, "coordinates", coords)
        object.__setattr__(
            self,
            "table",
            MappingProxyType({tuple(k): as_fraction(v) for k, v in dict(self.table).items()}),
        )
        object.__setattr__(self, "default", as_fraction(self.default))

    @classmethod
    def indicator(cls, coordinates: Sequence[int], states: Sequence[int]) -> "CylinderFunction":
        """Indicator of the event {path[c_i] == s_i for all i}."""
        return cls(tuple(coordinates), {tuple(states): Fraction(1)})

    @classmethod
    def constant(cls, value: Any = 1) -> "CylinderFunction":
        return cls((), {(): as_fraction(value)})

    def __call__(self, path: Sequence[int]) -> Fraction:
        key = tuple(path[c] for c in self.coordinates)
        return self.table.get(key, self.default)

    def __hash__(self) -> int:
        return hash((self.coordinates, tuple(sorted(self.table.items())), self.default))


def integrate(m: FiniteMeasure, phi: Callable[[Sequence[int]], Any]) -> Weight:
    total = zero(m.mode)
    for k, w in m.items():
        total += coerce_weight(phi(k), m.mode) * w
    return total
