from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from markovhull.errors import ContractError, ModeMismatch, PullbackDomainError, SpaceMismatch
from markovhull.measures import (
    CylinderFunction,
    FiniteMeasure,
    PartialPathMeasure,
    PathMeasure,
    StateMeasure,
    integrate,
    is_mu_invariant,
    marginal_at,
    mixture,
    pair_marginal,
    product,
    pullback,
    pushforward,
    restrict_measure,
    tv_distance,
)
from markovhull.paths import Interval, PathSpace


def test_canonical_atoms():
    m = PathMeasure(PathSpace.simple(2, 2), [((1, 0), F(1, 3)), ((0, 1), F(1, 3)), ((1, 0), F(1, 3)), ((0, 0), 0)])
    assert list(m.atoms) == [(0, 1), (1, 0)]
    assert m.weight((1, 0)) == F(2, 3) and m.weight((1, 1)) == 0
    assert m.total_mass() == 1


def test_rejects_negative_and_inadmissible(space23):
    with pytest.raises(ValueError):
        PathMeasure(space23, {(0, 0, 0): F(-1, 2)})
    with pytest.raises(ValueError):
        PathMeasure(space23, {(0, 2, 0): 1})
    with pytest.raises(ValueError):
        PathMeasure(space23, {(0, 0): 1})


def test_exact_mode_refuses_floats(space23):
    with pytest.raises(TypeError):
        PathMeasure(space23, {(0, 0, 0): 0.5})


def test_float_mode_and_conversion(space23):
    m = PathMeasure(space23, {(0, 0, 0): "1/3", (1, 1, 1): "2/3"}, mode="float")
    assert isinstance(m.weight((0, 0, 0)), float)
    back = PathMeasure(space23, {(0, 0, 0): F(1, 3), (1, 1, 1): F(2, 3)})
    assert m.is_close(back.to_mode("float"))
    assert m != back  # modes differ


def test_normalized(space23):
    m = PathMeasure(space23, {(0, 0, 0): 2, (1, 1, 1): 6})
    assert m.normalized() == PathMeasure(space23, {(0, 0, 0): F(1, 4), (1, 1, 1): F(3, 4)})
    f = m.to_mode("float").normalized()
    assert f.total_mass() == 1.0


def test_marginals_of_fixture(eta):
    assert marginal_at(eta, 0) == StateMeasure({0: F(1, 2), 1: F(1, 2)})
    assert marginal_at(eta, 1) == StateMeasure({0: 1})
    assert dict(pair_marginal(eta, 0, 2).items()) == {(0, 0): F(1, 2), (1, 1): F(1, 2)}
    assert is_mu_invariant(eta, StateMeasure({0: F(1, 2), 1: F(1, 2)})) is False


def test_mixture(space23, eta):
    d = PathMeasure.dirac(space23, (1, 1, 1))
    m = mixture([F(1, 2), F(1, 2)], [eta, d])
    assert m.weight((0, 0, 0)) == F(1, 4) and m.weight((1, 1, 1)) == F(1, 2)
    with pytest.raises(SpaceMismatch):
        mixture([1, 1], [eta, PathMeasure.dirac(PathSpace.simple(2, 2), (0, 0))])
    with pytest.raises(ModeMismatch):
        mixture([1, 1], [eta, d.to_mode("float")])


def test_pushforward_merges(eta, space23):
    flip = lambda p: tuple(1 - s for s in p)  # noqa: E731
    assert pushforward(eta, flip, space=space23) == PathMeasure(space23, {(1, 1, 1): F(1, 2), (0, 1, 0): F(1, 2)})
    const = pushforward(eta, lambda p: p[1])
    assert dict(const.items()) == {0: 1}
    with pytest.raises(ContractError):
        pushforward(eta, lambda p: {}[p])


def test_pullback(eta, space23):
    swap = lambda p: (p[2], p[1], p[0])  # noqa: E731
    back = pullback(eta, swap, space23.iter_paths(), space=space23)
    assert pushforward(back, swap, space=space23) == eta
    with pytest.raises(ContractError):
        pullback(eta, lambda p: p[1], space23.iter_paths())
    with pytest.raises(PullbackDomainError):
        pullback(eta, swap, [(0, 0, 0)], space=space23)


def test_restrict(eta, space23):
    r = restrict_measure(eta, Interval(1, 2))
    assert isinstance(r, PartialPathMeasure) and r.interval == Interval(1, 2)
    assert dict(r.items()) == {(0, 0): F(1, 2), (0, 1): F(1, 2)}
    with pytest.raises(ContractError):
        restrict_measure(r, Interval(0, 1))


def test_product():
    a = StateMeasure({0: F(1, 3), 1: F(2, 3)})
    b = StateMeasure({1: F(1, 2), 2: F(1, 2)})
    p = product(a, b)
    assert p.weight((1, 2)) == F(1, 3) and p.total_mass() == 1


def test_tv(eta, eta_markov):
    assert tv_distance(eta, eta_markov) == F(1, 2)
    assert tv_distance(eta, eta) == 0


def test_cylinder_integration(eta, eta_markov):
    phi = CylinderFunction.indicator((0, 2), (0, 0))
    assert integrate(eta, phi) == F(1, 2)
    assert integrate(eta_markov, phi) == F(1, 4)
    g = CylinderFunction((0,), {(0,): 3, (1,): "1/2"})
    assert integrate(eta, g) == F(7, 4)
    assert integrate(eta, CylinderFunction.constant(5)) == 5
    with pytest.raises(ValueError):
        CylinderFunction((1, 1), {})


weights = st.lists(st.integers(0, 9), min_size=8, max_size=8)


@given(weights, weights)
def test_tv_is_a_metric_bound(w1, w2):
    space = PathSpace.simple(2, 3)
    paths = list(space.iter_paths())
    a = PathMeasure(space, zip(paths, w1))
    b = PathMeasure(space, zip(paths, w2))
    assert tv_distance(a, b) == tv_distance(b, a) >= 0
    assert (tv_distance(a, b) == 0) == (a == b)
    for t in range(3):
        assert tv_distance(marginal_at(a, t), marginal_at(b, t)) <= tv_distance(a, b)
