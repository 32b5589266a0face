import random
from fractions import Fraction as F

import pytest

from markovhull import generators as gen
from markovhull.errors import ContractError, GluingError, ModeMismatch, PinError
from markovhull.measures import PartialPathMeasure, PathMeasure, StateMeasure, pushforward
from markovhull.paths import Interval, PathSpace, StateSpace, TimeGrid
from markovhull.tensor import (
    IntervalMap,
    PinnedMeasure,
    check_associativity,
    check_bilinearity,
    check_characterization,
    check_composition,
    pair_restriction,
    state_relabel_map,
    tensor,
    tensor_at,
    tensor_via_pullback,
    time_shift_map,
)

S = PathSpace.simple(2, 3)


def pinned(iv, atoms, k, x, space=S):
    return PinnedMeasure(PartialPathMeasure(space, iv, atoms), k, x)


@pytest.fixture
def halves():
    past = pinned(Interval(0, 1), {(0, 0): F(1, 2), (1, 0): F(1, 2)}, 1, 0)
    fut = pinned(Interval(1, 2), {(0, 0): F(1, 3), (0, 1): F(2, 3)}, 1, 0)
    return past, fut


def test_worked_tensor(halves):
    out = tensor_at(*halves)
    assert out == PathMeasure(
        S, {(0, 0, 0): F(1, 6), (0, 0, 1): F(1, 3), (1, 0, 0): F(1, 6), (1, 0, 1): F(1, 3)}
    )


def test_mass_is_multiplicative(halves):
    past, fut = halves
    heavy = PinnedMeasure(past.measure.scaled(2), 1, 0)
    assert tensor_at(heavy, fut).total_mass() == 2
    assert tensor_at(heavy, PinnedMeasure(fut.measure.scaled(F(1, 4)), 1, 0)).total_mass() == F(1, 2)


def test_pullback_route_agrees(halves):
    assert tensor_via_pullback(*halves).to_path_measure() == tensor_at(*halves)


def test_characterization(halves):
    past, fut = halves
    glued = tensor_at(past, fut)
    assert check_characterization(past, fut, glued)
    assert not check_characterization(past, fut, glued.scaled(2))
    image = pushforward(glued, pair_restriction(1))
    assert image.weight(((1, 0), (0, 1))) == F(1, 3)


def test_pin_violations():
    with pytest.raises(PinError):
        pinned(Interval(0, 1), {(0, 1): 1}, 1, 0)
    with pytest.raises(PinError):
        pinned(Interval(0, 2), {(0, 0, 0): 1}, 1, 0)  # pin must be an endpoint


def test_mismatched_pins(halves):
    past, _ = halves
    other = pinned(Interval(1, 2), {(1, 1): 1}, 1, 1)
    with pytest.raises(GluingError):
        tensor(past, other)
    gap = pinned(Interval(2, 2), {(0,): 1}, 2, 0)
    with pytest.raises(GluingError):
        tensor(past, gap)
    with pytest.raises(ModeMismatch):
        tensor(past, PinnedMeasure(halves[1].measure.to_mode("float"), 1, 0))


def test_window_tensor():
    space = PathSpace.simple(2, 5)
    a = pinned(Interval(1, 2), {(0, 1): 1}, 2, 1, space)
    b = pinned(Interval(2, 3), {(1, 0): F(1, 2), (1, 1): F(1, 2)}, 2, 1, space)
    out = tensor(a, b)
    assert out.interval == Interval(1, 3)
    assert dict(out.items()) == {(0, 1, 0): F(1, 2), (0, 1, 1): F(1, 2)}
    with pytest.raises(GluingError):
        tensor_at(a, b)


def test_step_bounded_tensor_stays_admissible():
    space = PathSpace(TimeGrid.uniform(3), StateSpace.cycle(4), step_bound=1)
    a = pinned(Interval(0, 1), {(0, 1): 1, (2, 1): 1}, 1, 1, space)
    b = pinned(Interval(1, 2), {(1, 2): 1, (1, 0): 1}, 1, 1, space)
    out = tensor_at(a, b)
    assert len(out) == 4 and all(space.is_admissible(p) for p in out)
    assert tensor_via_pullback(a, b).to_path_measure() == out


def test_bilinearity_worked(halves):
    past, fut = halves
    alt = pinned(Interval(0, 1), {(0, 0): 1}, 1, 0)
    w = StateMeasure({0: F(1, 3), 1: F(2, 3)})
    assert check_bilinearity({0: past, 1: alt}, w, fut)
    assert check_bilinearity({0: fut}, StateMeasure({0: 3}), past, mirrored=True)


def test_associativity_worked():
    space = PathSpace.simple(2, 4)
    a = pinned(Interval(0, 1), {(0, 1): F(1, 2), (1, 1): F(1, 2)}, 1, 1, space)
    b = PartialPathMeasure(space, Interval(1, 2), {(1, 0): 1})
    c = pinned(Interval(2, 3), {(0, 0): F(1, 4), (0, 1): F(3, 4)}, 2, 0, space)
    assert check_associativity(a, b, c)


def test_composition_relabel_and_shift():
    space = PathSpace.simple(3, 5)
    past = pinned(Interval(0, 1), {(0, 2): F(1, 2), (1, 2): F(1, 2)}, 1, 2, space)
    fut = pinned(Interval(1, 2), {(2, 0): F(1, 3), (2, 2): F(2, 3)}, 1, 2, space)
    perm = [2, 0, 1]
    g = lambda iv: state_relabel_map(iv, perm.__getitem__)  # noqa: E731
    assert check_composition(past, fut, g(past.interval), g(fut.interval), g(Interval(0, 2)))
    h = lambda iv: time_shift_map(iv, 2, 5)  # noqa: E731
    assert check_composition(past, fut, h(past.interval), h(fut.interval), h(Interval(0, 2)))


def test_composition_contract_errors(halves):
    past, fut = halves
    with pytest.raises(ContractError):
        check_composition(past, fut, time_shift_map(past.interval, 0, 3), time_shift_map(fut.interval, 0, 3), None)
    with pytest.raises(ContractError):
        time_shift_map(Interval(1, 2), 1, 3)
    bad = IntervalMap(lambda s: (s[0], s[0], s[0]), Interval(0, 2))
    ident = lambda iv: IntervalMap(tuple, iv)  # noqa: E731
    with pytest.raises(ContractError):
        check_composition(past, fut, ident(past.interval), ident(fut.interval), bad)


def test_randomized_pullback_agreement():
    rng = random.Random(11)
    for _ in range(50):
        space = gen.random_space(rng, 3, 5)
        k, x = rng.randrange(space.n_times), rng.randrange(space.n_states)
        past = gen.random_pinned(space, Interval(0, k), k, x, rng)
        fut = gen.random_pinned(space, Interval(k, space.last), k, x, rng)
        assert tensor_via_pullback(past, fut).to_path_measure() == tensor_at(past, fut)
