from fractions import Fraction as F

import pytest

from markovhull.errors import EnumerationTooLarge, GluingError, ShiftUnsupported
from markovhull.paths import (
    Interval,
    PartialPath,
    PathSpace,
    StateSpace,
    TimeGrid,
    check_gluing_closure,
    check_shift_closure,
    enumerate_paths,
    enumeration_cap,
    glue,
    path_from_labels,
    restrict,
    shift,
)


def test_uniform_grid_spacing():
    g = TimeGrid.uniform(4, start=F(1, 2), step=F(1, 3))
    assert g.points == (F(1, 2), F(5, 6), F(7, 6), F(3, 2))
    assert g.spacing == F(1, 3)
    assert TimeGrid((0, 1, 3)).spacing is None


@pytest.mark.parametrize("points", [(0,), (0, 0), (1, 0)])
def test_bad_grids(points):
    with pytest.raises(ValueError):
        TimeGrid(points)


def test_grid_refuses_floats():
    with pytest.raises(TypeError):
        TimeGrid((0.0, 0.5))


@pytest.mark.parametrize(
    "metric",
    [
        [[0, 1], [2, 0]],  # asymmetric
        [[0, 0], [0, 0]],  # zero off the diagonal
        [[0, 1, 5], [1, 0, 1], [5, 1, 0]],  # triangle
        [[1, 1], [1, 0]],  # nonzero diagonal
    ],
)
def test_metric_validation(metric):
    with pytest.raises(ValueError):
        StateSpace(tuple(str(i) for i in range(len(metric))), metric)


def test_cycle_metric():
    s = StateSpace.cycle(5)
    assert s.metric[0][4] == 1 and s.metric[0][2] == 2 and s.metric[1][4] == 2


def test_enumeration_is_lexicographic():
    paths = enumerate_paths(PathSpace.simple(2, 3))
    assert len(paths) == 8
    assert paths == sorted(paths)
    assert paths[0] == (0, 0, 0) and paths[-1] == (1, 1, 1)


def test_step_bound_counts():
    # on the 4-cycle with unit bound every move is stay or +-1: 4 * 3 * 3
    space = PathSpace(TimeGrid.uniform(3), StateSpace.cycle(4), step_bound=1)
    paths = enumerate_paths(space)
    assert len(paths) == 36
    assert (0, 2, 2) not in paths and (0, 3, 2) in paths


def test_step_bound_scales_with_gap():
    space = PathSpace(TimeGrid((0, 1, 3)), StateSpace.cycle(4), step_bound=1)
    assert not space.is_admissible((0, 2, 2))
    assert space.is_admissible((0, 1, 3))  # second gap is 2


def test_step_bound_needs_metric():
    with pytest.raises(ValueError):
        PathSpace(TimeGrid.uniform(3), StateSpace.of_size(2), step_bound=1)


def test_cyclic_requires_uniform_grid_and_loose_bound():
    with pytest.raises(ValueError):
        PathSpace(TimeGrid((0, 1, 3)), StateSpace.of_size(2), cyclic=True)
    with pytest.raises(ValueError):
        PathSpace(TimeGrid.uniform(3), StateSpace.cycle(4), step_bound=1, cyclic=True)
    PathSpace(TimeGrid.uniform(3), StateSpace.cycle(4), step_bound=2, cyclic=True)


def test_enumeration_cap(monkeypatch):
    space = PathSpace.simple(3, 4)
    with pytest.raises(EnumerationTooLarge, match="MARKOVHULL_ENUM_CAP"):
        enumerate_paths(space, cap=80)
    monkeypatch.setenv("MARKOVHULL_ENUM_CAP", "50")
    assert enumeration_cap() == 50
    with pytest.raises(EnumerationTooLarge):
        enumerate_paths(space)
    monkeypatch.setenv("MARKOVHULL_ENUM_CAP", "81")
    assert len(enumerate_paths(space)) == 81


def test_bad_enum_cap(monkeypatch):
    monkeypatch.setenv("MARKOVHULL_ENUM_CAP", "lots")
    with pytest.raises(ValueError):
        enumeration_cap()


def test_pinned_iteration():
    space = PathSpace.simple(2, 4)
    got = list(space.iter_paths(Interval(1, 3), pins={2: 1}))
    assert got == [(0, 1, 0), (0, 1, 1), (1, 1, 0), (1, 1, 1)]


def test_restrict_and_glue():
    path = (0, 1, 1, 0)
    past, fut = restrict(path, Interval(0, 2)), restrict(path, Interval(2, 3))
    assert past.states == (0, 1, 1) and fut.at(3) == 0
    assert glue(past, fut, 2, 1) == path


def test_glue_mismatch():
    a = PartialPath(Interval(0, 1), (0, 1))
    b = PartialPath(Interval(1, 2), (0, 0))
    with pytest.raises(GluingError):
        glue(a, b, 1, 1)
    with pytest.raises(GluingError):
        glue(a, PartialPath(Interval(2, 3), (1, 0)), 1, 1)


def test_shift_rotates_forward():
    space = PathSpace.simple(3, 3, cyclic=True)
    assert shift((0, 1, 2), 1, space) == (2, 0, 1)
    assert shift((0, 1, 2), -1, space) == (1, 2, 0)
    assert shift((0, 1, 2), 3, space) == (0, 1, 2)


def test_shift_refused_on_plain_space():
    space = PathSpace.simple(2, 3)
    assert shift((0, 1, 1), 0, space) == (0, 1, 1)
    with pytest.raises(ShiftUnsupported):
        shift((0, 1, 1), 1, space)
    with pytest.raises(ShiftUnsupported):
        check_shift_closure(space)


def test_closures():
    bounded = PathSpace(TimeGrid((0, 1, 3)), StateSpace.cycle(4), step_bound=1)
    assert check_gluing_closure(bounded)
    assert check_shift_closure(PathSpace(TimeGrid.uniform(3), StateSpace.cycle(4), step_bound=2, cyclic=True))


def test_labels():
    space = PathSpace(TimeGrid.uniform(2), StateSpace(("a", "b")))
    assert path_from_labels(space, ["b", "a"]) == (1, 0)
    with pytest.raises(KeyError):
        path_from_labels(space, ["c", "a"])
