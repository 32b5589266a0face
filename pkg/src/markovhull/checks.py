"""Randomized property suites, shared by the ``check`` command and the tests.

Each property draws one instance from a ``random.Random`` and returns True when
the property holds on it.  Instance ``i`` of property ``p`` under seed ``s`` is
drawn from ``Random(f"{s}:{p}:{i}")``, so any single failure can be replayed.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from . import generators as gen
from .groups import (
    FiniteGroup,
    GroupAction,
    check_markov_preserves_invariance,
    check_translation_commutes,
    group_average,
    invariant_disintegration,
    is_translation_invariant,
)
from .hull import SubsetOrdering, audit_orderings, run_hull, verify_hull_element
from .markov import (
    chain_product_oracle,
    is_markov,
    markovianise_at,
    markovianise_closed_form,
    markovianise_set,
)
from .measures import StateMeasure, marginal_at, product, pushforward
from .paths import Interval
from .tensor import (
    check_associativity,
    check_bilinearity,
    check_characterization,
    check_composition,
    pair_restriction,
    state_relabel_map,
    tensor_at,
    tensor_via_pullback,
    time_shift_map,
)

Property = Callable[[random.Random], bool]


def _pin_split(rng: random.Random, max_states: int = 4, max_times: int = 5):
    space = gen.random_space(rng, max_states, max_times)
    k = rng.randrange(space.n_times)
    x = rng.randrange(space.n_states)
    return space, k, x


# -- tensor ----------------------------------------------------------------


def prop_tensor_characterization(rng: random.Random) -> bool:
    """pair-restriction pushforward of the glued tensor is the product measure."""
    space, k, x = _pin_split(rng)
    past = gen.random_pinned(space, Interval(0, k), k, x, rng)
    fut = gen.random_pinned(space, Interval(k, space.last), k, x, rng)
    glued = tensor_at(past, fut)
    image = pushforward(glued, pair_restriction(k))
    return (
        dict(image.items()) == dict(product(past.measure, fut.measure).items())
        and check_characterization(past, fut, glued)
        and tensor_via_pullback(past, fut).to_path_measure() == glued
    )


def prop_bilinearity(rng: random.Random) -> bool:
    space, k, x = _pin_split(rng)
    mirrored = rng.random() < 0.5
    fam_iv, fix_iv = (Interval(k, space.last), Interval(0, k)) if mirrored else (Interval(0, k), Interval(k, space.last))
    n_members = rng.randint(1, 3)
    family = {y: gen.random_pinned(space, fam_iv, k, x, rng) for y in range(n_members)}
    weights = StateMeasure(zip(range(n_members), gen.random_weights(rng, n_members)))
    fixed = gen.random_pinned(space, fix_iv, k, x, rng)
    return check_bilinearity(family, weights, fixed, mirrored)


def prop_associativity(rng: random.Random) -> bool:
    space = gen.random_space(rng, 4, 5, min_times=3)
    t1 = rng.randrange(0, space.n_times - 1)
    t2 = rng.randrange(t1 + 1, space.n_times)
    x1, x2 = rng.randrange(space.n_states), rng.randrange(space.n_states)
    a = gen.random_pinned(space, Interval(0, t1), t1, x1, rng)
    b = gen.random_partial_measure(space, Interval(t1, t2), rng, {t1: x1, t2: x2})
    c = gen.random_pinned(space, Interval(t2, space.last), t2, x2, rng)
    return check_associativity(a, b, c)


def prop_composition(rng: random.Random) -> bool:
    """Pushforward commutes with the tensor for state relabellings and window shifts."""
    space = gen.random_space(rng, 4, 6, min_times=3)
    n = space.n_times
    if rng.random() < 0.5:
        lo = rng.randrange(0, n - 2)
        hi = rng.randrange(lo + 2, n)
        k = rng.randrange(lo + 1, hi)
        x = rng.randrange(space.n_states)
        perm = list(range(space.n_states))
        rng.shuffle(perm)
        g = lambda iv: state_relabel_map(iv, perm.__getitem__)  # noqa: E731
    else:
        width = rng.randrange(2, n)
        lo = rng.randrange(0, n - width)
        hi = lo + width
        k = rng.randrange(lo + 1, hi)
        x = rng.randrange(space.n_states)
        h = rng.randrange(-lo, n - hi)
        g = lambda iv: time_shift_map(iv, h, n)  # noqa: E731
    past = gen.random_pinned(space, Interval(lo, k), k, x, rng)
    fut = gen.random_pinned(space, Interval(k, hi), k, x, rng)
    return check_composition(past, fut, g(past.interval), g(fut.interval), g(Interval(lo, hi)))


# -- markov ----------------------------------------------------------------


def prop_marginal_preservation(rng: random.Random) -> bool:
    space = gen.random_space(rng, 3, 5)
    m = gen.random_measure(space, rng)
    for t in range(space.n_times):
        mt = markovianise_at(m, t)
        if any(marginal_at(mt, s) != marginal_at(m, s) for s in range(space.n_times)):
            return False
    return True


def prop_closed_form(rng: random.Random) -> bool:
    space = gen.random_space(rng, 3, 5)
    m = gen.random_measure(space, rng)
    t = rng.randrange(space.n_times)
    return markovianise_at(m, t, cross_check=False) == markovianise_closed_form(m, t)


def prop_idempotence(rng: random.Random) -> bool:
    space = gen.random_space(rng, 3, 5)
    m = gen.random_measure(space, rng)
    t = rng.randrange(space.n_times)
    once = markovianise_at(m, t)
    return markovianise_at(once, t) == once


def random_time_set(rng: random.Random, n_times: int, max_size: int = 3) -> Tuple[int, ...]:
    size = rng.randint(0, min(max_size, n_times))
    return tuple(rng.sample(range(n_times), size))


def prop_order_independence(rng: random.Random) -> bool:
    space = gen.random_space(rng, 3, 5)
    m = gen.random_mu_invariant(space, rng)
    F = random_time_set(rng, space.n_times)
    outs = {markovianise_set(m, perm) for perm in itertools.permutations(F)}
    return len(outs) == 1


def prop_hull_fixed_point(rng: random.Random) -> bool:
    space = gen.random_space(rng, 3, 6)
    m = gen.random_measure(space, rng)
    limit, trace = run_hull(m, SubsetOrdering.sweep(space.n_times), monitor=False)
    return (
        trace.converged
        and all(d == 0 for d in trace.records[-1].defects)
        and limit == chain_product_oracle(m)
        and verify_hull_element(limit, m).passes
    )


def prop_ordering_audit(rng: random.Random) -> bool:
    space = gen.random_space(rng, 3, 5)
    m = gen.random_measure(space, rng)
    return audit_orderings(m, n_orderings=5, seed=rng.getrandbits(32)).all_agree


def prop_chain_is_markov(rng: random.Random) -> bool:
    space = gen.random_space(rng, 3, 5)
    m = gen.chain_measure(space, rng)
    return is_markov(m) and chain_product_oracle(m) == m


# -- invariance ------------------------------------------------------------

GROUPS: Dict[str, Callable[[], FiniteGroup]] = {
    "Z3": lambda: FiniteGroup.cyclic(3),
    "Z5": lambda: FiniteGroup.cyclic(5),
    "S3": FiniteGroup.symmetric3,
}


def _random_action(rng: random.Random) -> GroupAction:
    name = rng.choice(sorted(GROUPS))
    return GroupAction(GROUPS[name](), rng.choice(("left", "right")))


def _invariant_case(rng: random.Random, max_times: int = 4):
    action = _random_action(rng)
    n_times = rng.randint(2, max_times)
    m = gen.group_invariant(action.group, n_times, rng, action.side)
    return action, m


def prop_group_average(rng: random.Random) -> bool:
    action, _ = _invariant_case(rng)
    space = action.group.path_space(rng.randint(2, 4))
    rho = gen.random_measure(space, rng, (1, 3))
    avg = group_average(rho, action)
    return is_translation_invariant(avg, action) and group_average(avg, action) == avg


def prop_markov_preserves_invariance(rng: random.Random) -> bool:
    action, m = _invariant_case(rng)
    t = rng.randrange(m.space.n_times)
    if not check_markov_preserves_invariance(m, t, action):
        return False
    invariant_disintegration(markovianise_at(m, t), t, action)
    return True


def prop_translation_commutes(rng: random.Random) -> bool:
    action = _random_action(rng)
    space = action.group.path_space(rng.randint(2, 4))
    m = gen.random_measure(space, rng, (1, 3))
    t = rng.randrange(space.n_times)
    return check_translation_commutes(m, t, action, rng.randrange(action.group.order))


def prop_invariant_disintegration(rng: random.Random) -> bool:
    action, m = _invariant_case(rng)
    for t in range(m.space.n_times):
        invariant_disintegration(m, t, action)
    return True


SUITES: Dict[str, Dict[str, Property]] = {
    "tensor": {
        "characterization": prop_tensor_characterization,
        "bilinearity": prop_bilinearity,
        "associativity": prop_associativity,
        "composition": prop_composition,
    },
    "markov": {
        "marginal_preservation": prop_marginal_preservation,
        "closed_form": prop_closed_form,
        "idempotence": prop_idempotence,
        "order_independence": prop_order_independence,
        "hull_fixed_point": prop_hull_fixed_point,
        "ordering_audit": prop_ordering_audit,
        "chain_is_markov": prop_chain_is_markov,
    },
    "invariance": {
        "group_average": prop_group_average,
        "markov_preserves_invariance": prop_markov_preserves_invariance,
        "translation_commutes": prop_translation_commutes,
        "invariant_disintegration": prop_invariant_disintegration,
    },
}


def case_rng(seed: int, name: str, i: int) -> random.Random:
    return random.Random(f"{seed}:{name}:{i}")


@dataclass
class PropertyResult:
    name: str
    cases: int
    failures: List[Dict[str, object]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def run_property(name: str, prop: Property, cases: int, seed: int) -> PropertyResult:
    result = PropertyResult(name, cases)
    for i in range(cases):
        try:
            ok = prop(case_rng(seed, name, i))
            err = None
        except Exception as exc:  # a crash on a valid instance is a failure, not an abort
            ok, err = False, f"{type(exc).__name__}: {exc}"
        if not ok:
            result.failures.append({"case": i, "error": err})
    return result


def _run_one(args: Tuple[str, str, int, int]) -> PropertyResult:
    suite, name, cases, seed = args
    return run_property(name, SUITES[suite][name], cases, seed)


def run_suite(suite: str, cases: int, seed: int, workers: Optional[int] = None) -> List[PropertyResult]:
    """Run every property of ``suite`` (or of all suites for ``"all"``).

    Properties are independent, so ``workers > 1`` spreads them over processes;
    results come back in the fixed suite order either way.
    """
    if cases < 1:
        raise ValueError("need at least one case per property")
    names = sorted(SUITES) if suite == "all" else [suite]
    if any(n not in SUITES for n in names):
        raise ValueError(f"unknown suite {suite!r}")
    jobs = [(s, p, cases, seed) for s in names for p in SUITES[s]]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_one, jobs))
    return [_run_one(j) for j in jobs]


def report_json(suite: str, cases: int, seed: int, results: List[PropertyResult]) -> dict:
    return {
        "suite": suite,
        "cases": cases,
        "seed": seed,
        "passed": all(r.passed for r in results),
        "properties": {
            r.name: {"cases": r.cases, "passed": r.passed, "failures": r.failures} for r in results
        },
    }
