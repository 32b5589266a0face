"""Command-line front end: ``markovhull generate|markovianise|hull|check|info``.

Exit codes: 0 success, 1 input or contract error, 2 non-convergence (or a
hull limit that fails verification).
"""

from __future__ import annotations

import argparse
import logging
import random
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from . import generators as gen
from .checks import SUITES, report_json, run_suite
from .errors import ContractError, MarkovHullError
from .groups import FiniteGroup, GroupAction, is_translation_invariant
from .hull import SubsetOrdering, run_hull, verify_hull_element
from .io import dumps, dumps_measure, load_group, load_measure, parse_space_spec, write_atomic
from .markov import defect_profile, is_strong_markov, markovianise_set
from .measures import EXACT, MODES, PathMeasure
from .paths import enumeration_cap
from .rational import format_rational

log = logging.getLogger("markovhull")

EXIT_OK, EXIT_INPUT, EXIT_NONCONVERGED = 0, 1, 2
KINDS = ("random-mu-invariant", "group-invariant", "correlated-pair", "chain", "dirac", "random")
MAX_SEED = 2**64 - 1


@dataclass
class ExperimentConfig:
    space: Optional[str] = None
    input: Optional[str] = None
    kind: Optional[str] = None
    seed: int = 0
    mode: str = EXACT
    tol: Optional[float] = None
    ordering: str = "sweep"
    max_steps: int = 1000
    output: Optional[str] = None
    trace: Optional[str] = None
    report: Optional[str] = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ContractError(f"unknown mode {self.mode!r}")
        if self.tol is not None and self.tol < 0:
            raise ContractError("tolerance must be nonnegative")
        if self.mode == EXACT:
            self.tol = 0.0
        if not 0 <= self.seed <= MAX_SEED:
            raise ContractError("seed must be a 64-bit unsigned integer")
        if self.max_steps < 0:
            raise ContractError("max-steps must be nonnegative")

    @classmethod
    def from_args(cls, args: argparse.Namespace, **overrides) -> "ExperimentConfig":
        fields = {k: getattr(args, k) for k in cls.__dataclass_fields__ if getattr(args, k, None) is not None}
        fields.update(overrides)
        return cls(**fields)


def _fmt(w) -> str:
    return f"{w:.6g}" if isinstance(w, float) else format_rational(w)


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)


def _int_list(text: str) -> List[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError as exc:
        raise ContractError(f"expected a comma list of integers, got {text!r}") from exc


def _group(spec: str) -> FiniteGroup:
    if spec == "S3":
        return FiniteGroup.symmetric3()
    if spec.startswith("Z") and spec[1:].isdigit():
        n = int(spec[1:])
        if n < 2:
            raise ContractError("Z_n needs n >= 2")
        return FiniteGroup.cyclic(n)
    return load_group(spec)


def _load(args: argparse.Namespace) -> Tuple[PathMeasure, ExperimentConfig]:
    """Read ``--input``; the file's own mode applies unless ``--mode`` overrides it."""
    if not getattr(args, "input", None):
        raise ContractError("--input is required")
    m = load_measure(args.input)
    cfg = ExperimentConfig.from_args(args, mode=args.mode or m.mode)
    return (m.to_mode(cfg.mode) if cfg.mode != m.mode else m), cfg


def cmd_generate(args: argparse.Namespace) -> int:
    cfg = ExperimentConfig.from_args(args)
    rng = random.Random(cfg.seed)
    kind = cfg.kind
    if kind == "correlated-pair":
        m = gen.correlated_pair()
    elif kind == "group-invariant":
        group = _group(args.group)
        m = gen.group_invariant(group, args.times, rng, args.side)
        if not is_translation_invariant(m, GroupAction(group, args.side)):
            raise MarkovHullError("generated measure failed the invariance check")
    else:
        space = parse_space_spec(cfg.space or "2x3")
        if kind == "dirac":
            if args.path is None:
                raise ContractError("--path is required for kind=dirac")
            m = gen.dirac(space, _int_list(args.path))
        elif kind == "chain":
            m = gen.chain_measure(space, rng)
        elif kind == "random-mu-invariant":
            m = gen.random_mu_invariant(space, rng)
        else:
            m = gen.random_measure(space, rng)
    _emit(dumps_measure(m.to_mode(cfg.mode)), cfg.output)
    return EXIT_OK


def cmd_markovianise(args: argparse.Namespace) -> int:
    m, cfg = _load(args)
    pins = _int_list(args.pins or "")
    out = markovianise_set(m, pins)
    before, after = defect_profile(m), defect_profile(out)
    for t, (b, a) in enumerate(zip(before, after)):
        print(f"pin {t}: defect {_fmt(b)} -> {_fmt(a)}", file=sys.stderr)
    _emit(dumps_measure(out), cfg.output)
    return EXIT_OK


def cmd_hull(args: argparse.Namespace) -> int:
    m, cfg = _load(args)
    ordering = SubsetOrdering.parse(cfg.ordering, m.space.n_times)
    limit, trace = run_hull(m, ordering, cfg.tol, cfg.max_steps)
    report = verify_hull_element(limit, m, cfg.tol)
    payload = report.to_json()
    payload.update({"converged": trace.converged, "steps": trace.steps, "ordering": list(ordering.sequence)})
    if cfg.trace:
        write_atomic(cfg.trace, trace.to_csv())
    if cfg.report:
        write_atomic(cfg.report, dumps(payload))
    _emit(dumps_measure(limit), cfg.output)
    print(
        f"steps={trace.steps} converged={trace.converged} strong_markov={report.strong_markov}",
        file=sys.stderr,
    )
    if not trace.converged:
        return EXIT_NONCONVERGED
    return EXIT_OK if report.passes else EXIT_NONCONVERGED


def cmd_check(args: argparse.Namespace) -> int:
    cfg = ExperimentConfig.from_args(args)
    if args.cases < 1:
        raise ContractError("--cases must be at least 1")
    if cfg.input:
        load_measure(cfg.input)  # fixtures must parse before anything runs
    results = run_suite(args.suite, args.cases, cfg.seed, args.workers)
    payload = report_json(args.suite, args.cases, cfg.seed, results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} ({r.cases} cases)", file=sys.stderr)
    _emit(dumps(payload), cfg.report)
    return EXIT_OK if payload["passed"] else EXIT_INPUT


def cmd_info(args: argparse.Namespace) -> int:
    info: dict = {"enumeration_cap": enumeration_cap()}
    if args.input:
        m, cfg = _load(args)
        space = m.space
        info.update(
            {
                "mode": m.mode,
                "atoms": len(m),
                "mass": _fmt(m.total_mass()),
                "defects": [_fmt(d) for d in defect_profile(m)],
                "strong_markov": is_strong_markov(m),
            }
        )
    elif args.space:
        cfg = ExperimentConfig.from_args(args)
        space = parse_space_spec(args.space)
    else:
        raise ContractError("info needs --input or --space")
    info.update(
        {
            "states": list(space.states.labels),
            "times": space.n_times,
            "cyclic": space.cyclic,
            "raw_paths": space.raw_count(),
        }
    )
    _emit(dumps(info), cfg.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="markovhull", description="Markovianisation experiments on finite path spaces.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser, output: bool = True) -> None:
        sp.add_argument("--mode", choices=MODES, help="arithmetic mode (default: exact, or the input file's mode)")
        sp.add_argument("--seed", type=int, default=0)
        if output:
            sp.add_argument("--output", help="output file (stdout if omitted)")

    g = sub.add_parser("generate", help="write an example measure")
    common(g)
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--space", help="'<states>x<times>[:cyclic]' or a space JSON file")
    g.add_argument("--path", help="comma list of state indices (kind=dirac)")
    g.add_argument("--group", default="Z3", help="Z<n>, S3 or a group JSON file")
    g.add_argument("--side", choices=("left", "right"), default="left")
    g.add_argument("--times", type=int, default=3, help="grid length for kind=group-invariant")
    g.set_defaults(func=cmd_generate)

    mk = sub.add_parser("markovianise", help="apply M_F for a list of pins")
    common(mk)
    mk.add_argument("--input", required=True)
    mk.add_argument("--pins", default="", help="comma list of grid indices")
    mk.set_defaults(func=cmd_markovianise)

    h = sub.add_parser("hull", help="iterate Markovianisation to the hull limit")
    common(h)
    h.add_argument("--input", required=True)
    h.add_argument("--ordering", default="sweep", help="comma list, 'sweep' or 'random:<seed>'")
    h.add_argument("--tol", type=float, help="defect tolerance (ignored in exact mode; float default 1e-12)")
    h.add_argument("--max-steps", dest="max_steps", type=int, default=1000)
    h.add_argument("--trace", help="trace CSV path")
    h.add_argument("--report", help="verification report JSON path")
    h.set_defaults(func=cmd_hull)

    c = sub.add_parser("check", help="run randomized property suites")
    common(c, output=False)
    c.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    c.add_argument("--cases", type=int, default=20)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--input", help="fixture file to validate before running")
    c.add_argument("--report", help="JSON report path (stdout if omitted)")
    c.set_defaults(func=cmd_check)

    i = sub.add_parser("info", help="describe a space or a measure file")
    common(i)
    i.add_argument("--input")
    i.add_argument("--space")
    i.set_defaults(func=cmd_info)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (MarkovHullError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
