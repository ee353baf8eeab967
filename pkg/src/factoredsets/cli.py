"""Command-line surface.

Every command emits a human-readable report by default; ``--format
structured`` prints a deterministic JSON payload instead (no timing inside,
so identical argv, files and seed give byte-identical output).  Exit codes:
0 success / affirmative, 1 negative verdict on a yes-no query, 2 input
error.

Temporal-inference output always carries its search bound; the unbounded
question is not decided here, so an unqualified "holds" is never printed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path
from typing import Sequence

from . import agency, inference, probability, structure
from .factored import count_factorizations, enumerate_factorizations
from .fileformat import (
    FactoredSetFile,
    ParseError,
    load_database_file,
    load_distribution_file,
    load_factored_set_file,
    resolve_model,
)
from .partitions import ValidationError, format_partition, iter_partitions
from .polynomial import (
    characteristic_polynomial,
    format_polynomial,
    irreducible_components,
)
from .probability import DEFAULT_SEED, fundamental_theorem_check


class _Failure(Exception):
    """Input-level failure: message printed to stderr, exit code 2."""


def _digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def _load_ffs(path: str) -> FactoredSetFile:
    try:
        return load_factored_set_file(path)
    except FileNotFoundError:
        raise _Failure(f"no such file: {path}") from None


def _load_db(path: str):
    try:
        return load_database_file(path)
    except FileNotFoundError:
        raise _Failure(f"no such file: {path}") from None


def _event(fsf: FactoredSetFile, text: str) -> frozenset[int]:
    return frozenset(fsf.fs.ground.index_of(tok) for tok in text.split())


def _factor_names_of_mask(fsf: FactoredSetFile, mask: int) -> list[str]:
    return [fsf.factor_names[j] for j in fsf.fs.mask_indices(mask)]


# -- subcommand handlers -----------------------------------------------------
# Each returns (exit_code, results_payload, human_lines).


def _cmd_count_fact(args) -> tuple[int, dict, list[str]]:
    count = count_factorizations(args.n)
    return 0, {"n": args.n, "count": count}, [str(count)]


def _cmd_enum_fact(args) -> tuple[int, dict, list[str]]:
    rendered = []
    for i, fs in enumerate(enumerate_factorizations(args.n)):
        if args.limit is not None and i >= args.limit:
            break
        rendered.append([format_partition(p) for p in fs.factors])
    lines = ["  ".join(factors) if factors else "(empty basis)" for factors in rendered]
    lines.append(f"{len(rendered)} factorization(s)")
    return 0, {"n": args.n, "factorizations": rendered}, lines


def _cmd_history(args) -> tuple[int, dict, list[str]]:
    fsf = _load_ffs(args.file)
    part = fsf.resolve(args.partition)
    mask = structure.history(fsf.fs, part)
    names = _factor_names_of_mask(fsf, mask)
    return 0, {"partition": args.partition, "history": names}, [
        "history(%s) = { %s }" % (args.partition, " ".join(names))
    ]


def _cmd_orth(args) -> tuple[int, dict, list[str]]:
    fsf = _load_ffs(args.file)
    fs = fsf.fs
    x = fsf.resolve(args.a)
    y = fsf.resolve(args.b)
    if args.given is not None and args.event is not None:
        raise _Failure("--given and --event are mutually exclusive")
    if args.given is not None:
        verdict = structure.cond_orthogonal(fs, x, y, fsf.resolve(args.given))
        query = {"kind": "conditional", "given": args.given}
    elif args.event is not None:
        verdict = structure.cond_orthogonal_given_subset(
            fs, x, y, _event(fsf, args.event)
        )
        query = {"kind": "given-event", "event": args.event}
    else:
        verdict = structure.orthogonal(fs, x, y)
        query = {"kind": "plain"}
    word = "orthogonal" if verdict else "entangled"
    return (0 if verdict else 1), {
        "a": args.a, "b": args.b, "query": query, "orthogonal": verdict,
    }, [word]


def _cmd_before(args) -> tuple[int, dict, list[str]]:
    fsf = _load_ffs(args.file)
    fs = fsf.fs
    x = fsf.resolve(args.a)
    y = fsf.resolve(args.b)
    if args.given_event is not None:
        verdict = structure.cond_before(fs, x, y, _event(fsf, args.given_event))
        line = f"{args.a} before {args.b} given event: {'yes' if verdict else 'no'}"
        return (0 if verdict else 1), {
            "a": args.a, "b": args.b, "given_event": args.given_event,
            "before": verdict,
        }, [line]
    verdict = structure.before(fs, x, y)
    payload = {
        "a": args.a,
        "b": args.b,
        "relation": verdict.relation.value,
        "history_a": _factor_names_of_mask(fsf, verdict.history_first),
        "history_b": _factor_names_of_mask(fsf, verdict.history_second),
    }
    return (0 if verdict.is_before else 1), payload, [verdict.relation.value]


def _cmd_poly(args) -> tuple[int, dict, list[str]]:
    fsf = _load_ffs(args.file)
    event = _event(fsf, args.event)
    names = fsf.factor_names
    poly = characteristic_polynomial(fsf.fs, event)
    lines = [format_polynomial(poly, names)]
    payload: dict = {"event": args.event, "polynomial": format_polynomial(poly, names)}
    if args.factor:
        if not event:
            raise _Failure("cannot factor the polynomial of an empty event")
        decomp = irreducible_components(fsf.fs, event)
        rendered = []
        for mask, factor in zip(decomp.components, decomp.factors):
            comp_names = _factor_names_of_mask(fsf, mask)
            rendered.append(
                {"component": comp_names, "factor": format_polynomial(factor, names)}
            )
            lines.append(
                "component { %s } : %s"
                % (" ".join(comp_names), format_polynomial(factor, names))
            )
        payload["irreducible"] = rendered
    return 0, payload, lines


def _cmd_prob(args) -> tuple[int, dict, list[str]]:
    fsf = _load_ffs(args.file)
    dist = load_distribution_file(args.dist, fsf)
    event = _event(fsf, args.event)
    p = probability.prob(fsf.fs, dist, event)
    return 0, {"event": args.event, "probability": str(p)}, [str(p)]


def _cmd_ft_verify(args) -> tuple[int, dict, list[str]]:
    import itertools
    import random

    rng = random.Random(args.seed)
    triples_checked = 0
    mismatches = 0
    missed_witnesses = 0
    for n in range(2, args.max_size + 1):
        for fs in enumerate_factorizations(n):
            parts = list(iter_partitions(fs.ground))
            space = list(itertools.product(parts, repeat=3))
            if args.sample is not None and len(space) > args.sample:
                space = rng.sample(space, args.sample)
            for x, y, z in space:
                report = fundamental_theorem_check(
                    fs, x, y, z, trials=args.trials,
                    seed=rng.randrange(1 << 30),
                )
                triples_checked += 1
                if not report.verdicts_agree:
                    mismatches += 1
                if not report.orthogonal and not report.witness_found:
                    missed_witnesses += 1
    ok = mismatches == 0
    lines = [
        f"triples checked: {triples_checked}",
        f"verdict mismatches: {mismatches}",
        f"dependent triples without sampled witness: {missed_witnesses}",
        "all three verdict routes agree" if ok else "DISAGREEMENT FOUND",
    ]
    payload = {
        "max_size": args.max_size,
        "trials": args.trials,
        "triples_checked": triples_checked,
        "mismatches": mismatches,
        "missed_witnesses": missed_witnesses,
        "agree": ok,
    }
    return (0 if ok else 1), payload, lines


def _cmd_check_model(args) -> tuple[int, dict, list[str]]:
    db = _load_db(args.db)
    fsf = _load_ffs(args.model)
    model = resolve_model(fsf, db.omega)
    report = inference.models_database(model, db)
    lines = []
    entries = []
    for entry in report.entries:
        a, b, c = entry.names
        status = "satisfied" if entry.ok else "VIOLATED"
        lines.append(f"{entry.kind} {a} {b} | {c} : {status}")
        entries.append(
            {"kind": entry.kind, "triple": list(entry.names), "ok": entry.ok}
        )
    lines.append("models database" if report.ok else "does not model database")
    return (0 if report.ok else 1), {"ok": report.ok, "entries": entries}, lines


def _bounds_from_args(args) -> inference.SearchBounds:
    return inference.SearchBounds(
        max_size=args.max_size,
        max_dim=args.max_dim,
        surjective_only=args.surjective,
        time_budget=args.time_budget,
    )


def _cmd_infer(args) -> tuple[int, dict, list[str]]:
    db = _load_db(args.db)
    first, second = args.before
    bounds = _bounds_from_args(args)
    verdict = inference.infer_before(
        db, first, second, bounds, strict=not args.non_strict
    )
    relation = "strictly-before" if verdict.strict else "before-or-equal"
    if verdict.kind == "holds-up-to-bound":
        line = (
            f"{relation} (holds for all {verdict.qualifier}; "
            f"{verdict.models_checked} models checked)"
        )
        code = 0
    elif verdict.kind == "refuted":
        size = verdict.counterexample.factored.size
        line = (
            f"refuted (a model of size {size} violates {relation}; "
            f"{verdict.models_checked} models checked within {verdict.qualifier})"
        )
        code = 1
    else:
        line = f"vacuous (no models found within {verdict.qualifier})"
        code = 1
    payload = {
        "before": [first, second],
        "strict": verdict.strict,
        "verdict": verdict.kind,
        "models_checked": verdict.models_checked,
        "bound": verdict.qualifier,
        "truncated": verdict.truncated,
    }
    return code, payload, [line]


def _cmd_consistent(args) -> tuple[int, dict, list[str]]:
    db = _load_db(args.db)
    bounds = _bounds_from_args(args)
    verdict = inference.is_consistent_up_to_bound(db, bounds)
    if verdict.consistent:
        size = verdict.witness.factored.size
        line = f"consistent (witness model of size {size} found)"
        code = 0
    else:
        line = f"no model found within {bounds.describe()}"
        if verdict.truncated:
            line += " (search truncated by time budget)"
        code = 1
    payload = {
        "consistent": verdict.consistent,
        "bound": bounds.describe(),
        "witness_size": verdict.witness.factored.size if verdict.witness else None,
        "truncated": verdict.truncated,
    }
    return code, payload, [line]


def _cmd_observes(args) -> tuple[int, dict, list[str]]:
    fsf = _load_ffs(args.file)
    fs = fsf.fs
    agent = fsf.resolve(args.agent)
    world = fsf.resolve(args.world)
    if (args.event is None) == (args.partition is None):
        raise _Failure("exactly one of --event and --partition is required")
    if args.event is not None:
        verdict = agency.observes_event(fs, agent, _event(fsf, args.event), world)
        outcome = "yes" if verdict else "no"
        payload = {"agent": args.agent, "event": args.event, "observes": verdict}
        return (0 if verdict else 1), payload, [outcome]
    target = fsf.resolve(args.partition)
    result = agency.observes_partition(fs, agent, target, world, budget=args.budget)
    lines = [result.outcome]
    witness = None
    if result.witness is not None:
        witness = [format_partition(p) for p in result.witness]
        for i, text in enumerate(witness):
            lines.append(f"subagent {i}: {text}")
    payload = {
        "agent": args.agent,
        "partition": args.partition,
        "outcome": result.outcome,
        "witness": witness,
    }
    return (0 if result.outcome == "yes" else 1), payload, lines


def _cmd_dump(args) -> tuple[int, dict, list[str]]:
    from .fileformat import format_database_file, format_factored_set_file

    try:
        head = Path(args.file).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise _Failure(f"no such file: {args.file}") from None
    keyword = next(
        (
            line.split()[0]
            for line in head.splitlines()
            if line.split("#", 1)[0].strip()
        ),
        "",
    )
    if keyword == "omega":
        text = format_database_file(_load_db(args.file))
    else:
        text = format_factored_set_file(_load_ffs(args.file))
    return 0, {"canonical": text}, [text.rstrip("\n")]


def _cmd_counterfactable(args) -> tuple[int, dict, list[str]]:
    fsf = _load_ffs(args.file)
    part = fsf.resolve(args.partition)
    if args.relative_to is not None:
        verdict = agency.relatively_counterfactable(
            fsf.fs, part, fsf.resolve(args.relative_to)
        )
        payload = {
            "partition": args.partition,
            "relative_to": args.relative_to,
            "counterfactable": verdict,
        }
    else:
        verdict = agency.counterfactable(fsf.fs, part)
        payload = {"partition": args.partition, "counterfactable": verdict}
    return (0 if verdict else 1), payload, ["yes" if verdict else "no"]


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="factoredsets",
        description="Factored-set queries, verification sweeps, and bounded temporal inference.",
    )
    parser.add_argument(
        "--format", choices=("text", "structured"), default="text",
        help="output format; 'structured' is deterministic JSON",
    )
    parser.add_argument(
        "--threads", type=int, default=1,
        help="worker hint (accepted for compatibility; evaluation is single-threaded)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count-fact", help="count the factorizations of an n-element set")
    p.add_argument("n", type=int)
    p.set_defaults(handler=_cmd_count_fact)

    p = sub.add_parser("enum-fact", help="list the factorizations of an n-element set")
    p.add_argument("n", type=int)
    p.add_argument("--limit", type=int, default=None)
    p.set_defaults(handler=_cmd_enum_fact)

    p = sub.add_parser("history", help="smallest factor set generating a partition")
    p.add_argument("file")
    p.add_argument("--partition", required=True)
    p.set_defaults(handler=_cmd_history)

    p = sub.add_parser("orth", help="orthogonality of two named partitions")
    p.add_argument("file")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--given", help="conditioning partition name")
    p.add_argument("--event", help="conditioning event, e.g. \"00 01\"")
    p.set_defaults(handler=_cmd_orth)

    p = sub.add_parser("before", help="temporal comparison of two named partitions")
    p.add_argument("file")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--given-event", dest="given_event")
    p.set_defaults(handler=_cmd_before)

    p = sub.add_parser("poly", help="characteristic polynomial of an event")
    p.add_argument("file")
    p.add_argument("--event", required=True)
    p.add_argument("--factor", action="store_true", help="factor into irreducibles")
    p.set_defaults(handler=_cmd_poly)

    p = sub.add_parser("prob", help="exact probability of an event under weights")
    p.add_argument("file")
    p.add_argument("dist")
    p.add_argument("--event", required=True)
    p.set_defaults(handler=_cmd_prob)

    p = sub.add_parser(
        "ft-verify",
        help="sweep orthogonality vs. polynomial identity vs. sampled independence",
    )
    p.add_argument("--max-size", type=int, default=4, dest="max_size")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument(
        "--sample", type=int, default=None,
        help="cap on partition triples per factorization (default: exhaustive)",
    )
    p.set_defaults(handler=_cmd_ft_verify)

    p = sub.add_parser("check-model", help="check a model file against a database")
    p.add_argument("--model", required=True)
    p.add_argument("--db", required=True)
    p.set_defaults(handler=_cmd_check_model)

    p = sub.add_parser("infer", help="temporal inference over all models within bounds")
    p.add_argument("--db", required=True)
    p.add_argument("--before", nargs=2, metavar=("A", "B"), required=True)
    p.add_argument("--max-size", type=int, required=True, dest="max_size")
    p.add_argument("--max-dim", type=int, default=None, dest="max_dim")
    p.add_argument("--surjective", action="store_true")
    p.add_argument("--time-budget", type=float, default=None, dest="time_budget")
    p.add_argument(
        "--non-strict", action="store_true",
        help="test history containment instead of strict containment",
    )
    p.set_defaults(handler=_cmd_infer)

    p = sub.add_parser("consistent", help="search for any model of a database")
    p.add_argument("--db", required=True)
    p.add_argument("--max-size", type=int, required=True, dest="max_size")
    p.add_argument("--max-dim", type=int, default=None, dest="max_dim")
    p.add_argument("--surjective", action="store_true")
    p.add_argument("--time-budget", type=float, default=None, dest="time_budget")
    p.set_defaults(handler=_cmd_consistent)

    p = sub.add_parser("observes", help="observation predicates for an agent partition")
    p.add_argument("file")
    p.add_argument("--agent", required=True)
    p.add_argument("--event")
    p.add_argument("--partition")
    p.add_argument("--world", required=True)
    p.add_argument("--budget", type=int, default=1_000_000)
    p.set_defaults(handler=_cmd_observes)

    p = sub.add_parser("counterfactable", help="counterfactability of a partition")
    p.add_argument("file")
    p.add_argument("partition")
    p.add_argument("--relative-to", dest="relative_to")
    p.set_defaults(handler=_cmd_counterfactable)

    p = sub.add_parser("dump", help="re-emit a file in canonical form")
    p.add_argument("file")
    p.set_defaults(handler=_cmd_dump)

    return parser


_INPUT_ARGS = ("file", "dist", "db", "model")


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        code, results, lines = args.handler(args)
    except (_Failure, ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    elapsed = time.perf_counter() - started

    inputs = {}
    for attr in _INPUT_ARGS:
        path = getattr(args, attr, None)
        if path is not None:
            try:
                inputs[path] = _digest(path)
            except OSError:
                inputs[path] = None

    if args.format == "structured":
        payload = {
            "command": argv,
            "inputs": inputs,
            "results": results,
        }
        seed = getattr(args, "seed", None)
        if seed is not None:
            payload["seed"] = seed
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        for line in lines:
            print(line)
        print(f"elapsed: {elapsed:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
