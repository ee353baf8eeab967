"""Line-oriented UTF-8 file formats shared by the CLI.

Three kinds of files, all with ``#`` comments and whitespace-delimited
tokens:

* factored-set files: ``set N``, optional ``labels``, ``factor NAME {...}``
  lines defining the factorization, ``partition NAME {...}`` lines naming
  extra partitions for queries, and optional ``map S -> W`` lines turning
  the file into a model of some observation space;
* database files: ``omega N``, ``labels``, ``partition`` lines, and
  ``orthogonal A B | C`` / ``dependent A B | C`` assertions;
* distribution files: one ``weights NAME p/q p/q ...`` line per factor.

Loading validates as it parses; errors carry file, line, and token.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Mapping

from .factored import FactoredSet
from .inference import Model, OrthogonalityDatabase
from .partitions import (
    GroundSet,
    Partition,
    ValidationError,
    format_partition,
    parse_partition,
)
from .probability import FactoredDistribution


class ParseError(ValueError):
    def __init__(self, path: str, lineno: int, message: str, token: str | None = None):
        detail = f"{path}:{lineno}: {message}"
        if token is not None:
            detail += f" (at {token!r})"
        super().__init__(detail)
        self.path = path
        self.lineno = lineno
        self.token = token


def _meaningful_lines(text: str) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


@dataclass(frozen=True)
class FactoredSetFile:
    """A parsed factored-set file: the set, name bindings, and an optional map."""

    fs: FactoredSet
    factor_names: tuple[str, ...]  # aligned with fs.factors
    partitions: Mapping[str, Partition]  # factors and extra named partitions
    map_pairs: tuple[tuple[str, str], ...] | None

    def resolve(self, name: str) -> Partition:
        if name == "_":
            return Partition.indiscrete(self.fs.ground)
        if name == "!":
            return Partition.discrete(self.fs.ground)
        try:
            return self.partitions[name]
        except KeyError:
            raise ValidationError(f"unknown partition name {name!r}") from None

    def name_of_factor(self, index: int) -> str:
        return self.factor_names[index]


def load_factored_set_file(path: str | Path) -> FactoredSetFile:
    path = Path(path)
    return parse_factored_set_text(path.read_text(encoding="utf-8"), str(path))


def parse_factored_set_text(text: str, origin: str = "<string>") -> FactoredSetFile:
    ground: GroundSet | None = None
    body_started = False
    factor_decls: list[tuple[str, Partition, int]] = []
    named: dict[str, Partition] = {}
    map_pairs: list[tuple[str, str]] = []

    for lineno, line in _meaningful_lines(text):
        tokens = line.split()
        keyword = tokens[0]
        try:
            if keyword == "set":
                if ground is not None:
                    raise ParseError(origin, lineno, "duplicate 'set' line")
                if len(tokens) != 2 or not tokens[1].isdigit():
                    raise ParseError(origin, lineno, "'set' expects one count", tokens[-1])
                ground = GroundSet(int(tokens[1]))
            elif keyword == "labels":
                if ground is None:
                    raise ParseError(origin, lineno, "'labels' must follow 'set'")
                if ground.labels is not None or body_started:
                    raise ParseError(
                        origin, lineno,
                        "'labels' may appear once, before any partitions",
                    )
                ground = GroundSet(ground.n, tuple(tokens[1:]))
            elif keyword in ("factor", "partition"):
                if ground is None:
                    raise ParseError(origin, lineno, "'set N' must come first")
                body_started = True
                if len(tokens) < 3:
                    raise ParseError(origin, lineno, f"'{keyword}' expects a name and blocks")
                name = tokens[1]
                if name in ("_", "!"):
                    raise ParseError(origin, lineno, f"{name!r} is reserved", name)
                if name in named:
                    raise ParseError(origin, lineno, f"duplicate partition name {name!r}", name)
                part = parse_partition(line.split(None, 2)[2], ground)
                named[name] = part
                if keyword == "factor":
                    factor_decls.append((name, part, lineno))
            elif keyword == "map":
                if ground is None:
                    raise ParseError(origin, lineno, "'set N' must come first")
                body_started = True
                if len(tokens) != 4 or tokens[2] != "->":
                    raise ParseError(origin, lineno, "'map' expects 'map FROM -> TO'")
                map_pairs.append((tokens[1], tokens[3]))
            else:
                raise ParseError(origin, lineno, f"unknown keyword {keyword!r}", keyword)
        except ValidationError as exc:
            raise ParseError(origin, lineno, str(exc)) from None

    if ground is None:
        raise ParseError(origin, 1, "missing 'set N' line")
    return _assemble_factored_file(origin, ground, factor_decls, named, map_pairs)


def _assemble_factored_file(
    origin: str,
    ground: GroundSet,
    factor_decls: list[tuple[str, Partition, int]],
    named: dict[str, Partition],
    map_pairs: list[tuple[str, str]],
) -> FactoredSetFile:
    by_part: dict[Partition, str] = {}
    for name, part, lineno in factor_decls:
        if part in by_part:
            raise ParseError(
                origin, lineno, f"factor {name!r} duplicates factor {by_part[part]!r}"
            )
        by_part[part] = name
    try:
        fs = FactoredSet(ground, [p for _, p, _ in factor_decls])
    except ValidationError as exc:
        raise ParseError(origin, 1, f"invalid factorization: {exc}") from None
    factor_names = tuple(by_part[p] for p in fs.factors)
    return FactoredSetFile(
        fs=fs,
        factor_names=factor_names,
        partitions=named,
        map_pairs=tuple(map_pairs) if map_pairs else None,
    )


def resolve_model(fsf: FactoredSetFile, omega: GroundSet) -> Model:
    """Bind a factored-set file to an observation space.

    Explicit ``map`` lines win; otherwise elements are matched by shared
    labels, or by index when the sizes agree and either side lacks labels.
    """
    fs = fsf.fs
    if fsf.map_pairs is not None:
        targets: dict[int, int] = {}
        for s_tok, w_tok in fsf.map_pairs:
            s = fs.ground.index_of(s_tok)
            if s in targets:
                raise ValidationError(f"element {s_tok!r} mapped twice")
            targets[s] = omega.index_of(w_tok)
        missing = [s for s in range(fs.size) if s not in targets]
        if missing:
            raise ValidationError(
                f"map does not cover element {fs.ground.label(missing[0])!r}"
            )
        labeling = tuple(targets[s] for s in range(fs.size))
    elif fs.ground.labels is not None and omega.labels is not None:
        labeling = tuple(
            omega.index_of(fs.ground.label(s)) for s in range(fs.size)
        )
    elif fs.size == omega.n:
        labeling = tuple(range(fs.size))
    else:
        raise ValidationError(
            "no map lines, and sizes differ so identity labeling is impossible"
        )
    return Model(fs, labeling, omega)


def load_database_file(path: str | Path) -> OrthogonalityDatabase:
    path = Path(path)
    return parse_database_text(path.read_text(encoding="utf-8"), str(path))


def parse_database_text(text: str, origin: str = "<string>") -> OrthogonalityDatabase:
    omega: GroundSet | None = None
    n: int | None = None
    named: dict[str, Partition] = {}
    orthogonal_triples: set[tuple[str, str, str]] = set()
    dependent_triples: set[tuple[str, str, str]] = set()

    lines = list(_meaningful_lines(text))
    for lineno, line in lines:
        tokens = line.split()
        if tokens[0] == "omega":
            if n is not None:
                raise ParseError(origin, lineno, "duplicate 'omega' line")
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise ParseError(origin, lineno, "'omega' expects one count", tokens[-1])
            n = int(tokens[1])
            omega = GroundSet(n)
        elif tokens[0] == "labels":
            if n is None:
                raise ParseError(origin, lineno, "'labels' must follow 'omega'")
            try:
                omega = GroundSet(n, tuple(tokens[1:]))
            except ValidationError as exc:
                raise ParseError(origin, lineno, str(exc)) from None
    if omega is None:
        raise ParseError(origin, 1, "missing 'omega N' line")

    for lineno, line in lines:
        tokens = line.split()
        keyword = tokens[0]
        try:
            if keyword in ("omega", "labels"):
                continue
            if keyword == "partition":
                if len(tokens) < 3:
                    raise ParseError(origin, lineno, "'partition' expects a name and blocks")
                name = tokens[1]
                if name in ("_", "!"):
                    raise ParseError(origin, lineno, f"{name!r} is reserved", name)
                if name in named:
                    raise ParseError(origin, lineno, f"duplicate partition name {name!r}", name)
                part = parse_partition(line.split(None, 2)[2], omega)
                if not part.is_full:
                    raise ParseError(
                        origin, lineno, f"partition {name!r} must cover all elements"
                    )
                named[name] = part
            elif keyword in ("orthogonal", "dependent"):
                rest = tokens[1:]
                if len(rest) != 4 or rest[2] != "|":
                    raise ParseError(
                        origin, lineno, f"'{keyword}' expects 'A B | C'"
                    )
                triple = (rest[0], rest[1], rest[3])
                for name in triple:
                    if name not in named and name not in ("_", "!"):
                        raise ParseError(
                            origin, lineno, f"unknown partition name {name!r}", name
                        )
                if keyword == "orthogonal":
                    orthogonal_triples.add(triple)
                else:
                    dependent_triples.add(triple)
            else:
                raise ParseError(origin, lineno, f"unknown keyword {keyword!r}", keyword)
        except ValidationError as exc:
            raise ParseError(origin, lineno, str(exc)) from None

    return OrthogonalityDatabase(
        omega=omega,
        partitions=named,
        orthogonal_triples=frozenset(orthogonal_triples),
        dependent_triples=frozenset(dependent_triples),
    )


def load_distribution_file(path: str | Path, fsf: FactoredSetFile) -> FactoredDistribution:
    path = Path(path)
    return parse_distribution_text(path.read_text(encoding="utf-8"), fsf, str(path))


def parse_distribution_text(
    text: str, fsf: FactoredSetFile, origin: str = "<string>"
) -> FactoredDistribution:
    fs = fsf.fs
    index = {name: j for j, name in enumerate(fsf.factor_names)}
    rows: dict[int, tuple[Fraction, ...]] = {}
    for lineno, line in _meaningful_lines(text):
        tokens = line.split()
        if tokens[0] != "weights":
            raise ParseError(origin, lineno, f"unknown keyword {tokens[0]!r}", tokens[0])
        if len(tokens) < 3:
            raise ParseError(origin, lineno, "'weights' expects a factor name and fractions")
        name = tokens[1]
        if name not in index:
            raise ParseError(origin, lineno, f"unknown factor name {name!r}", name)
        j = index[name]
        if j in rows:
            raise ParseError(origin, lineno, f"duplicate weights for factor {name!r}", name)
        try:
            rows[j] = tuple(Fraction(tok) for tok in tokens[2:])
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(origin, lineno, f"bad fraction: {exc}") from None
    missing = [fsf.factor_names[j] for j in range(fs.dim) if j not in rows]
    if missing:
        raise ParseError(origin, 1, f"missing weights for factor {missing[0]!r}")
    try:
        return FactoredDistribution(fs, tuple(rows[j] for j in range(fs.dim)))
    except ValidationError as exc:
        raise ParseError(origin, 1, str(exc)) from None


# -- canonical emitters ------------------------------------------------------


def format_factored_set_file(fsf: FactoredSetFile) -> str:
    fs = fsf.fs
    lines = [f"set {fs.size}"]
    if fs.ground.labels is not None:
        lines.append("labels " + " ".join(fs.ground.labels))
    for name, part in zip(fsf.factor_names, fs.factors):
        lines.append(f"factor {name} {format_partition(part)}")
    factor_set = set(fs.factors)
    for name in sorted(fsf.partitions):
        part = fsf.partitions[name]
        if name in fsf.factor_names and part in factor_set:
            continue
        lines.append(f"partition {name} {format_partition(part)}")
    if fsf.map_pairs is not None:
        for s_tok, w_tok in fsf.map_pairs:
            lines.append(f"map {s_tok} -> {w_tok}")
    return "\n".join(lines) + "\n"


def format_database_file(db: OrthogonalityDatabase) -> str:
    lines = [f"omega {db.omega.n}"]
    if db.omega.labels is not None:
        lines.append("labels " + " ".join(db.omega.labels))
    for name in sorted(db.partitions):
        lines.append(f"partition {name} {format_partition(db.partitions[name])}")
    for a, b, c in sorted(db.orthogonal_triples):
        lines.append(f"orthogonal {a} {b} | {c}")
    for a, b, c in sorted(db.dependent_triples):
        lines.append(f"dependent {a} {b} | {c}")
    return "\n".join(lines) + "\n"
