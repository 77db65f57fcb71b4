"""Declarative run configuration: parsing, validation and canonical rendering.

Grammar (line oriented; ``#`` at the start of a line or after whitespace
begins a comment)::

    [parameters]
    name = v1, v2, ...

    [simulations]
    sem: graph = random_forward           # or graph = path/to/graph.txt

    [algorithms]
    pc: test = fisher_z
    cpc: test = fisher_z, initial = ges(score = sem_bic)
    external_native: dir = results_dir_name

    [statistics]
    AP weight=1.0
    SHD
    param:sampleSize

    [options]
    sortByUtility = true
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any

from .graphcore import GraphKind
from .harness import ComparisonConfig, ParameterColumn, SimSpec
from .metrics import STATISTICS
from .oracle import ScoreId, ScoreSpec, TestId, TestSpec
from .search import AlgorithmId, AlgorithmVariant
from .simulation import DEFAULTS, Parameters, SimulationStyle, format_value, parse_value

SECTIONS = ("parameters", "simulations", "algorithms", "statistics", "options")
RANDOM_FORWARD = "random_forward"
_COMMENT = re.compile(r"(^|\s)#.*$")

_OPTIONS = {
    "showAlgorithmIndices": "show_algorithm_indices",
    "showSimulationIndices": "show_simulation_indices",
    "sortByUtility": "sort_by_utility",
    "showUtilities": "show_utilities",
    "tabDelimited": "tab_delimited",
    "comparisonGraph": "comparison_override",
    "masterSeed": "master_seed",
}


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class AlgorithmSpec:
    """One ``[algorithms]`` entry, before grid expansion."""

    id: AlgorithmId
    test: TestId | None = None
    score: ScoreId | None = None
    tuning: dict[str, Any] = field(default_factory=dict)
    initial: "AlgorithmSpec | None" = None
    dir: str | None = None
    comparison: GraphKind | None = None

    def to_variant(self, results_root=None) -> AlgorithmVariant:
        kw = {}
        if self.comparison is not None:
            kw["comparison_kind"] = self.comparison
        return AlgorithmVariant(
            self.id,
            test=TestSpec(self.test) if self.test else None,
            score=ScoreSpec(self.score) if self.score else None,
            tuning=dict(self.tuning),
            initial=self.initial.to_variant(results_root) if self.initial else None,
            external_dir=self.dir,
            results_root=results_root,
            **kw,
        )

    def render(self) -> str:
        parts = []
        if self.test:
            parts.append(f"test = {self.test.value}")
        if self.score:
            parts.append(f"score = {self.score.value}")
        if self.dir:
            parts.append(f"dir = {self.dir}")
        if self.comparison:
            parts.append(f"comparison = {self.comparison.value}")
        parts += [f"{k} = {format_value(v)}" for k, v in self.tuning.items()]
        if self.initial:
            parts.append(f"initial = {self.initial.render_inline()}")
        return self.id.value + (": " + ", ".join(parts) if parts else "")

    def render_inline(self) -> str:
        text = self.render()
        if ": " not in text:
            return text
        head, rest = text.split(": ", 1)
        return f"{head}({rest})"


@dataclass
class RunConfig:
    parameters: Parameters = field(default_factory=Parameters)
    simulations: list[SimSpec] = field(default_factory=list)
    algorithms: list[AlgorithmSpec] = field(default_factory=list)
    statistics: list[str | ParameterColumn] = field(default_factory=list)
    weights: dict[str, float] = field(default_factory=dict)
    options: ComparisonConfig = field(default_factory=ComparisonConfig)

    def variants(self, results_root=None) -> list[AlgorithmVariant]:
        return [a.to_variant(results_root) for a in self.algorithms]


# -- parsing ----------------------------------------------------------------------


def _split_top(text: str, line: int) -> list[str]:
    """Split on commas that are not inside parentheses."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ConfigError("unbalanced ')'", line)
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ConfigError("unbalanced '('", line)
    out.append("".join(cur).strip())
    if any(not p for p in out):
        raise ConfigError(f"empty item in {text!r}", line)
    return out


def _enum(kind, value: str, what: str, line: int):
    try:
        return kind(value)
    except ValueError:
        known = ", ".join(k.value for k in kind)
        raise ConfigError(f"unknown {what} {value!r} (known: {known})", line) from None


def _parse_algorithm(text: str, line: int) -> AlgorithmSpec:
    m = re.fullmatch(r"\s*(\w+)\s*(?:\((.*)\)|:(.*))?\s*", text, re.S)
    if not m:
        raise ConfigError(f"cannot parse algorithm {text!r}", line)
    spec = AlgorithmSpec(_enum(AlgorithmId, m.group(1), "algorithm", line))
    body = m.group(2) if m.group(2) is not None else m.group(3)
    if body is not None and body.strip():
        for item in _split_top(body, line):
            if "=" not in item:
                raise ConfigError(f"expected key = value, got {item!r}", line)
            key, value = (s.strip() for s in item.split("=", 1))
            if key == "test":
                spec.test = _enum(TestId, value, "test", line)
            elif key == "score":
                spec.score = _enum(ScoreId, value, "score", line)
            elif key == "initial":
                spec.initial = _parse_algorithm(value, line)
            elif key == "dir":
                spec.dir = value
            elif key == "comparison":
                spec.comparison = _enum(GraphKind, value, "comparison graph", line)
            elif key in DEFAULTS:
                spec.tuning[key] = parse_value(value)
            else:
                raise ConfigError(f"unknown algorithm key {key!r}", line)
    try:
        variant = spec.to_variant()
        unused = set(spec.tuning) - set(variant.parameters())
        if unused:
            raise ConfigError(f"{spec.id.value} does not use {sorted(unused)}", line)
        _ = variant.data_type
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc), line) from None
    return spec


def _parse_bool(value: str, line: int) -> bool:
    if value.lower() in ("true", "yes", "1"):
        return True
    if value.lower() in ("false", "no", "0"):
        return False
    raise ConfigError(f"expected true or false, got {value!r}", line)


def parse_config(text: str) -> RunConfig:
    cfg = RunConfig()
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _COMMENT.sub("", raw).strip()
        if not line or line.startswith("#"):
            continue
        m = re.fullmatch(r"\[(.*)\]", line)
        if m:
            section = m.group(1).strip()
            if section not in SECTIONS:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if section is None:
            raise ConfigError("content before the first [section]", lineno)

        if section == "parameters":
            if "=" not in line:
                raise ConfigError(f"expected name = values, got {line!r}", lineno)
            name, values = (s.strip() for s in line.split("=", 1))
            if name not in DEFAULTS:
                raise ConfigError(f"unknown parameter {name!r}", lineno)
            cfg.parameters.set(name, *[parse_value(v) for v in _split_top(values, lineno)])

        elif section == "simulations":
            head, _, rest = line.partition(":")
            style = _enum(SimulationStyle, head.strip(), "simulation style", lineno)
            graph = None
            if rest.strip():
                for item in _split_top(rest, lineno):
                    key, eq, value = (s.strip() for s in item.partition("="))
                    if key != "graph" or not eq:
                        raise ConfigError(f"unknown simulation key {key!r}", lineno)
                    graph = None if value == RANDOM_FORWARD else value
            cfg.simulations.append(SimSpec(style, graph))

        elif section == "algorithms":
            cfg.algorithms.append(_parse_algorithm(line, lineno))

        elif section == "statistics":
            parts = line.split()
            name = parts[0]
            if name == "U":
                raise ConfigError("no statistic may be named U (the utility column)", lineno)
            if name.startswith("param:"):
                pname = name[len("param:"):]
                if not pname:
                    raise ConfigError("empty parameter column name", lineno)
                stat = ParameterColumn(pname)
                if len(parts) > 1:
                    raise ConfigError("parameter columns take no weight", lineno)
            elif name in STATISTICS:
                stat = name
            else:
                raise ConfigError(f"unknown statistic {name!r}", lineno)
            if stat in cfg.statistics:
                raise ConfigError(f"statistic {name} listed twice", lineno)
            cfg.statistics.append(stat)
            for extra in parts[1:]:
                key, eq, value = extra.partition("=")
                if key != "weight" or not eq:
                    raise ConfigError(f"unknown statistic option {extra!r}", lineno)
                try:
                    w = float(value)
                except ValueError:
                    raise ConfigError(f"bad weight {value!r}", lineno) from None
                if not 0 <= w <= 1:
                    raise ConfigError(f"weight must lie in [0, 1], got {w}", lineno)
                cfg.weights[name] = w

        else:  # options
            key, eq, value = (s.strip() for s in line.partition("="))
            if not eq or key not in _OPTIONS:
                raise ConfigError(f"unknown option {key!r}", lineno)
            if key == "comparisonGraph":
                setattr(cfg.options, _OPTIONS[key], _enum(GraphKind, value, "comparison graph", lineno))
            elif key == "masterSeed":
                try:
                    cfg.options.master_seed = int(value)
                except ValueError:
                    raise ConfigError(f"masterSeed must be an integer, got {value!r}", lineno) from None
            else:
                setattr(cfg.options, _OPTIONS[key], _parse_bool(value, lineno))
    return cfg


# -- rendering --------------------------------------------------------------------


def render_canonical(cfg: RunConfig) -> str:
    """Text that parses back to an equal :class:`RunConfig`."""
    out = ["[parameters]"]
    p = cfg.parameters
    out += [f"{n} = " + ", ".join(format_value(v) for v in p.values(n)) for n in p.explicit()]
    out += ["", "[simulations]"]
    out += [f"{s.style.value}: graph = {s.graph_file or RANDOM_FORWARD}" for s in cfg.simulations]
    out += ["", "[algorithms]"]
    out += [a.render() for a in cfg.algorithms]
    out += ["", "[statistics]"]
    for s in cfg.statistics:
        name = str(s)
        out.append(f"{name} weight={cfg.weights[name]!r}" if name in cfg.weights else name)
    out += ["", "[options]"]
    o = cfg.options
    for key, attr in _OPTIONS.items():
        v = getattr(o, attr)
        if key == "masterSeed":
            out.append(f"masterSeed = {v}")
        elif key == "comparisonGraph":
            if v is not None:
                out.append(f"comparisonGraph = {v.value}")
        else:
            out.append(f"{key} = {'true' if v else 'false'}")
    return "\n".join(out) + "\n"
