"""Experiment manifests, result records and the class-construction registry.

A manifest is a small YAML document (see ``docs/manifest.md``) naming a class
construction with its parameters, the horizon M, learner and adversary
choices, seeds and budgets. Everything a run does is derived from it, so the
same manifest and seed reproduce identical CSV bodies.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Callable, Optional, Sequence

import yaml

from .core import Generator
from .tokens import Bits, all_strings, strings_up_to


class ConfigError(ValueError):
    """Malformed manifest or unknown registry name (CLI exit code 2)."""


# --------------------------------------------------------------------------
# records


@dataclass
class ResultRecord:
    experiment: str
    metric: str
    value: float
    lo: Optional[float] = None
    hi: Optional[float] = None
    claim: str = ""
    note: str = ""

    FIELDS = ("experiment", "metric", "value", "lo", "hi", "passed", "claim", "note")

    @property
    def passed(self) -> bool:
        if self.value is None or (isinstance(self.value, float) and math.isnan(self.value)):
            return False
        if self.lo is not None and self.value < self.lo:
            return False
        if self.hi is not None and self.value > self.hi:
            return False
        return True

    def window(self) -> str:
        lo = "-inf" if self.lo is None else _fmt(self.lo)
        hi = "inf" if self.hi is None else _fmt(self.hi)
        return f"[{lo}, {hi}]"

    def row(self) -> dict:
        d = asdict(self)
        d["passed"] = int(self.passed)
        return {k: _fmt(d[k]) for k in self.FIELDS}

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.note})" if self.note else ""
        return f"{status}  {self.claim or self.experiment}: {self.metric} = {_fmt(self.value)} in {self.window()}{extra}"


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        if v.is_integer() and abs(v) < 1e15:
            return str(int(v))
        return f"{v:.10g}"
    return str(v)


def exact(experiment: str, metric: str, value, target, claim: str, note: str = "") -> ResultRecord:
    return ResultRecord(experiment, metric, value, target, target, claim, note)


def at_most(experiment: str, metric: str, value, bound, claim: str, note: str = "") -> ResultRecord:
    return ResultRecord(experiment, metric, value, None, bound, claim, note)


def at_least(experiment: str, metric: str, value, bound, claim: str, note: str = "") -> ResultRecord:
    return ResultRecord(experiment, metric, value, bound, None, claim, note)


def records_csv(records: Sequence[ResultRecord]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=ResultRecord.FIELDS, lineterminator="\r\n")
    w.writeheader()
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


# --------------------------------------------------------------------------
# manifests


@dataclass
class Budgets:
    max_class_size: int = 4096
    max_pool: int = 256
    max_depth: int = 16
    max_nodes: int = 2_000_000
    time_s: float = 600.0


@dataclass
class ClassSpec:
    name: str
    params: dict = field(default_factory=dict)
    seed: int = 0


@dataclass
class ExperimentManifest:
    kind: str
    id: str = "run"
    cls: Optional[ClassSpec] = None
    M: int = 1
    mode: str = "e2e"
    learner: str = "minimax"
    adversary: str = "exhaustive"
    horizon: Optional[int] = None
    seeds: list = field(default_factory=lambda: [0])
    claim: str = "all"
    dims: list = field(default_factory=lambda: ["base", "cot", "e2e", "vc"])
    options: dict = field(default_factory=dict)
    budgets: Budgets = field(default_factory=Budgets)
    out: str = "out"

    KINDS = ("dims", "game", "verify", "stochastic")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentManifest":
        if not isinstance(d, dict):
            raise ConfigError("manifest must be a mapping")
        d = dict(d)
        known = {f.name for f in fields(cls)} | {"class"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown manifest keys: {sorted(unknown)}")
        if d.get("kind") not in cls.KINDS:
            raise ConfigError(f"kind must be one of {cls.KINDS}, got {d.get('kind')!r}")
        c = d.pop("class", None) or d.pop("cls", None)
        if c is not None:
            if isinstance(c, str):
                c = {"name": c}
            try:
                d["cls"] = ClassSpec(**c)
            except TypeError as e:
                raise ConfigError(f"bad class section: {e}") from None
        if "budgets" in d:
            try:
                d["budgets"] = Budgets(**(d["budgets"] or {}))
            except TypeError as e:
                raise ConfigError(f"bad budgets section: {e}") from None
        if "seeds" in d and not isinstance(d["seeds"], list):
            d["seeds"] = [d["seeds"]]
        return cls(**d)

    @classmethod
    def load(cls, path: str) -> "ExperimentManifest":
        try:
            with open(path, encoding="utf-8") as fh:
                data = yaml.safe_load(fh)
        except (OSError, yaml.YAMLError) as e:
            raise ConfigError(f"cannot read manifest {path}: {e}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["class"] = d.pop("cls")
        return d

    def with_seed(self, seed: int) -> "ExperimentManifest":
        return replace(self, seeds=[seed], cls=replace(self.cls, seed=seed) if self.cls else None)

    def snapshot(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# --------------------------------------------------------------------------
# class registry


@dataclass
class ClassBundle:
    generators: list[Generator]
    pool: list[Bits]
    M: Optional[int] = None
    meta: dict = field(default_factory=dict)


def _taxonomy(params: dict, seed: int, M: int) -> ClassBundle:
    from .classes import taxonomy as tax

    s_values = list(params.get("s_values", [256, 300]))
    p = tax.TaxonomyParams(tax.RateFunction(M0=int(params.get("M0", 256))), s_max=max(s_values))
    gens = tax.taxonomy_window(p, s_values)
    pool = taxonomy_pool(p, s_values)
    return ClassBundle(gens, pool, M, {"params": p, "s_values": s_values})


def taxonomy_pool(p, s_values: Sequence[int]) -> list[Bits]:
    """Special points, bucket points on both sides of K_s, and baseline-form strings."""
    from .classes import taxonomy as tax

    out: list[Bits] = []
    for s in s_values:
        K = p.K(s)
        for i in range(0, K.stop + 1):
            out.append(tax.bucket_instance(s, i))
        for k in K:
            head = Bits.pattern((0, s), (1, 1), (0, k), (1, 1), (0, s - k - 1))
            for j in range(p.rate(s)):
                out.append(head + Bits.zeros(j))
    return list(dict.fromkeys(out))


def _alternating(params: dict, seed: int, M: int) -> ClassBundle:
    from .classes import alternating as alt

    base = alt.AlternatingParams(m_max=int(params.get("m_max", 3)), n_max=int(params.get("n_max", 3)))
    count = params.get("members")
    alphas = list(alt.all_alphas(base))
    if count is not None and int(count) < len(alphas):
        from . import rng

        g = rng.generator(seed, rng.stream_tag("alternating-sample"))
        pick = sorted(g.choice(len(alphas), size=int(count), replace=False))
        alphas = [alphas[i] for i in pick]
    gens = [alt.alternating_member(a) for a in alphas]
    return ClassBundle(gens, alt.special_instances(base), M, {"params": base})


def _random(params: dict, seed: int, M: int) -> ClassBundle:
    from .random_classes import RandomClassConfig, random_class

    cfg = RandomClassConfig(
        max_members=int(params.get("max_members", 10)),
        max_pool=int(params.get("max_pool", 5)),
        max_len=int(params.get("max_len", 3)),
        M=M,
    )
    gens, pool = random_class(seed, cfg)
    return ClassBundle(gens, pool, M, {"config": cfg})


def _cube(params: dict, seed: int, M: int) -> ClassBundle:
    """Every labelling of the strings of length n, as table generators (M = 1)."""
    n = int(params.get("n", 3))
    length = int(params.get("length", max(1, math.ceil(math.log2(max(n, 1))) + 1)))
    pool = strings_up_to(length)[:n]
    gens = []
    for mask in range(2**n):
        table = {x: (mask >> j) & 1 for j, x in enumerate(pool)}
        gens.append(Generator.from_table(table, f"cube{mask}"))
    return ClassBundle(gens, pool, 1, {"n": n})


def _linear(params: dict, seed: int, M: int) -> ClassBundle:
    from .classes.linear import ltf_representatives

    d = int(params.get("d", 3))
    reps = ltf_representatives(d, int(params.get("weight_bound", 3)))
    pool = [z + "10" for z in all_strings(d)] if params.get("latch_pool", True) else all_strings(d)
    return ClassBundle([g.generator() for g in reps], pool, M, {"d": d, "linear": reps})


def _hard(params: dict, seed: int, M: int) -> ClassBundle:
    from .classes.hard import HardClassParams, hard_class_sample, x_j

    hp = HardClassParams(
        d=int(params.get("d", 1)),
        M=int(params.get("M", M or 4)),
        N=int(params["N"]) if "N" in params else None,
        seed=seed,
    )
    sample = hard_class_sample(hp)
    limit = params.get("members")
    gens = sample.generators(None if limit is None else int(limit))
    pool = [x_j(j, hp.M) for j in range(1, int(params.get("walks", 2)) + 1)]
    return ClassBundle(gens, pool, hp.M, {"params": hp, "sample": sample})


def _glue(params: dict, seed: int, M: int) -> ClassBundle:
    from .classes.glue import GluePart, glue_classes, support_length

    parts_cfg = params.get("parts", [{"n": 2}, {"n": 2}])
    parts, pool, shift = [], [], 0
    for cfg in parts_cfg:
        b = _cube(cfg, seed, 1)
        parts.append(GluePart(tuple(b.generators), shift))
        pool += [Bits.zeros(shift) + x for x in b.pool]
        shift += support_length(b.generators) + 1
    return ClassBundle(glue_classes(parts), pool, 1, {"parts": parts})


CLASS_REGISTRY: dict[str, Callable[[dict, int, int], ClassBundle]] = {
    "taxonomy": _taxonomy,
    "alternating": _alternating,
    "random": _random,
    "cube": _cube,
    "linear": _linear,
    "hard": _hard,
    "glue": _glue,
}


def build_class(spec: ClassSpec, M: int, budgets: Budgets = Budgets()) -> ClassBundle:
    if spec.name not in CLASS_REGISTRY:
        raise ConfigError(f"unknown class {spec.name!r}; known: {sorted(CLASS_REGISTRY)}")
    try:
        bundle = CLASS_REGISTRY[spec.name](dict(spec.params or {}), int(spec.seed), M)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"cannot build class {spec.name!r}: {e}") from None
    if len(bundle.generators) > budgets.max_class_size and spec.name != "hard":
        raise ConfigError(f"class size {len(bundle.generators)} exceeds max_class_size {budgets.max_class_size}")
    if len(bundle.pool) > budgets.max_pool:
        raise ConfigError(f"pool size {len(bundle.pool)} exceeds max_pool {budgets.max_pool}")
    return bundle
