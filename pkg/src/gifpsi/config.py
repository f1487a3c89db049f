"""JSON run configuration: schema validation, reference resolution, defaults.

Every problem found is reported as ``"<path>: <constraint>"`` and all of them
are collected before :class:`~gifpsi.errors.ConfigError` is raised, so one
pass over a broken file lists everything that needs fixing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import CircleOp, FuzzyConnectives, PsiFunction, TConorm, TNorm
from .compactness import Ball, FiniteSet
from .continuity import ALPHA_GRID, COMPONENTWISE, EPS_GRID, MapSpec
from .core import GifPsiNorm, VectorSpaceConfig
from .corpus import get_sequence, map_corpus, set_corpus
from .errors import ConfigError, DomainError
from .reports import SamplerConfig
from .sequences import (DEFAULT_R_GRID, DEFAULT_R_SEARCH_GRID, DEFAULT_T_GRID,
                        DEFAULT_T_SEARCH_GRID, SequenceSpec)

SCHEMA_VERSION = 1
TASK_KINDS = ("validate-axioms", "alpha-norm", "analyze-sequence", "check-continuity",
              "check-compact")
TOP_LEVEL = ("schema_version", "space", "connectives", "norm", "sampler", "sequences", "maps",
             "sets", "tasks", "output")
CORPUS_PREFIX = "corpus:"


@dataclass
class TaskSpec:
    id: str
    kind: str
    params: dict


@dataclass
class RunConfig:
    schema_version: int
    norm: GifPsiNorm
    sampler: SamplerConfig
    sequences: dict[str, SequenceSpec]
    maps: dict[str, MapSpec]
    sets: dict[str, object]
    tasks: list[TaskSpec]
    output: str | None
    echo: dict = field(default_factory=dict)

    @property
    def space(self) -> VectorSpaceConfig:
        return self.norm.space


class _Diag:
    def __init__(self):
        self.items: list[str] = []

    def add(self, path: str, msg: str):
        self.items.append(f"{path}: {msg}")

    def number(self, obj: dict, key: str, path: str, default=None, positive=False,
               required=False, integer=False):
        if key not in obj:
            if required:
                self.add(path, "required")
            return default
        v = obj[key]
        ok = isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)
        if integer:
            ok = ok and float(v).is_integer()
        if not ok:
            self.add(path, "must be an integer" if integer else "must be a finite number")
            return default
        if positive and not v > 0:
            self.add(path, "must be > 0")
            return default
        return int(v) if integer else float(v)

    def vector(self, v, path: str, dim: int | None):
        try:
            a = np.asarray(v, float)
        except (TypeError, ValueError):
            self.add(path, "must be a list of numbers")
            return None
        if a.ndim != 1 or (dim is not None and a.size != dim) or not np.all(np.isfinite(a)):
            self.add(path, f"must be a list of {dim} finite numbers" if dim else
                     "must be a list of finite numbers")
            return None
        return a

    def matrix(self, v, path: str, cols: int | None = None):
        try:
            a = np.asarray(v, float)
        except (TypeError, ValueError):
            self.add(path, "must be a list of equal-length number lists")
            return None
        if a.ndim != 2 or (cols is not None and a.shape[1] != cols) or not np.all(np.isfinite(a)):
            self.add(path, "must be a list of equal-length number lists"
                     + (f" of length {cols}" if cols else ""))
            return None
        return a

    def grid(self, obj, key, path, default, lo=None, hi=None, open_unit=False):
        if key not in obj:
            return tuple(default)
        v = obj[key]
        if not isinstance(v, list) or not v or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
            self.add(path, "must be a nonempty list of numbers")
            return tuple(default)
        if open_unit and not all(0 < x < 1 for x in v):
            self.add(path, "values must lie in open (0,1)")
        elif lo is not None and not all(x > lo for x in v):
            self.add(path, f"values must be > {lo:g}")
        return tuple(float(x) for x in v)


def _unknown_keys(diag: _Diag, obj: dict, allowed, path: str):
    for k in obj:
        if k not in allowed:
            diag.add(f"{path}.{k}" if path else k, "unknown field")


def _obj(diag: _Diag, raw, key: str, required=False) -> dict:
    if key not in raw:
        if required:
            diag.add(key, "required")
        return {}
    v = raw[key]
    if not isinstance(v, dict):
        diag.add(key, "must be an object")
        return {}
    return v


# ---------------------------------------------------------------- sections


def _space(diag: _Diag, raw) -> tuple[VectorSpaceConfig | None, dict]:
    obj = _obj(diag, raw, "space", required=True)
    _unknown_keys(diag, obj, ("dimension", "crisp_norm", "p"), "space")
    dim = diag.number(obj, "dimension", "space.dimension", required="space" in raw, integer=True)
    if dim is not None and dim < 1:
        diag.add("space.dimension", "must be >= 1")
        dim = None
    crisp = obj.get("crisp_norm", "p")
    if crisp not in ("p", "max"):
        diag.add("space.crisp_norm", "must be one of ['p', 'max']")
        crisp = "p"
    p = diag.number(obj, "p", "space.p", default=2.0)
    if p is not None and p < 1:
        diag.add("space.p", "must be >= 1")
        p = None
    echo = {"dimension": dim, "crisp_norm": crisp}
    if crisp == "p":
        echo["p"] = p
    if dim is None or p is None:
        return None, echo
    return VectorSpaceConfig(dim, crisp, p), echo


def _kind_spec(v, path, diag):
    if isinstance(v, str):
        return v, {}
    if isinstance(v, dict) and isinstance(v.get("kind"), str):
        return v["kind"], {k: x for k, x in v.items() if k != "kind"}
    diag.add(path, "must be a kind name or an object with a 'kind' field")
    return None, {}


def _connectives(diag: _Diag, raw) -> tuple[FuzzyConnectives | None, dict]:
    obj = _obj(diag, raw, "connectives")
    _unknown_keys(diag, obj, ("tnorm", "tconorm", "circle", "psi"), "connectives")
    made = {}
    try_build = [
        ("tnorm", "minimum", lambda k, a: TNorm(k), TNorm._builtins),
        ("tconorm", "maximum", lambda k, a: TConorm(k), TConorm._builtins),
        ("circle", "add", lambda k, a: CircleOp(k, n=a.get("n", 1)), ("add", "max", "power-mean")),
        ("psi", "abs", lambda k, a: PsiFunction(k, p=a.get("p", 1.0), n=a.get("n", 1)),
         ("abs", "abs-power", "rational-example")),
    ]
    for key, default, build, allowed in try_build:
        kind, args = _kind_spec(obj.get(key, default), f"connectives.{key}", diag)
        if kind is None:
            continue
        if kind not in allowed:
            diag.add(f"connectives.{key}", f"must be one of {list(allowed)}")
            continue
        try:
            made[key] = build(kind, args)
        except DomainError as exc:
            diag.add(f"connectives.{key}", str(exc))
    if len(made) < 4:
        return None, {}
    c = FuzzyConnectives(**made)
    return c, c.describe()


def _sampler(diag: _Diag, raw, seed_override) -> tuple[SamplerConfig | None, dict]:
    obj = _obj(diag, raw, "sampler")
    if "seed" not in obj and seed_override is None:
        diag.add("sampler.seed", "required")
    allowed = ("seed", "samples", "tolerance", "horizon", "horizon_eps",
               "psi_zero_threshold", "psi_inf_threshold")
    _unknown_keys(diag, obj, allowed, "sampler")
    values = {k: obj[k] for k in allowed if k in obj}
    if seed_override is not None:
        values["seed"] = seed_override
    if "seed" not in values:
        return None, {}
    try:
        s = SamplerConfig(**values)
    except ConfigError as exc:
        diag.items.extend(exc.diagnostics)
        return None, {}
    return s, {k: getattr(s, k) for k in allowed}


def _norm(diag: _Diag, raw, space, conn) -> tuple[GifPsiNorm | None, dict]:
    obj = _obj(diag, raw, "norm")
    _unknown_keys(diag, obj, ("kind", "k"), "norm")
    kind = obj.get("kind", "standard")
    if kind != "standard":
        diag.add("norm.kind", "must be 'standard' (custom norms are library-only)")
    k = diag.number(obj, "k", "norm.k", default=1.0, positive=True)
    if space is None or conn is None or k is None:
        return None, {"kind": "standard", "k": k}
    return GifPsiNorm(space, conn, "standard", k), {"kind": "standard", "k": k}


def _sequence(diag: _Diag, v, path, dim):
    if isinstance(v, str) and v.startswith(CORPUS_PREFIX):
        try:
            spec = get_sequence(v[len(CORPUS_PREFIX):]).spec
        except DomainError:
            diag.add(path, f"unknown corpus sequence {v!r}")
            return None, v
        if dim is not None and spec.dimension != dim:
            diag.add(path, f"corpus sequence has dimension {spec.dimension}, space has {dim}")
            return None, v
        return spec, v
    if not isinstance(v, dict):
        diag.add(path, "must be an object or 'corpus:<name>'")
        return None, v
    kind = v.get("kind")
    fields_by_kind = {
        "affine-decay": ("base", "direction"),
        "geometric": ("base", "direction", "q"),
        "power": ("base", "direction", "exponent"),
        "oscillating": ("even_base", "even_direction", "odd_base", "odd_direction"),
        "trigonometric": ("center", "amplitude", "decay", "frequency", "phase"),
        "explicit": ("terms",),
    }
    if kind not in fields_by_kind:
        diag.add(f"{path}.kind", f"must be one of {list(fields_by_kind)}")
        return None, v
    allowed = fields_by_kind[kind]
    _unknown_keys(diag, v, ("kind", "name") + allowed, path)
    optional = {"decay", "frequency", "phase"}
    args = {}
    for f in allowed:
        fpath = f"{path}.{f}"
        if f not in v:
            if f not in optional:
                diag.add(fpath, "required")
            continue
        if f in ("q", "exponent"):
            args[f] = diag.number(v, f, fpath)
        elif f == "terms":
            args[f] = diag.matrix(v[f], fpath, dim)
        else:
            args[f] = diag.vector(v[f], fpath, dim)
    if any(a is None for a in args.values()) or any(
            f not in args for f in allowed if f not in optional):
        return None, v
    name = v.get("name", path.split(".")[-1])
    if kind == "explicit" and args["terms"].shape[0] < 10:
        diag.add(f"{path}.terms", "must hold at least 10 terms")
        return None, v
    build = {"affine-decay": SequenceSpec.affine_decay, "geometric": SequenceSpec.geometric,
             "power": SequenceSpec.power, "oscillating": SequenceSpec.oscillating,
             "trigonometric": SequenceSpec.trigonometric, "explicit": SequenceSpec.explicit}[kind]
    return build(**args, name=name), v


def _map(diag: _Diag, v, path, dim):
    if isinstance(v, str) and v.startswith(CORPUS_PREFIX):
        maps = map_corpus(dim or 2)
        key = v[len(CORPUS_PREFIX):]
        if key not in maps:
            diag.add(path, f"unknown corpus map {v!r}")
            return None, v
        return maps[key], v
    if not isinstance(v, dict):
        diag.add(path, "must be an object or 'corpus:<name>'")
        return None, v
    kind = v.get("kind")
    name = v.get("name", path.split(".")[-1])
    if kind == "linear":
        _unknown_keys(diag, v, ("kind", "name", "matrix"), path)
        A = diag.matrix(v.get("matrix"), f"{path}.matrix", dim)
        if A is not None and A.shape[0] != dim:
            diag.add(f"{path}.matrix", f"must be {dim}x{dim}")
            return None, v
        return (MapSpec.linear(A, name=name) if A is not None else None), v
    if kind == "affine":
        _unknown_keys(diag, v, ("kind", "name", "matrix", "offset"), path)
        A = diag.matrix(v.get("matrix"), f"{path}.matrix", dim)
        b = diag.vector(v.get("offset"), f"{path}.offset", dim)
        if A is not None and A.shape[0] != dim:
            diag.add(f"{path}.matrix", f"must be {dim}x{dim}")
            return None, v
        return (MapSpec.affine(A, b, name=name) if A is not None and b is not None else None), v
    if kind == "componentwise":
        _unknown_keys(diag, v, ("kind", "name", "function", "c"), path)
        fn = v.get("function")
        if fn not in COMPONENTWISE:
            diag.add(f"{path}.function", f"must be one of {list(COMPONENTWISE)}")
            return None, v
        c = diag.number(v, "c", f"{path}.c", default=1.0)
        return MapSpec.componentwise(fn, dim, c if c is not None else 1.0, name=name), v
    diag.add(f"{path}.kind", "must be one of ['linear', 'affine', 'componentwise']")
    return None, v


def _set(diag: _Diag, v, path, dim):
    if isinstance(v, str) and v.startswith(CORPUS_PREFIX):
        sets = set_corpus(dim or 2)
        key = v[len(CORPUS_PREFIX):]
        if key not in sets:
            diag.add(path, f"unknown corpus set {v!r}")
            return None, v
        return sets[key], v
    if not isinstance(v, dict):
        diag.add(path, "must be an object or 'corpus:<name>'")
        return None, v
    kind = v.get("kind")
    if kind == "ball":
        _unknown_keys(diag, v, ("kind", "center", "radius", "closed"), path)
        c = diag.vector(v.get("center"), f"{path}.center", dim)
        r = diag.number(v, "radius", f"{path}.radius", required=True, positive=True)
        closed = v.get("closed", True)
        if not isinstance(closed, bool):
            diag.add(f"{path}.closed", "must be a boolean")
            return None, v
        return (Ball(c, r, closed) if c is not None and r is not None else None), v
    if kind == "finite":
        _unknown_keys(diag, v, ("kind", "points"), path)
        P = diag.matrix(v.get("points"), f"{path}.points", dim)
        return (FiniteSet(P) if P is not None else None), v
    diag.add(f"{path}.kind", "must be one of ['ball', 'finite']")
    return None, v


def _entities(diag: _Diag, raw, key, build, dim):
    obj = _obj(diag, raw, key)
    out, echo = {}, {}
    for name, v in obj.items():
        made, e = build(diag, v, f"{key}.{name}", dim)
        echo[name] = e
        if made is not None:
            out[name] = made
    return out, echo


# ---------------------------------------------------------------- tasks


def _ref(diag, t, key, path, table, label, required=True):
    if key not in t:
        if required:
            diag.add(f"{path}.{key}", "required")
        return None
    v = t[key]
    if not isinstance(v, str) or v not in table:
        diag.add(f"{path}.{key}", f"unknown {label} {v!r}")
        return None
    return v


def _refs(diag, t, key, path, table, label, required=False):
    if key not in t:
        if required:
            diag.add(f"{path}.{key}", "required")
        return None
    v = t[key]
    if not isinstance(v, list) or (required and not v):
        diag.add(f"{path}.{key}", f"must be a {'nonempty ' if required else ''}list of {label} ids")
        return None
    for i, x in enumerate(v):
        if not isinstance(x, str) or x not in table:
            diag.add(f"{path}.{key}[{i}]", f"unknown {label} {x!r}")
    return list(v)


TASK_FIELDS = {
    "validate-axioms": ("extra_conditions",),
    "alpha-norm": ("alpha", "variant", "vectors", "alpha_grid", "crisp_axioms", "collinearity"),
    "analyze-sequence": ("sequence", "limit", "horizon", "r_grid", "t_grid", "p_max",
                         "t_search_grid", "r_search_grid", "subsequence", "reconstruct", "basis"),
    "check-continuity": ("map", "x0", "family", "eps_grid", "alpha_grid", "horizon",
                         "r_grid", "t_grid", "samples"),
    "check-compact": ("set", "probes", "map", "horizon"),
}


def _task(diag: _Diag, t, i, dim, seqs, maps, sets) -> TaskSpec | None:
    path = f"tasks[{i}]"
    if not isinstance(t, dict):
        diag.add(path, "must be an object")
        return None
    kind = t.get("kind")
    if kind not in TASK_KINDS:
        diag.add(f"{path}.kind", f"must be one of {list(TASK_KINDS)}")
        return None
    tid = t.get("id", f"{kind}-{i}")
    if not isinstance(tid, str):
        diag.add(f"{path}.id", "must be a string")
        tid = f"{kind}-{i}"
    _unknown_keys(diag, t, ("kind", "id") + TASK_FIELDS[kind], path)
    p: dict = {}
    n_before = len(diag.items)

    def flag(key, default):
        v = t.get(key, default)
        if not isinstance(v, bool):
            diag.add(f"{path}.{key}", "must be a boolean")
        return v

    def horizon(default=1000):
        h = diag.number(t, "horizon", f"{path}.horizon", default=default, integer=True)
        if h is not None and h < 10:
            diag.add(f"{path}.horizon", "must be >= 10")
        return h

    if kind == "validate-axioms":
        p["extra_conditions"] = flag("extra_conditions", False)
    elif kind == "alpha-norm":
        a = diag.number(t, "alpha", f"{path}.alpha", required=True)
        if a is not None and not 0 < a < 1:
            diag.add(f"{path}.alpha", "must lie in open (0,1)")
        p["alpha"] = a
        variant = t.get("variant", "mu")
        if variant not in ("mu", "nu"):
            diag.add(f"{path}.variant", "must be one of ['mu', 'nu']")
        p["variant"] = variant
        vecs = t.get("vectors")
        p["vectors"] = (np.eye(dim).tolist() if dim else None) if vecs is None else vecs
        if vecs is not None:
            m = diag.matrix(vecs, f"{path}.vectors", dim)
            p["vectors"] = m.tolist() if m is not None else None
        p["alpha_grid"] = diag.grid(t, "alpha_grid", f"{path}.alpha_grid",
                                    [round(0.05 * j, 2) for j in range(1, 20)], open_unit=True)
        p["crisp_axioms"] = flag("crisp_axioms", True)
        col = t.get("collinearity")
        if col is not None:
            m = diag.matrix(col, f"{path}.collinearity", dim)
            col = m.tolist() if m is not None else None
        p["collinearity"] = col
    elif kind == "analyze-sequence":
        p["sequence"] = _ref(diag, t, "sequence", path, seqs, "sequence")
        p["limit"] = None
        if "limit" in t:
            lim = diag.vector(t["limit"], f"{path}.limit", dim)
            p["limit"] = lim.tolist() if lim is not None else None
        p["horizon"] = horizon()
        p["r_grid"] = diag.grid(t, "r_grid", f"{path}.r_grid", DEFAULT_R_GRID, open_unit=True)
        p["t_grid"] = diag.grid(t, "t_grid", f"{path}.t_grid", DEFAULT_T_GRID, lo=0)
        p["p_max"] = diag.number(t, "p_max", f"{path}.p_max", integer=True)
        if p["p_max"] is not None and p["p_max"] < 1:
            diag.add(f"{path}.p_max", "must be >= 1")
        p["t_search_grid"] = diag.grid(t, "t_search_grid", f"{path}.t_search_grid",
                                       DEFAULT_T_SEARCH_GRID, lo=0)
        p["r_search_grid"] = diag.grid(t, "r_search_grid", f"{path}.r_search_grid",
                                       DEFAULT_R_SEARCH_GRID, open_unit=True)
        p["subsequence"] = flag("subsequence", False)
        p["reconstruct"] = flag("reconstruct", False)
        p["basis"] = None
        if "basis" in t:
            B = diag.matrix(t["basis"], f"{path}.basis", dim)
            p["basis"] = B.tolist() if B is not None else None
    elif kind == "check-continuity":
        p["map"] = _ref(diag, t, "map", path, maps, "map")
        x0 = diag.vector(t.get("x0", [0.0] * (dim or 0)), f"{path}.x0", dim)
        p["x0"] = x0.tolist() if x0 is not None else None
        p["family"] = _refs(diag, t, "family", path, seqs, "sequence")
        p["eps_grid"] = diag.grid(t, "eps_grid", f"{path}.eps_grid", EPS_GRID, lo=0)
        p["alpha_grid"] = diag.grid(t, "alpha_grid", f"{path}.alpha_grid", ALPHA_GRID,
                                    open_unit=True)
        p["r_grid"] = diag.grid(t, "r_grid", f"{path}.r_grid", DEFAULT_R_GRID, open_unit=True)
        p["t_grid"] = diag.grid(t, "t_grid", f"{path}.t_grid", DEFAULT_T_GRID, lo=0)
        p["horizon"] = horizon()
        p["samples"] = diag.number(t, "samples", f"{path}.samples", default=2000, integer=True)
        if p["samples"] is not None and p["samples"] < 1:
            diag.add(f"{path}.samples", "must be >= 1")
    else:
        p["set"] = _ref(diag, t, "set", path, sets, "set")
        p["probes"] = _refs(diag, t, "probes", path, seqs, "sequence", required=True)
        p["map"] = _ref(diag, t, "map", path, maps, "map", required=False)
        p["horizon"] = horizon()
    if len(diag.items) > n_before:
        return None
    return TaskSpec(tid, kind, p)


# ---------------------------------------------------------------- entry points


def validate_config(raw, seed_override: int | None = None) -> RunConfig:
    """Validate a parsed config; raises :class:`ConfigError` listing every problem."""
    diag = _Diag()
    if not isinstance(raw, dict):
        raise ConfigError(["<root>: must be an object"])
    _unknown_keys(diag, raw, TOP_LEVEL, "")
    version = raw.get("schema_version")
    if version is None:
        diag.add("schema_version", "required")
    elif version != SCHEMA_VERSION:
        diag.add("schema_version", f"must be {SCHEMA_VERSION}")
    if seed_override is not None and (not isinstance(seed_override, int)
                                      or isinstance(seed_override, bool)):
        diag.add("--seed-override", "must be an integer")
        seed_override = None

    space, space_echo = _space(diag, raw)
    conn, conn_echo = _connectives(diag, raw)
    norm, norm_echo = _norm(diag, raw, space, conn)
    sampler, sampler_echo = _sampler(diag, raw, seed_override)
    dim = space.dimension if space else None
    seqs, seq_echo = _entities(diag, raw, "sequences", _sequence, dim)
    maps, map_echo = _entities(diag, raw, "maps", _map, dim)
    sets, set_echo = _entities(diag, raw, "sets", _set, dim)

    tasks = []
    raw_tasks = raw.get("tasks", [])
    if not isinstance(raw_tasks, list):
        diag.add("tasks", "must be a list")
        raw_tasks = []
    # references to entities that failed validation are reported once, at the entity
    known_seqs = set(seqs) | set(_obj(_Diag(), raw, "sequences"))
    known_maps = set(maps) | set(_obj(_Diag(), raw, "maps"))
    known_sets = set(sets) | set(_obj(_Diag(), raw, "sets"))
    ids = set()
    for i, t in enumerate(raw_tasks):
        task = _task(diag, t, i, dim, known_seqs, known_maps, known_sets)
        if task is None:
            continue
        if task.id in ids:
            diag.add(f"tasks[{i}].id", f"duplicate task id {task.id!r}")
        ids.add(task.id)
        tasks.append(task)

    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        diag.add("output", "must be a string path")
    if diag.items:
        raise ConfigError(diag.items)
    echo = {"schema_version": SCHEMA_VERSION, "space": space_echo, "connectives": conn_echo,
            "norm": norm_echo, "sampler": sampler_echo, "sequences": seq_echo, "maps": map_echo,
            "sets": set_echo, "tasks": [{"id": t.id, "kind": t.kind, **t.params} for t in tasks],
            "output": output}
    return RunConfig(SCHEMA_VERSION, norm, sampler, seqs, maps, sets, tasks, output, echo)


def load_config(path, seed_override: int | None = None) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError([f"<file>: cannot read {path}: {exc.strerror}"]) from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"<file>: invalid JSON at line {exc.lineno} column {exc.colno}: "
                           f"{exc.msg}"]) from exc
    return validate_config(raw, seed_override)
