"""Monte-Carlo sweeps and benchmark runs, emitting CSV tables.

Every repetition draws from its own random substream keyed by
``(seed, n, repetition)``, so results do not depend on the number of worker
processes or the order in which repetitions finish.
"""
from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from functools import partial
from pathlib import Path

import numpy as np

from . import dataio, inference
from .chain import DEFAULT_LAMBDA, train_br, train_chain
from .errors import ConfigError, LCCError, TooManyLabels
from .metrics import cross_validate
from .ordering import find_ordering, loglik_ordering
from .speclink import CarrierFamily
from .synthgen import model_spec, make_rng, sample, true_mode

log = logging.getLogger(__name__)

LONG_MODELS = ("M12",)
LONG_MAX_LABELS = 15
LONG_MAX_ROWS = 5000
DEFAULT_N_GRID = (50, 100, 200, 500, 1000, 2000, 4000)
ALL_FAMILIES = tuple(f.value for f in CarrierFamily)


# ---------------------------------------------------------------- methods

@dataclass(frozen=True)
class Method:
    """A trainable multi-label predictor.

    ``ordering`` is ``original``, ``reversed``, ``loglik`` or a carrier family
    name (ordering found by deviance-based forward selection).
    """

    name: str
    kind: str = "cc"
    ordering: str = "original"
    engine: str = "exhaustive"
    beam_width: int = 2
    lam: float = DEFAULT_LAMBDA

    def chain_ordering(self, X, Y):
        K = Y.shape[1]
        if self.ordering == "original":
            return tuple(range(K))
        if self.ordering == "reversed":
            return tuple(reversed(range(K)))
        if self.ordering == "loglik":
            return loglik_ordering(X, Y, self.lam).permutation
        return find_ordering(X, Y, self.ordering, self.lam).permutation

    def train(self, X, Y):
        if self.kind == "br":
            return train_br(X, Y, self.lam)
        return train_chain(X, Y, self.chain_ordering(X, Y), self.lam)

    def fit_predict(self, X_train, Y_train, X_test):
        model = self.train(X_train, Y_train)
        return inference.predict(model, X_test, self.engine, self.beam_width)


def standard_methods(lam=DEFAULT_LAMBDA, family="pregibon"):
    fam = CarrierFamily.parse(family).value.upper()
    return (
        Method("BR", kind="br", lam=lam),
        Method("CC EX", ordering="original", engine="exhaustive", lam=lam),
        Method(f"CC {fam} EX", ordering=family, engine="exhaustive", lam=lam),
        Method("CC GR", ordering="original", engine="greedy", lam=lam),
        Method(f"CC {fam} GR", ordering=family, engine="greedy", lam=lam),
    )


# ---------------------------------------------------------------- config

def _tuple_of(conv):
    def parse(v):
        if isinstance(v, str):
            return tuple(conv(t.strip()) for t in v.split(",") if t.strip())
        return tuple(conv(t) for t in v)
    return parse


def _bool(v):
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


def _opt(conv):
    return lambda v: None if v in (None, "", "none", "None") else conv(v)


@dataclass(frozen=True)
class SweepConfig:
    model: str | None = None
    dataset: str | None = None
    label_count: int | None = None
    top_k: int | None = None
    subsample: int | None = None
    standardize: bool = False
    n_grid: tuple = DEFAULT_N_GRID
    repetitions: int = 200
    families: tuple = ("pregibon",)
    include_loglik: bool = True
    seed: int = 0
    engine: str = "auto"
    beam_width: int = 2
    lam: float = DEFAULT_LAMBDA
    test_size: int = 200
    folds: int = 5
    methods: tuple = ()
    workers: int = 1
    output: str | None = None
    long: bool = False

    _CONVERTERS = {
        "model": _opt(str), "dataset": _opt(str), "label_count": _opt(int), "top_k": _opt(int),
        "subsample": _opt(int), "standardize": _bool, "n_grid": _tuple_of(int),
        "repetitions": int, "families": _tuple_of(str), "include_loglik": _bool, "seed": int,
        "engine": str, "beam_width": int, "lam": float, "test_size": int, "folds": int,
        "methods": _tuple_of(str), "workers": int, "output": _opt(str), "long": _bool,
    }
    _ALIASES = {"lambda": "lam", "n": "n_grid", "family": "families", "data": "dataset"}

    def __post_init__(self):
        for f in fields(self):
            conv = self._CONVERTERS.get(f.name)
            if conv is not None:
                try:
                    object.__setattr__(self, f.name, conv(getattr(self, f.name)))
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"bad value for {f.name}: {exc}") from None
        if self.repetitions < 1:
            raise ConfigError("repetitions must be at least 1")
        if not self.n_grid or list(self.n_grid) != sorted(self.n_grid) or self.n_grid[0] < 1:
            raise ConfigError("n grid must be nonempty, positive and ascending")
        if self.lam < 0:
            raise ConfigError("lambda must be nonnegative")
        if self.engine not in ("auto",) + inference.ENGINES:
            raise ConfigError(f"unknown engine {self.engine!r}")
        if self.beam_width < 1 or self.workers < 1 or self.test_size < 1:
            raise ConfigError("beam width, workers and test size must be positive")
        for fam in self.families:
            CarrierFamily.parse(fam)

    @classmethod
    def from_mapping(cls, mapping):
        known = {f.name for f in fields(cls)}
        kw = {}
        for key, value in mapping.items():
            key = key.strip().replace("-", "_")
            key = cls._ALIASES.get(key, key)
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            kw[key] = value
        return cls(**kw)

    @classmethod
    def from_file(cls, path, **overrides):
        """Read ``key = value`` lines (``#`` starts a comment); ``overrides`` win."""
        mapping = {}
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            k, v = line.split("=", 1)
            mapping[k.strip()] = v.strip()
        mapping.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_mapping(mapping)


# ---------------------------------------------------------------- helpers

def _map(fn, tasks, workers):
    if workers <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(rows, path):
    """Write a list of dicts (shared keys, first row's order) as CSV."""
    if not rows:
        raise ValueError("nothing to write")
    cols = list(rows[0])
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in cols])


def _require_model(config):
    if not config.model:
        raise ConfigError("a model id (M1..M12) is required")
    spec = model_spec(config.model)
    if spec.name in LONG_MODELS and not config.long:
        raise ConfigError(f"{spec.name} sweeps take hours; pass --long to run them")
    return spec


# ---------------------------------------------------------------- ordering recovery

def _ordering_rep(config, task):
    n, rep = task
    spec = model_spec(config.model)
    data = sample(spec, n, rng=make_rng(config.seed, n, rep))
    target = tuple(range(spec.K))
    out = []
    runs = [(fam, partial(find_ordering, family=fam, lam=config.lam)) for fam in config.families]
    if config.include_loglik:
        runs.append(("loglik", partial(loglik_ordering, lam=config.lam)))
    for _, run in runs:
        try:
            out.append((run(data.X, data.Y).permutation == target, False))
        except LCCError as exc:
            log.warning("n=%d rep=%d: ordering failed: %s", n, rep, exc)
            out.append((False, True))
    return out


def run_ordering_sweep(config):
    """Estimated probability of recovering the true order, per method and n.

    Rows are ordered by method (families as configured, then ``loglik``,
    then the ``random`` reference 1/K!) and then by n.
    """
    spec = _require_model(config)
    names = [CarrierFamily.parse(f).value for f in config.families]
    if config.include_loglik:
        names.append("loglik")
    tasks = [(n, r) for n in config.n_grid for r in range(config.repetitions)]
    results = dict(zip(tasks, _map(partial(_ordering_rep, config), tasks, config.workers)))

    rows = []
    for m, name in enumerate(names):
        for n in config.n_grid:
            res = [results[(n, r)][m] for r in range(config.repetitions)]
            correct = sum(c for c, _ in res)
            failures = sum(f for _, f in res)
            ok = config.repetitions - failures
            rows.append({"model": spec.name, "method": name, "n": n, "repetitions": config.repetitions,
                         "correct": correct, "failures": failures,
                         "probability": correct / ok if ok else float("nan")})
    for n in config.n_grid:
        rows.append({"model": spec.name, "method": "random", "n": n, "repetitions": config.repetitions,
                     "correct": 0, "failures": 0, "probability": 1.0 / math.factorial(spec.K)})
    return rows


# ---------------------------------------------------------------- mode consistency

MODE_REGIMES = ("correct", "selected", "reversed")


def _mode_engine(config, spec):
    if config.engine != "auto":
        return config.engine
    return "greedy" if spec.name in LONG_MODELS else "exhaustive"


def _mode_rep(config, task):
    n, rep = task
    spec = model_spec(config.model)
    rng = make_rng(config.seed, n, rep)
    train = sample(spec, n, rng=rng)
    test = sample(spec, config.test_size, rng=rng)
    truth = np.array([true_mode(spec, x) for x in test.X])
    engine = _mode_engine(config, spec)
    family = config.families[0]
    out = []
    for regime in MODE_REGIMES:
        try:
            if regime == "correct":
                order = tuple(range(spec.K))
            elif regime == "reversed":
                order = tuple(reversed(range(spec.K)))
            else:
                order = find_ordering(train.X, train.Y, family, config.lam).permutation
            model = train_chain(train.X, train.Y, order, config.lam)
            pred = inference.predict(model, test.X, engine, config.beam_width)
            out.append((int(np.sum(np.all(pred == truth, axis=1))), False))
        except LCCError as exc:
            log.warning("n=%d rep=%d regime=%s failed: %s", n, rep, regime, exc)
            out.append((0, True))
    return out


def run_mode_sweep(config):
    """Rate of exact joint-mode recovery on fresh test points, per ordering regime and n.

    The rate is the grand mean over all (repetition, test point) pairs of
    repetitions whose training succeeded.
    """
    spec = _require_model(config)
    tasks = [(n, r) for n in config.n_grid for r in range(config.repetitions)]
    results = dict(zip(tasks, _map(partial(_mode_rep, config), tasks, config.workers)))
    engine = _mode_engine(config, spec)
    rows = []
    for m, regime in enumerate(MODE_REGIMES):
        for n in config.n_grid:
            res = [results[(n, r)][m] for r in range(config.repetitions)]
            failures = sum(f for _, f in res)
            hits = sum(c for c, _ in res)
            total = (config.repetitions - failures) * config.test_size
            rows.append({"model": spec.name, "regime": regime, "n": n, "engine": engine,
                         "repetitions": config.repetitions, "test_size": config.test_size,
                         "failures": failures, "correct": hits,
                         "probability": hits / total if total else float("nan")})
    return rows


# ---------------------------------------------------------------- benchmarks

def load_benchmark_data(config):
    if not config.dataset:
        raise ConfigError("a dataset path is required")
    data = dataio.load_dataset(config.dataset, label_count=config.label_count)
    if config.top_k:
        data = dataio.top_k_labels(data, config.top_k)
    if config.subsample:
        data = dataio.subsample(data, config.subsample, config.seed)
    if config.standardize:
        data = data.standardized()
    return data


def benchmark_methods(config, K):
    methods = standard_methods(config.lam, config.families[0])
    if config.methods:
        wanted = {m.upper() for m in config.methods}
        chosen = tuple(m for m in methods if m.name.upper() in wanted)
        unknown = wanted - {m.name.upper() for m in chosen}
        if unknown:
            raise ConfigError(f"unknown methods: {sorted(unknown)}")
        for m in chosen:
            if m.engine == "exhaustive" and m.kind == "cc" and K > inference.MAX_EXHAUSTIVE_LABELS:
                raise TooManyLabels(f"{m.name} refuses {K} labels")
        return chosen
    if K > LONG_MAX_LABELS:
        return tuple(m for m in methods if m.kind == "br" or m.engine != "exhaustive")
    return methods


def run_benchmark(config, data=None):
    """Cross-validated measures for each method, one report per method."""
    if data is None:
        data = load_benchmark_data(config)
    if (data.K > LONG_MAX_LABELS or data.n > LONG_MAX_ROWS) and not config.long:
        raise ConfigError(f"{data.n} rows x {data.K} labels is a long run; pass --long")
    reports = []
    for method in benchmark_methods(config, data.K):
        log.info("benchmark %s on %s", method.name, data.name or "dataset")
        reports.append(cross_validate(data, method, config.folds, config.seed))
    return reports


def benchmark_rows(reports, dataset_name=""):
    return [{"dataset": dataset_name, **r.row(), "folds": len(r.folds)} for r in reports]


def with_overrides(config, **kw):
    return replace(config, **{k: v for k, v in kw.items() if v is not None})
