"""Seeded experiment sweeps over the number of measurements.

A run is a pure function of its :class:`ExperimentConfig`: the trial at
``(m, t)`` draws everything from ``derive_seed(seed, m, t)``, and rows are
aggregated in trial order, so the worker count cannot change the output.
"""
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .certify import Verdict, estimate_stability_constant, find_rank2_in_kernel, orbit_distance, \
    random_sparse_pair, weak_identifiability_test
from .config import Tolerances
from .convolution import circ_conv, circ_conv_fft, deconv_map, gaussian_basis, haar_subspace
from .errors import ConfigError
from .lifting import from_structured, random_dense_map, random_structured_rows
from .models import expected_dimension, injectivity_threshold, jacobian_rank_dimension
from .numerics import complex_normal, derive_seed, rng
from .recover import blind_recover, recovery_succeeded

log = logging.getLogger(__name__)

MODES = ("dim-check", "certify", "phase", "recover", "weak", "conv-selftest")
ENSEMBLES = ("dense-gaussian", "structured-rows", "deconv-bases", "deconv-subspaces")
CSV_HEADER = "m,success_rate,mean_constant,min_constant,counterexample_rate,seconds"
CONV_TOL = 1e-10


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    ensemble: str = "dense-gaussian"
    n1: int = 4  # for deconv ensembles: subspace dimension k
    n2: int = 4  # for deconv ensembles: subspace dimension l
    s1: int = 2
    s2: int = 2
    m_min: int = 1
    m_max: int = 1
    trials: int = 10
    seed: int = 0
    tolerances: Tolerances = field(default_factory=Tolerances)
    restarts: int = 2
    max_iters: int = 150
    samples: int = 10
    record_timing: bool = False

    def __post_init__(self):
        if isinstance(self.tolerances, dict):
            object.__setattr__(self, "tolerances", Tolerances(**self.tolerances))
        problems = {}
        if self.mode not in MODES:
            problems["mode"] = f"must be one of {', '.join(MODES)}"
        if self.ensemble not in ENSEMBLES:
            problems["ensemble"] = f"must be one of {', '.join(ENSEMBLES)}"
        if self.m_min < 1 or self.m_max < self.m_min:
            problems["m_range"] = f"empty or nonpositive range {self.m_min}..{self.m_max}"
        if self.trials < 1:
            problems["trials"] = "must be at least 1"
        if self.restarts < 1:
            problems["restarts"] = "must be at least 1"
        if self.max_iters < 1:
            problems["max_iters"] = "must be at least 1"
        if self.samples < 1:
            problems["samples"] = "must be at least 1"
        if self.mode != "conv-selftest":
            if self.n1 < 2 or self.n2 < 2:
                problems["n1/n2"] = "dimensions must be at least 2"
            if not (1 <= self.s1 <= self.n1):
                problems["s1"] = f"must lie in 1..n1={self.n1}"
            if not (1 <= self.s2 <= self.n2):
                problems["s2"] = f"must lie in 1..n2={self.n2}"
            if self.ensemble.startswith("deconv") and self.m_min < max(self.n1, self.n2):
                problems["m_range"] = f"deconvolution needs ambient m >= max(n1, n2) = {max(self.n1, self.n2)}"
        if problems:
            raise ConfigError(problems)

    @property
    def m_range(self):
        return range(self.m_min, self.m_max + 1)

    def to_dict(self):
        d = asdict(self)
        d["tolerances"] = self.tolerances.to_dict()
        return d

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known - {"m_range"})
        if unknown:
            raise ConfigError({k: "unknown field" for k in unknown})
        d = dict(d)
        if "m_range" in d:
            lo, hi = d.pop("m_range")
            d["m_min"], d["m_max"] = int(lo), int(hi)
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError({"config": str(exc)}) from exc


@dataclass(frozen=True)
class Row:
    m: int
    success_rate: float
    mean_constant: float
    min_constant: float
    counterexample_rate: float
    seconds: float


@dataclass(frozen=True)
class ExperimentRecord:
    config: ExperimentConfig
    rows: tuple
    threshold_marker: Optional[int]


def threshold_marker(cfg):
    if cfg.mode == "conv-selftest":
        return None
    if cfg.mode == "weak":
        return cfg.s1 + cfg.s2
    return injectivity_threshold(cfg.n1, cfg.n2, cfg.s1, cfg.s2)


def draw_map(cfg, m, seed):
    if cfg.ensemble == "dense-gaussian":
        return random_dense_map(cfg.n1, cfg.n2, m, seed)
    if cfg.ensemble == "structured-rows":
        return from_structured(random_structured_rows(cfg.n1, cfg.n2, m, seed))
    basis = gaussian_basis if cfg.ensemble == "deconv-bases" else haar_subspace
    return deconv_map(basis(m, cfg.n1, derive_seed(seed, 0)), basis(m, cfg.n2, derive_seed(seed, 1)))


def _certify_trial(cfg, m, seed):
    M = draw_map(cfg, m, seed)
    res = estimate_stability_constant(M, cfg.s1, cfg.s2, restarts=cfg.restarts, max_iters=cfg.max_iters,
                                      seed=seed, tolerances=cfg.tolerances)
    value = res.estimated_constant
    counter = res.verdict is Verdict.COUNTEREXAMPLE_FOUND
    if cfg.s1 == cfg.n1 and cfg.s2 == cfg.n2 and not counter:
        X = find_rank2_in_kernel(M, seed=seed)
        if X is not None:
            value = min(value, float(np.linalg.norm(M.apply(X))))
            counter = True
    success = res.verdict is Verdict.LIKELY_INJECTIVE and not counter
    return success, value, counter


def _recover_trial(cfg, m, seed):
    M = draw_map(cfg, m, seed)
    g = rng(seed, 1)
    u, v = random_sparse_pair(cfg.n1, cfg.n2, cfg.s1, cfg.s2, g)
    res = blind_recover(M, M(u, v), cfg.s1, cfg.s2, restarts=cfg.restarts + 3, seed=seed)
    bu, bv = res.factors()
    err = orbit_distance(bu, bv, u, v)
    return recovery_succeeded(res, u, v, cfg.tolerances), err, res.ambiguity_gap < cfg.tolerances.fail_tol


def _weak_trial(cfg, m, seed):
    M = draw_map(cfg, m, seed)
    u, v = random_sparse_pair(cfg.n1, cfg.n2, cfg.s1, cfg.s2, rng(seed, 1))
    res = weak_identifiability_test(M, u, v, cfg.s1, cfg.s2, restarts=cfg.restarts + 1, seed=seed,
                                    tolerances=cfg.tolerances)
    counter = (res.verdict is Verdict.COUNTEREXAMPLE_FOUND
               and res.witness_orbit_distance is not None
               and res.witness_orbit_distance > cfg.tolerances.orbit_radius)
    return res.verdict is Verdict.LIKELY_INJECTIVE, res.estimated_constant, counter


def _conv_trial(cfg, m, seed):
    g = rng(seed)
    v, w = complex_normal(g, (m,)), complex_normal(g, (m,))
    err = np.linalg.norm(circ_conv(v, w) - circ_conv_fft(v, w)) / (np.linalg.norm(v) * np.linalg.norm(w))
    return err <= CONV_TOL, float(err), err > CONV_TOL


def _dim_trial(cfg, m, seed):
    d = jacobian_rank_dimension(cfg.n1, cfg.n2, cfg.s1, cfg.s2, samples=cfg.samples, seed=seed)
    return d == expected_dimension(cfg.n1, cfg.n2, cfg.s1, cfg.s2), float(d), m < d


_TRIALS = {
    "dim-check": _dim_trial,
    "certify": _certify_trial,
    "phase": _certify_trial,
    "recover": _recover_trial,
    "weak": _weak_trial,
    "conv-selftest": _conv_trial,
}


def run_trial(cfg, m, t):
    """Outcome ``(success, constant, counterexample, seconds)`` of trial ``t`` at ``m``."""
    start = time.perf_counter()
    success, value, counter = _TRIALS[cfg.mode](cfg, m, derive_seed(cfg.seed, m, t))
    return bool(success), float(value), bool(counter), time.perf_counter() - start


def run_experiment(cfg, threads=1):
    tasks = [(m, t) for m in cfg.m_range for t in range(cfg.trials)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(lambda mt: run_trial(cfg, *mt), tasks))
    else:
        outcomes = [run_trial(cfg, m, t) for m, t in tasks]
    rows = []
    for i, m in enumerate(cfg.m_range):
        chunk = outcomes[i * cfg.trials:(i + 1) * cfg.trials]
        ok = [c[0] for c in chunk]
        vals = np.array([c[1] for c in chunk])
        rows.append(Row(
            m=m,
            success_rate=sum(ok) / len(ok),
            mean_constant=float(vals.mean()),
            min_constant=float(vals.min()),
            counterexample_rate=sum(c[2] for c in chunk) / len(chunk),
            seconds=float(sum(c[3] for c in chunk)),
        ))
        log.info("m=%d success=%.3f counterexamples=%.3f", m, rows[-1].success_rate, rows[-1].counterexample_rate)
    return ExperimentRecord(cfg, tuple(rows), threshold_marker(cfg))


def _num(x):
    return format(float(x), ".17g")


def csv_text(rec):
    lines = [CSV_HEADER]
    for r in rec.rows:
        secs = _num(r.seconds) if rec.config.record_timing else "nan"
        lines.append(",".join([str(r.m), _num(r.success_rate), _num(r.mean_constant), _num(r.min_constant),
                               _num(r.counterexample_rate), secs]))
    return "\n".join(lines) + "\n"


def write_results(rec, path):
    """Write ``path`` (CSV) and ``path`` with suffix ``.json`` (config echo, marker, timings)."""
    path = Path(path)
    meta = {
        "config": rec.config.to_dict(),
        "threshold_marker": rec.threshold_marker,
        "seconds": {str(r.m): r.seconds for r in rec.rows},
    }
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(csv_text(rec))
        with open(path.with_suffix(".json"), "w", encoding="utf-8", newline="\n") as f:
            json.dump(meta, f, indent=2, sort_keys=True)
            f.write("\n")
    except OSError as exc:
        raise OSError(f"could not write results to {path}: {exc}") from exc


def read_config_echo(path):
    with open(Path(path).with_suffix(".json"), encoding="utf-8") as f:
        meta = json.load(f)
    return ExperimentConfig.from_dict(meta["config"]), meta["threshold_marker"]


def first_passing_m(rec, level=0.95):
    for r in rec.rows:
        if r.success_rate >= level:
            return r.m
    return None


def check_bands(rec):
    """Acceptance-band violations for ``--assert``; empty when all hold."""
    cfg = rec.config
    marker = rec.threshold_marker
    bad = []
    if cfg.mode in ("conv-selftest", "dim-check"):
        bad += [f"m={r.m}: success_rate {r.success_rate} < 1" for r in rec.rows if r.success_rate < 1]
    elif cfg.mode == "certify":
        for r in rec.rows:
            if r.m < marker and r.counterexample_rate < 0.9:
                bad.append(f"m={r.m} < {marker}: counterexample_rate {r.counterexample_rate} < 0.9")
            if r.m >= marker and r.success_rate < 0.9:
                bad.append(f"m={r.m} >= {marker}: success_rate {r.success_rate} < 0.9")
    elif cfg.mode == "recover":
        bad += [f"m={r.m}: success_rate {r.success_rate} < 0.95" for r in rec.rows
                if r.m >= marker and r.success_rate < 0.95]
    else:
        for a, b in zip(rec.rows, rec.rows[1:]):
            if b.success_rate < a.success_rate - 0.1:
                bad.append(f"success_rate drops from m={a.m} to m={b.m}")
        if cfg.m_min < marker <= cfg.m_max and first_passing_m(rec) != marker:
            bad.append(f"first m with success >= 0.95 is {first_passing_m(rec)}, expected {marker}")
    return bad
