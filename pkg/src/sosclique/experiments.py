"""Monte Carlo and exhaustive-enumeration experiments.

Trial ``i`` of a run uses the graph seed ``trial_seed(master_seed, i)``, a
SplitMix64 finalizer applied to ``master_seed + (i + 1) * 0x9E3779B97F4A7C15``
(mod 2^64).  Seeds depend only on the master seed and the trial index, so
reports are identical whether trials run serially or in worker processes.
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .bounds import clique_count_threshold, degree_center, degree_threshold, r_a_norm_bound
from .certificate import (
    CertificateParams,
    DegenerateCertificateWarning,
    build_exm,
    build_expectation,
    build_grigoriev,
    build_l,
    build_m,
    build_m_prime,
    filled_parts,
    r_a_operator,
)
from .certificate.filled import build_r_a
from .combinat import binomial, format_subset
from .graphs import (
    Graph,
    clique_array,
    clique_degree,
    enumerate_all_graphs,
    force_clique,
    sample_gnp_half,
)
from .ratmat import RatMatrix
from .spectra import clique_indices, is_psd, spectral_norm

__all__ = [
    "CAPACITY",
    "ORACLE_MAX_N",
    "CapacityError",
    "TrialConfig",
    "ExperimentReport",
    "OracleReport",
    "GapReport",
    "splitmix64",
    "trial_seed",
    "violation_slack",
    "psd_frequency",
    "concentration_cliques",
    "concentration_degree",
    "norm_r_a",
    "exact_expectation_oracle",
    "gap_probe",
]

#: Largest matrix dimension ``C(n, r)`` an experiment will assemble densely.
CAPACITY = 5000
#: Largest n for exhaustive averaging over all graphs.
ORACLE_MAX_N = 5

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
CSV_HEADER = ["trial", "seed", "statistic", "center", "threshold", "violation"]


class CapacityError(ValueError):
    """The requested size exceeds a hard cap."""


def splitmix64(x: int) -> int:
    z = x & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def trial_seed(master_seed: int, index: int) -> int:
    return splitmix64(master_seed + (index + 1) * _GOLDEN)


def violation_slack(eps: float, trials: int) -> float:
    """``3 sqrt(eps (1 - eps) / trials)``, three binomial standard deviations of a rate."""
    return 3.0 * math.sqrt(eps * (1.0 - eps) / trials)


@dataclass(frozen=True)
class TrialConfig:
    n: int
    r: int = 1
    k: int = 2
    trials: int = 1
    master_seed: int = 0
    epsilon: float = 0.05
    psd_tol: float = 1e-9

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.n < 1:
            raise ValueError("n must be >= 1")

    def seed(self, index: int) -> int:
        return trial_seed(self.master_seed, index)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class ExperimentReport:
    name: str
    config: dict
    rows: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def violation_count(self) -> int:
        return int(self.summary.get("violation_count", 0))

    @property
    def violation_rate(self) -> float:
        return float(self.summary.get("violation_rate", 0.0))

    def to_dict(self, include_rows: bool = True) -> dict:
        out = {"name": self.name, "tool_version": __version__, "config": self.config,
               "summary": self.summary}
        if include_rows:
            out["rows"] = self.rows
        return out

    def to_json(self, include_rows: bool = True) -> str:
        return json.dumps(_jsonable(self.to_dict(include_rows)), sort_keys=True, indent=2)

    def to_csv(self, metadata: dict | None = None) -> str:
        buf = io.StringIO()
        meta = {"experiment": self.name, "tool_version": __version__, "config": self.config}
        meta.update(metadata or {})
        for key, value in meta.items():
            buf.write(f"# {key}: {json.dumps(_jsonable(value), sort_keys=True)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow([_csv_cell(row.get(col)) for col in CSV_HEADER])
        return buf.getvalue()


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def _run(fn: Callable, config: TrialConfig, extra: tuple, workers: int) -> list[dict]:
    indices = range(config.trials)
    if workers <= 1:
        return [fn(config, i, *extra) for i in indices]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, config, i, *extra) for i in indices]
        return [f.result() for f in futures]


def _deviation_summary(rows: list[dict], center: float, threshold: float, eps: float) -> dict:
    stats = np.array([row["statistic"] for row in rows], dtype=float)
    trials = len(rows)
    count = sum(1 for row in rows if row["violation"])
    std = float(stats.std(ddof=1)) if trials > 1 else 0.0
    stderr = std / math.sqrt(trials)
    mean = float(stats.mean())
    slack = violation_slack(eps, trials)
    return {
        "trials": trials,
        "violation_count": count,
        "violation_rate": count / trials,
        "empirical_mean": mean,
        "empirical_std": std,
        "standard_error": stderr,
        "empirical_max_dev": float(np.abs(stats - center).max()),
        "theory_threshold": threshold,
        "theory_center": center,
        "rate_slack": slack,
        "rate_ok": count / trials <= eps + slack,
        "mean_sigmas": abs(mean - center) / stderr if stderr > 0 else (0.0 if mean == center else math.inf),
    }


# PSD frequency -------------------------------------------------------------

def _psd_trial(config: TrialConfig, index: int, inject_complete: bool) -> dict:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateCertificateWarning)
        params = CertificateParams(config.n, config.r, config.k)
    complete = inject_complete and index == 0
    seed = config.seed(index)
    graph = Graph.complete(config.n) if complete else sample_gnp_half(config.n, seed)
    m_prime = build_m_prime(graph, params)
    m = build_m(graph, params)
    idx = clique_indices(graph, config.r)
    block = m.take(idx)
    mp_report = is_psd(m_prime, config.psd_tol)
    row = {
        "trial": index,
        "seed": "complete" if complete else seed,
        "graph": "complete" if complete else "gnp",
        "mprime_min": mp_report.true_min,
        "mprime_min_normalized": mp_report.min,
        "mprime_scale": mp_report.scale,
        "mprime_psd": mp_report.psd,
        "clique_rows": int(len(idx)),
        "block_equals_mprime_block": block == m_prime.take(idx),
    }
    if len(idx):
        block_report = is_psd(block, config.psd_tol)
        row.update(block_min=block_report.true_min, block_psd=block_report.psd)
    else:
        row.update(block_min=math.inf, block_psd=True)
    # implication: a principal block of a PSD matrix has min eigenvalue >= the full one
    slack = 1e-8 * mp_report.scale
    implication = (not mp_report.psd) or row["block_min"] >= mp_report.true_min - slack
    row["implication_holds"] = bool(implication)
    if complete:
        full = build_grigoriev(config.n, config.r, config.k)
        offset = sum(binomial(config.n, l) for l in range(config.r))
        dim = binomial(config.n, config.r)
        gr_block = full.take(np.arange(offset, offset + dim))
        row["grigoriev_match"] = bool(gr_block == m)
    row.update(statistic=mp_report.true_min, center=row["block_min"], threshold=-slack,
               violation=not implication)
    return row


def psd_frequency(config: TrialConfig, inject_complete: bool = False, workers: int = 1) -> ExperimentReport:
    """Minimum eigenvalues of ``M'`` and of the clique block of ``M`` per sampled graph.

    With ``inject_complete`` trial 0 uses the complete graph instead of a
    sample.  ``violation`` marks a trial where ``M'`` is PSD but the clique
    block's minimum eigenvalue falls below ``M'``'s by more than
    ``1e-8 * scale``.
    """
    dim = binomial(config.n, config.r)
    if dim > CAPACITY:
        raise CapacityError(f"C({config.n},{config.r}) = {dim} exceeds the cap {CAPACITY}")
    rows = _run(_psd_trial, config, (inject_complete,), workers)
    trials = len(rows)
    mp_psd = sum(1 for row in rows if row["mprime_psd"])
    block_psd = sum(1 for row in rows if row["block_psd"])
    failures = sum(1 for row in rows if row["violation"])
    summary = {
        "trials": trials,
        "mprime_psd_count": mp_psd,
        "mprime_psd_frequency": mp_psd / trials,
        "block_psd_count": block_psd,
        "block_psd_frequency": block_psd / trials,
        "implication_checked": mp_psd,
        "violation_count": failures,
        "violation_rate": failures / trials,
        "empirical_mean": float(np.mean([row["mprime_min"] for row in rows])),
        "empirical_max_dev": float(max(abs(row["mprime_min"]) for row in rows)),
        "theory_threshold": 0.0,
    }
    return ExperimentReport("psd_frequency", {**config.as_dict(), "inject_complete": inject_complete},
                            rows, summary)


# concentration ------------------------------------------------------------

def _clique_trial(config: TrialConfig, index: int, a: int, center: float, threshold: float) -> dict:
    seed = config.seed(index)
    graph = sample_gnp_half(config.n, seed)
    count = len(clique_array(graph, a))
    return {"trial": index, "seed": seed, "statistic": count, "center": center,
            "threshold": threshold, "violation": abs(count - center) > threshold}


def concentration_cliques(config: TrialConfig, a: int, workers: int = 1) -> ExperimentReport:
    """``|N_a(G) - C(n,a) 2^(-C(a,2))|`` against ``clique_count_threshold``."""
    if not 0 <= a <= config.n:
        raise ValueError(f"need 0 <= a <= n, got a={a}")
    bound = clique_count_threshold(a, config.n, config.epsilon)
    center = Fraction(binomial(config.n, a), 2 ** binomial(a, 2))
    rows = _run(_clique_trial, config, (a, float(center), bound.value), workers)
    summary = _deviation_summary(rows, float(center), bound.value, config.epsilon)
    summary.update(exact_center=str(center), bound_valid=bound.valid)
    return ExperimentReport("concentration_cliques", {**config.as_dict(), "a": a}, rows, summary)


def _degree_trial(config: TrialConfig, index: int, i: int, center: float, threshold: float) -> dict:
    seed = config.seed(index)
    graph = force_clique(sample_gnp_half(config.n, seed), range(i))
    deg = clique_degree(graph, range(i), config.r)
    return {"trial": index, "seed": seed, "statistic": deg, "center": center,
            "threshold": threshold, "violation": abs(deg - center) > threshold}


def concentration_degree(config: TrialConfig, i: int, workers: int = 1) -> ExperimentReport:
    """``deg_G(I)`` for ``I = {0..i-1}`` conditioned on ``I`` being a clique.

    Conditioning forces the edges inside ``I`` present; all other edges keep
    their sampled values.
    """
    if not 0 <= i <= 2 * config.r:
        raise ValueError(f"need 0 <= i <= 2r, got i={i}")
    bound = degree_threshold(config.r, i, config.n, config.epsilon)
    center = degree_center(config.r, i, config.n)
    rows = _run(_degree_trial, config, (i, float(center), bound.value), workers)
    summary = _deviation_summary(rows, float(center), bound.value, config.epsilon)
    summary.update(exact_center=str(center), bound_valid=bound.valid)
    return ExperimentReport("concentration_degree", {**config.as_dict(), "i": i}, rows, summary)


# norms of R_a ----------------------------------------------------------------

def _norm_trial(config: TrialConfig, index: int, a: int, threshold: float, dense_max: int) -> dict:
    seed = config.seed(index)
    graph = sample_gnp_half(config.n, seed)
    dim = binomial(config.n, a)
    if dim <= dense_max:
        norm = spectral_norm(build_r_a(graph, a).astype(np.float64))
        route = "dense"
    else:
        norm = spectral_norm(r_a_operator(graph, a))
        route = "operator"
    return {"trial": index, "seed": seed, "statistic": norm, "center": 0.0, "threshold": threshold,
            "violation": norm > threshold, "ratio": norm / config.n ** (a - 0.5), "route": route}


def norm_r_a(config: TrialConfig, a: int, dense_max: int = 2000, workers: int = 1) -> ExperimentReport:
    """``||R_a||`` per sampled graph against ``r_a_norm_bound``.

    Up to ``dense_max`` rows the matrix is assembled densely; larger cases use
    the matrix-free operator with a Lanczos norm estimate.
    """
    if a < 1 or 2 * a > config.n:
        raise ValueError(f"need 1 <= a <= n/2, got a={a}, n={config.n}")
    bound = r_a_norm_bound(a, config.n, config.epsilon)
    rows = _run(_norm_trial, config, (a, bound.value, dense_max), workers)
    summary = _deviation_summary(rows, 0.0, bound.value, config.epsilon)
    del summary["mean_sigmas"]
    summary.update(bound_valid=bound.valid,
                   mean_ratio=float(np.mean([row["ratio"] for row in rows])),
                   max_norm=float(max(row["statistic"] for row in rows)))
    return ExperimentReport("norm_r_a", {**config.as_dict(), "a": a}, rows, summary)


# exhaustive oracle -----------------------------------------------------------

@dataclass
class OracleReport:
    n: int
    r: int
    k: int
    graphs: int
    checks: dict
    first_discrepancy: dict | None

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return _jsonable({"n": self.n, "r": self.r, "k": self.k, "graphs": self.graphs,
                          "passed": self.passed, "checks": self.checks,
                          "first_discrepancy": self.first_discrepancy, "tool_version": __version__})


def _first_gap(name: str, got: RatMatrix, expected: RatMatrix, labels) -> dict | None:
    where = got.first_difference(expected)
    if where is None:
        return None
    i, j = where
    return {"matrix": name, "row": format_subset(labels[i]), "col": format_subset(labels[j]),
            "got": str(got.entry(i, j)), "expected": str(expected.entry(i, j))}


def exact_expectation_oracle(n: int, r: int, k: int) -> OracleReport:
    """Average ``M, M', L, Delta`` over every graph on ``n`` vertices, exactly."""
    if n > ORACLE_MAX_N:
        raise CapacityError(f"exhaustive averaging refused for n={n} > {ORACLE_MAX_N}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateCertificateWarning)
        params = CertificateParams(n, r, k)
    e = build_expectation(params)
    sums: dict[str, RatMatrix] = {}
    count = 0
    for graph in enumerate_all_graphs(n):
        parts = filled_parts(graph, r)
        m_prime = build_m_prime(graph, params, parts)
        l = build_l(graph, params, parts)
        current = {"m": build_m(graph, params), "m_prime": m_prime, "l": l, "delta": m_prime - e - l}
        for key, val in current.items():
            sums[key] = val if key not in sums else sums[key] + val
        count += 1
    avg = {key: val.scale(Fraction(1, count)) for key, val in sums.items()}
    zero = RatMatrix.zeros(e.shape)
    expected = {"m_prime": e, "l": zero, "delta": zero, "m": build_exm(params)}
    from .combinat import colex_subsets

    labels = [tuple(row) for row in colex_subsets(n, r).tolist()]
    checks, first = {}, None
    for key in ("m_prime", "l", "delta", "m"):
        gap = _first_gap(key, avg[key], expected[key], labels)
        checks[f"avg_{key}"] = gap is None
        first = first or gap
    return OracleReport(n=n, r=r, k=k, graphs=count, checks=checks, first_discrepancy=first)


# gap probe -------------------------------------------------------------------

@dataclass
class GapReport:
    n: int
    r: int
    seed: int | str
    curve: list[dict]
    largest_psd_k: int | None
    downward_closed: bool

    def to_dict(self) -> dict:
        return _jsonable(asdict(self) | {"tool_version": __version__})


def gap_probe(n: int, r: int, seed: int, k_range: Sequence[int], graph: Graph | None = None,
              psd_tol: float = 1e-9) -> GapReport:
    """Sweep ``k`` on one graph and report the largest ``k`` with ``M'`` numerically PSD.

    Exploratory: whether PSD-ness is monotone in ``k`` is recorded, not assumed.
    """
    ks = sorted(set(int(k) for k in k_range))
    if not ks or ks[0] < 2 * r or ks[-1] > n:
        raise ValueError(f"k_range must lie within [2r, n] = [{2 * r}, {n}]")
    if binomial(n, r) > CAPACITY:
        raise CapacityError(f"C({n},{r}) exceeds the cap {CAPACITY}")
    graph = graph or sample_gnp_half(n, seed)
    parts = filled_parts(graph, r)
    curve = []
    for k in ks:
        report = is_psd(build_m_prime(graph, CertificateParams(n, r, k), parts), psd_tol)
        curve.append({"k": k, "min_eigenvalue": report.true_min,
                      "min_normalized": report.min, "psd": report.psd})
    psd_flags = [row["psd"] for row in curve]
    largest = max((row["k"] for row in curve if row["psd"]), default=None)
    closed = all(not later or earlier for earlier, later in zip(psd_flags, psd_flags[1:]))
    return GapReport(n=n, r=r, seed=seed, curve=curve, largest_psd_k=largest, downward_closed=closed)
