"""
Monte Carlo experiment runner for size and power studies.

Every replication draws its data from its own stream derived from
``(master_seed, scenario key, replication index)``, and results are combined
by integer tallies, so a table is bit-identical whatever the number of
worker threads.
"""

import csv
import io
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .combine import run_all_tests
from .distributions import as_generator
from .maxtest import _centering
from .simulate import Scenario, ScenarioConfig, SignalSpec
from .twosample import METHODS, TwoSampleClr

logger = logging.getLogger(__name__)

TABLE_SCHEMA_VERSION = 1
_ROW_FIELDS = ("cov_family", "rho", "framework", "n1", "n2", "p", "sparsity_fraction",
               "target_ratio")


def default_threads():
    """Worker count from ``COMPTEST_THREADS``, else 1."""
    value = os.environ.get("COMPTEST_THREADS")
    if not value:
        return 1
    threads = int(value)
    if threads < 1:
        raise ValueError(f"COMPTEST_THREADS must be >= 1, got {value!r}")
    return threads


def _map(fn, items, threads):
    if threads is None:
        threads = default_threads()
    if threads <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass
class ReplicationRecord:
    """Raw component statistics of one replication."""

    max_stat: float
    quad_stat: float
    p_max: float
    p_quad: float
    rejects: dict


def _replicate(scenario, rep, weights):
    cfg = scenario.cfg
    res = run_all_tests(scenario.sample(rep), cfg.alpha, weights)
    return ReplicationRecord(res["max"].statistic, res["quad"].statistic,
                             res["max"].p_value, res["quad"].p_value,
                             {m: r.reject for m, r in res.items()})


def simulate_records(cfg, threads=None, weights=None):
    """Run all replications of a scenario and keep per-replication statistics.

    Returns
    -------
    records : list
        ``ReplicationRecord`` per replication, or ``None`` where a component
        raised (degenerate variance and the like).
    errors : list of (int, str)
        Replication index and message for each failure.
    """
    scenario = Scenario(cfg)
    # build shared ingredients before any worker touches them
    scenario.factor, scenario.means  # noqa: B018

    def one(rep):
        try:
            return _replicate(scenario, rep, weights), None
        except (ValueError, np.linalg.LinAlgError) as exc:
            return None, (rep, f"{type(exc).__name__}: {exc}")

    pairs = _map(one, range(cfg.replications), threads)
    records = [r for r, _ in pairs]
    errors = [e for _, e in pairs if e is not None]
    for rep, msg in errors:
        logger.warning("replication %d of %s failed: %s", rep, cfg.key(), msg)
    return records, errors


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    counts: dict
    errors: list = field(default_factory=list)

    @property
    def rates(self):
        return {m: c / self.config.replications for m, c in self.counts.items()}


def run_scenario(cfg, threads=None, weights=None):
    """Empirical rejection counts of the four tests for one scenario.

    Failed replications are not counted as rejections and are listed in
    ``errors``; a healthy run has none.
    """
    records, errors = simulate_records(cfg, threads, weights)
    counts = {m: sum(1 for r in records if r is not None and r.rejects[m]) for m in METHODS}
    return ScenarioResult(cfg, counts, errors)


@dataclass
class RejectionTable:
    """Rejection rates for a grid of scenarios, one row per scenario."""

    rows: list
    methods: tuple = METHODS

    @property
    def n_errors(self):
        return sum(len(r.errors) for r in self.rows)

    def records(self):
        out = []
        for res in self.rows:
            cfg = res.config
            rec = dict(zip(_ROW_FIELDS, cfg.key()))
            rec.update(alpha=cfg.alpha, replications=cfg.replications,
                       master_seed=cfg.master_seed, errors=len(res.errors))
            rec.update({m: res.counts[m] / cfg.replications for m in self.methods})
            out.append(rec)
        return out

    def to_csv(self):
        buf = io.StringIO()
        records = self.records()
        writer = csv.DictWriter(buf, fieldnames=list(records[0]), lineterminator="\n")
        writer.writeheader()
        for rec in records:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in rec.items()})
        return buf.getvalue()

    def to_json(self):
        payload = {
            "version": TABLE_SCHEMA_VERSION,
            "methods": list(self.methods),
            "rows": [
                {"config": res.config.to_dict(), "counts": res.counts,
                 "rates": res.rates, "errors": [list(e) for e in res.errors]}
                for res in self.rows
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        payload = json.loads(text)
        rows = [ScenarioResult(ScenarioConfig.from_dict(r["config"]), r["counts"],
                               [tuple(e) for e in r["errors"]])
                for r in payload["rows"]]
        return cls(rows, tuple(payload["methods"]))

    def lookup(self, **key):
        """Rates of the single row matching the given key fields."""
        hits = [rec for rec in self.records()
                if all(rec[k] == v for k, v in key.items())]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} rows match {key}")
        return {m: hits[0][m] for m in self.methods}


def run_grid(cfgs, threads=None, weights=None):
    """Run a list of scenarios; rows keep the input order."""
    cfgs = list(cfgs)
    if not cfgs:
        raise ValueError("empty scenario grid")
    return RejectionTable([run_scenario(c, threads, weights) for c in cfgs])


def expand_grid(base, sizes, sparsities, cov_specs=None, frameworks=None):
    """Cartesian product of scenario settings.

    Parameters
    ----------
    base : dict
        Keyword arguments shared by every ScenarioConfig (alpha,
        replications, master_seed ...).
    sizes : iterable of (n1, n2, p)
    sparsities : iterable of float
    cov_specs : iterable of CovarianceSpec or dict, optional
    frameworks : iterable of str, optional
    """
    sizes, sparsities = list(sizes), list(sparsities)
    if not sizes:
        raise ValueError("empty size grid")
    if not sparsities:
        raise ValueError("empty sparsity grid")
    cov_specs = list(cov_specs) if cov_specs is not None else [base.get("cov", {})]
    frameworks = list(frameworks) if frameworks is not None else [base.get("framework", "gaussian")]
    shared = {k: v for k, v in base.items() if k not in ("cov", "framework", "signal")}
    target = dict(base.get("signal", {})).get("target_ratio", 0.1)
    return [
        ScenarioConfig(n1=n1, n2=n2, p=p, cov=cov, framework=fw,
                       signal=SignalSpec(float(s), target), **shared)
        for cov in cov_specs for fw in frameworks for (n1, n2, p) in sizes for s in sparsities
    ]


@dataclass
class PermutationStudy:
    n1: int
    n2: int
    n_perms: int
    alpha: float
    counts: dict
    errors: list = field(default_factory=list)

    @property
    def rates(self):
        return {m: c / self.n_perms for m, c in self.counts.items()}

    def to_dict(self):
        return {"n1": self.n1, "n2": self.n2, "n_perms": self.n_perms, "alpha": self.alpha,
                "counts": self.counts, "rates": self.rates,
                "errors": [list(e) for e in self.errors]}


def permutation_size_study(data, n1, n2, n_perms=1000, alpha=0.05, rng=None,
                           weights=None, threads=None):
    """Empirical size of the four tests under random relabelling.

    All samples are pooled; each iteration draws a uniformly random split
    into groups of sizes `n1` and `n2` and runs every test.

    Parameters
    ----------
    data : TwoSampleClr or array_like
        Source samples; a TwoSampleClr is pooled first.
    n1, n2 : int
        Group sizes, summing to the pooled sample count.
    n_perms : int
    alpha : float
    rng : RngStream, int or None
    """
    pooled = data.pooled() if isinstance(data, TwoSampleClr) else np.asarray(data, dtype=float)
    n = pooled.shape[0]
    if n1 + n2 != n:
        raise ValueError(f"split {n1}:{n2} does not add up to the {n} pooled samples")
    if n_perms < 1:
        raise ValueError(f"n_perms must be >= 1, got {n_perms}")
    # draw all label assignments up front so threading cannot reorder them
    gen = as_generator(rng)
    orders = [gen.permutation(n) for _ in range(n_perms)]

    def one(order):
        try:
            split = TwoSampleClr(pooled[order[:n1]], pooled[order[n1:]])
            res = run_all_tests(split, alpha, weights)
            return {m: r.reject for m, r in res.items()}, None
        except ValueError as exc:
            return None, f"{type(exc).__name__}: {exc}"

    outcomes = _map(one, orders, threads)
    counts = {m: sum(1 for o, _ in outcomes if o is not None and o[m]) for m in METHODS}
    errors = [(i, e) for i, (_, e) in enumerate(outcomes) if e is not None]
    return PermutationStudy(n1, n2, n_perms, alpha, counts, errors)


def joint_rejection_ratio(p_max, p_quad, alpha):
    """``P(both reject) / (P(max rejects) + P(quad rejects))`` from paired p-values.

    Returns
    -------
    ratio : float or None
        None when neither test rejects at all.
    joint, marginal_max, marginal_quad : float
    """
    p_max, p_quad = np.asarray(p_max), np.asarray(p_quad)
    rm, rq = p_max <= alpha, p_quad <= alpha
    joint = float(np.mean(rm & rq))
    marg_m, marg_q = float(np.mean(rm)), float(np.mean(rq))
    denom = marg_m + marg_q
    return (joint / denom if denom > 0 else None), joint, marg_m, marg_q


def independence_diagnostic(cfg, alphas=(0.01, 0.05, 0.1), threads=None):
    """Check that the maximum and quadratic tests reject nearly independently.

    For each level a, estimates
    ``P(p_Q <= a, p_M <= a) / (P(p_Q <= a) + P(p_M <= a))``, which is close
    to a / 2 when the two p-values are independent and uniform, together
    with the correlation between Q and the centred maximum statistic.

    Returns
    -------
    dict
        ``{"ratios": {a: ratio or None}, "joint": ..., "marginal_max": ...,
        "marginal_quad": ..., "correlation": r, "replications": n,
        "errors": k}``. A ratio is ``None`` when neither test ever rejected.
    """
    if cfg.signal.sparsity_fraction != 0:
        raise ValueError("independence diagnostic needs a null scenario (zero signal)")
    records, errors = simulate_records(cfg, threads)
    good = [r for r in records if r is not None]
    pm = np.array([r.p_max for r in good])
    pq = np.array([r.p_quad for r in good])
    m_centred = np.array([r.max_stat for r in good]) - _centering(cfg.p)
    q = np.array([r.quad_stat for r in good])
    out = {"ratios": {}, "joint": {}, "marginal_max": {}, "marginal_quad": {},
           "replications": len(good), "errors": len(errors)}
    for a in alphas:
        ratio, joint, marg_m, marg_q = joint_rejection_ratio(pm, pq, a)
        out["ratios"][a] = ratio
        out["joint"][a], out["marginal_max"][a], out["marginal_quad"][a] = joint, marg_m, marg_q
    out["correlation"] = float(np.corrcoef(q, m_centred)[0, 1])
    return out


def region_signal(cfg, region, eps0=1.0, support=None):
    """Difference vector placed on the boundary of a dense or sparse power region.

    The direction is an equal-valued vector on `support` (default: the
    scenario's own random support). It is then scaled so that

    * ``region="sparse"``: the largest CLR mean difference, standardized by
      the diagonal of ``G Omega~ G`` with ``Omega~ = (1 + n1/n2) Omega``,
      equals ``sqrt((2 + eps0) log p / n1)``;
    * ``region="dense"``: ``n1^2 ||G d||^4 / (n1 d' G Omega~ G d +
      tr((G Omega~ G)^2))`` equals ``eps0 log(n1 + n2)``.

    Returns
    -------
    numpy.ndarray
        The log-basis mean of group 2 (group 1 stays at zero).
    """
    scenario = Scenario(cfg)
    n1, n2, p = cfg.n1, cfg.n2, cfg.p
    if support is None:
        _, nu2 = scenario.means
        support = np.flatnonzero(nu2)
    if len(support) == 0:
        raise ValueError("region signal needs a nonempty support")
    v = np.zeros(p)
    v[np.asarray(support)] = 1.0
    omega_t = (1.0 + n1 / n2) * scenario.cov
    # G Omega~ G via row/column centering
    gog = omega_t - omega_t.mean(axis=0, keepdims=True)
    gog = gog - gog.mean(axis=1, keepdims=True)
    gv = v - v.mean()
    if region == "sparse":
        r = np.max(np.abs(gv) / np.sqrt(np.diag(gog)))
        scale = np.sqrt((2.0 + eps0) * np.log(p) / n1) / r
    elif region == "dense":
        big_a = gv @ gv
        big_b = gv @ gog @ gv
        big_c = np.sum(gog * gog)
        level = eps0 * np.log(n1 + n2)
        # solve n1^2 A^2 u^2 - L n1 B u - L C = 0 for u = scale^2
        qa, qb, qc = n1 ** 2 * big_a ** 2, -level * n1 * big_b, -level * big_c
        u = (-qb + np.sqrt(qb ** 2 - 4 * qa * qc)) / (2 * qa)
        scale = np.sqrt(u)
    else:
        raise ValueError(f"region must be 'sparse' or 'dense', got {region!r}")
    return scale * v


class _FixedMeanScenario(Scenario):
    def __init__(self, cfg, nu2):
        super().__init__(cfg)
        self._nu2 = nu2

    @property
    def means(self):
        return np.zeros(self.cfg.p), self._nu2


def power_region_check(cfg, region="sparse", eps0=1.0, threads=None, weights=None):
    """Rejection rates for a signal on the boundary of a power region.

    The support is taken from ``cfg.signal`` (its magnitude is replaced by
    the region calibration); a zero-signal config just measures size.

    Returns
    -------
    dict
        Method -> rejection fraction; the consistency claim concerns
        ``"fisher"``.
    """
    if cfg.signal.sparsity_fraction == 0:
        return run_scenario(cfg, threads, weights).rates
    nu2 = region_signal(cfg, region, eps0)
    scenario = _FixedMeanScenario(cfg, nu2)
    scenario.factor  # noqa: B018
    outcomes = _map(lambda r: _replicate(scenario, r, weights).rejects,
                    range(cfg.replications), threads)
    return {m: sum(o[m] for o in outcomes) / cfg.replications for m in METHODS}
