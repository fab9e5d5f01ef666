"""Random binomial subsets, Rado-probability estimates and threshold fits.

Every trial draws its own generator from (master seed, trial index), so the
result of a trial never depends on scheduling. A trial keeps element i when
its uniform u_i is below p; the same trial index therefore yields nested
subsets as p grows, which keeps estimates monotone in p.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .coloring import find_proper_coloring
from .groundsets import GroundSet
from .hypergraph import from_solutions
from .matrices import IntegerMatrix, UndefinedParameterError, m_parameter
from .primes import list_k_aps, sieve_primes

Z95 = 1.959963984540054
MAX_UNKNOWN_RATE = 0.05
DEFAULT_MC_BUDGET = 10**6
CSV_COLUMNS = ("n", "p", "trials", "successes", "unknowns", "ci_lo", "ci_hi", "seed")


def trial_generator(seed: int, trial_index: int) -> np.random.Generator:
    """Counter-based Philox stream keyed by (seed, trial_index)."""
    if seed < 0 or trial_index < 0:
        raise ValueError("seed and trial index must be non-negative")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial_index])))


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return p


def sample_subset(S: GroundSet, p: float, seed: int, trial_index: int = 0) -> GroundSet:
    """S_p: each element kept independently with probability p."""
    p = _check_p(p)
    u = trial_generator(seed, trial_index).random(S.size)
    return S.subset(np.flatnonzero(u < p).tolist())


@dataclass(frozen=True)
class TrialRecord:
    seed: int
    trial_index: int
    p: float
    size: int
    verdict: str
    elapsed: float = field(default=0.0, compare=False)


def run_trial(A: IntegerMatrix, S: GroundSet, r: int, p: float, seed: int, trial_index: int,
              budget_nodes: int = DEFAULT_MC_BUDGET) -> TrialRecord:
    start = time.perf_counter()
    sub = sample_subset(S, p, seed, trial_index)
    if sub.size == 0:
        verdict = "not_rado"
    else:
        H = from_solutions(A, sub)
        verdict = "not_rado" if H.e == 0 else find_proper_coloring(H, r, budget_nodes).verdict
    return TrialRecord(seed, trial_index, p, sub.size, verdict, time.perf_counter() - start)


def wilson_interval(successes: int, n: int, z: float = Z95) -> Tuple[float, float]:
    if n == 0:
        return (0.0, 1.0)
    phat = successes / n
    denom = 1 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    # The endpoints are exactly 0 and 1 at the extremes; avoid rounding there.
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == n else min(1.0, centre + half)
    return (lo, hi)


@dataclass
class RadoEstimate:
    n: int
    p: float
    trials: int
    successes: int
    unknowns: int
    ci_lo: float
    ci_hi: float
    seed: int
    records: List[TrialRecord] = field(default_factory=list, repr=False)

    @property
    def decided(self) -> int:
        return self.trials - self.unknowns

    @property
    def estimate(self) -> float:
        return self.successes / self.decided if self.decided else float("nan")

    @property
    def unknown_rate(self) -> float:
        return self.unknowns / self.trials if self.trials else 0.0

    def csv_row(self) -> List[str]:
        return [str(self.n), repr(self.p), str(self.trials), str(self.successes), str(self.unknowns),
                repr(self.ci_lo), repr(self.ci_hi), str(self.seed)]


class VerdictCache:
    """Decided verdicts per trial index for one (A, S, r, seed).

    Samples of one trial index are nested in p and the Rado property is
    monotone under inclusion, so a rado verdict at p carries to every larger
    p and a not_rado verdict to every smaller p.
    """

    def __init__(self) -> None:
        self._rado: Dict[int, float] = {}
        self._not_rado: Dict[int, float] = {}

    def lookup(self, trial_index: int, p: float) -> Optional[str]:
        if self._rado.get(trial_index, math.inf) <= p:
            return "rado"
        if self._not_rado.get(trial_index, -math.inf) >= p:
            return "not_rado"
        return None

    def record(self, rec: TrialRecord) -> None:
        i = rec.trial_index
        if rec.verdict == "rado":
            self._rado[i] = min(self._rado.get(i, math.inf), rec.p)
        elif rec.verdict == "not_rado":
            self._not_rado[i] = max(self._not_rado.get(i, -math.inf), rec.p)


def run_trials(A: IntegerMatrix, S: GroundSet, r: int, p: float, trials: int, seed: int,
               budget_nodes: int = DEFAULT_MC_BUDGET, workers: int = 1,
               cache: Optional[VerdictCache] = None) -> List[TrialRecord]:
    """Trials 0..trials-1, returned in trial-index order whatever the worker count."""
    if trials < 1:
        raise ValueError("trials must be >= 1")

    def one(i: int) -> TrialRecord:
        known = cache.lookup(i, p) if cache is not None else None
        if known is not None:
            return TrialRecord(seed, i, p, sample_subset(S, p, seed, i).size, known, 0.0)
        return run_trial(A, S, r, p, seed, i, budget_nodes)

    if workers <= 1:
        records = [one(i) for i in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, range(trials)))
    if cache is not None:
        for rec in records:
            cache.record(rec)
    return records


def estimate_rado_prob(A: IntegerMatrix, S: GroundSet, r: int, p: float, trials: int, seed: int,
                       budget_nodes: int = DEFAULT_MC_BUDGET, workers: int = 1,
                       cache: Optional[VerdictCache] = None) -> RadoEstimate:
    """Fraction of rado verdicts among decided trials, with a Wilson 95% interval."""
    p = _check_p(p)
    records = run_trials(A, S, r, p, trials, seed, budget_nodes, workers, cache)
    successes = sum(rec.verdict == "rado" for rec in records)
    unknowns = sum(rec.verdict == "unknown" for rec in records)
    lo, hi = wilson_interval(successes, trials - unknowns)
    return RadoEstimate(S.size, p, trials, successes, unknowns, lo, hi, seed, records)


# ---------------------------------------------------------------------------
# Threshold location


@dataclass
class MemberFit:
    n: int
    spec: str
    reference_exponent: Optional[float]
    p_lo: Optional[float] = None
    p_hi: Optional[float] = None
    p_half: Optional[float] = None
    points: List[RadoEstimate] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def usable(self) -> bool:
        """The bracket around the crossing excludes 0 and 1."""
        return self.error is None and self.p_half is not None and self.p_lo > 0 and self.p_hi < 1


@dataclass
class ThresholdFit:
    members: List[MemberFit]
    slope: Optional[float]
    slope_se: Optional[float]
    intercept: Optional[float]
    reference_slope: Optional[float]

    def csv_rows(self) -> List[List[str]]:
        return [pt.csv_row() for m in self.members for pt in m.points]

    def summary(self) -> Dict[str, object]:
        return {
            "slope": self.slope,
            "slope_se": self.slope_se,
            "intercept": self.intercept,
            "reference_slope": self.reference_slope,
            "members": [
                {
                    "n": m.n,
                    "ground": m.spec,
                    "p_half": m.p_half,
                    "ci": [m.p_lo, m.p_hi],
                    "usable": m.usable,
                    "reference_exponent": m.reference_exponent,
                    "points": len(m.points),
                    "error": m.error,
                }
                for m in self.members
            ],
        }


def _reference_exponent(A: IntegerMatrix, S: GroundSet) -> Optional[float]:
    try:
        return -1.0 / float(m_parameter(A, S))
    except (UndefinedParameterError, ZeroDivisionError):
        return None


def _crossing(lo: RadoEstimate, hi: RadoEstimate) -> float:
    """Interpolate the 0.5 crossing linearly in log p."""
    a, b = lo.estimate, hi.estimate
    if b == a:
        return math.sqrt(lo.p * hi.p)
    t = (0.5 - a) / (b - a)
    t = min(1.0, max(0.0, t))
    return math.exp(math.log(lo.p) + t * (math.log(hi.p) - math.log(lo.p)))


def locate_half(A: IntegerMatrix, S: GroundSet, r: int, trials: int, seed: int,
                budget_nodes: int = DEFAULT_MC_BUDGET, workers: int = 1, ratio: float = 1.2,
                start_p: Optional[float] = None, max_points: int = 60,
                on_point: Optional[Callable[[RadoEstimate], None]] = None) -> MemberFit:
    """Bracket the probability-1/2 crossing within a factor ``ratio`` by
    doubling/halving from the reference point and then bisecting in log p."""
    ref = _reference_exponent(A, S)
    fit = MemberFit(S.size, S.spec, ref)
    if start_p is None:
        start_p = min(1.0, S.size ** ref) if ref is not None else 0.5
    floor = 1.0 / (1000.0 * max(S.size, 1))
    cache = VerdictCache()

    def at(p: float) -> RadoEstimate:
        if len(fit.points) >= max_points:
            raise RuntimeError(f"no bracket within {max_points} points")
        est = estimate_rado_prob(A, S, r, p, trials, seed, budget_nodes, workers, cache)
        fit.points.append(est)
        if on_point is not None:
            on_point(est)
        if est.unknown_rate > MAX_UNKNOWN_RATE:
            raise RuntimeError(f"unknown rate {est.unknown_rate:.3f} at p={p:.6g} exceeds {MAX_UNKNOWN_RATE}")
        return est

    try:
        first = at(start_p)
        if first.estimate >= 0.5:
            hi = first
            lo = at(hi.p / 2)
            while lo.estimate >= 0.5:
                if lo.p < floor:
                    raise RuntimeError("estimate stays above 1/2 as p -> 0")
                hi, lo = lo, at(lo.p / 2)
        else:
            lo = first
            if lo.p >= 1.0:
                raise RuntimeError("S itself is not Rado with probability >= 1/2")
            hi = at(min(1.0, lo.p * 2))
            while hi.estimate < 0.5:
                if hi.p >= 1.0:
                    raise RuntimeError("estimate stays below 1/2 up to p = 1")
                lo, hi = hi, at(min(1.0, hi.p * 2))
        while hi.p / lo.p > ratio:
            mid = at(math.sqrt(lo.p * hi.p))
            if mid.estimate >= 0.5:
                hi = mid
            else:
                lo = mid
    except RuntimeError as exc:
        fit.error = str(exc)
        return fit
    fit.p_lo, fit.p_hi = lo.p, hi.p
    fit.p_half = _crossing(lo, hi)
    return fit


def least_squares(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float, float]:
    """Slope, intercept and slope standard error (nan with two points)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two points for a slope")
    (slope, intercept), *_ = np.linalg.lstsq(np.column_stack([x, np.ones_like(x)]), y, rcond=None)
    if x.size > 2:
        resid = y - (slope * x + intercept)
        se = math.sqrt(float(resid @ resid) / (x.size - 2) / float(((x - x.mean()) ** 2).sum()))
    else:
        se = float("nan")
    return float(slope), float(intercept), se


def threshold_fit(A: IntegerMatrix, family: Sequence[GroundSet], r: int, trials: int, seed: int,
                  budget_nodes: int = DEFAULT_MC_BUDGET, workers: int = 1, ratio: float = 1.2,
                  on_point: Optional[Callable[[RadoEstimate], None]] = None) -> ThresholdFit:
    """Slope of log p_half against log |S| over the family."""
    if len(family) < 3:
        raise ValueError("threshold_fit needs a family of at least 3 ground sets")
    members = [locate_half(A, S, r, trials, seed, budget_nodes, workers, ratio, on_point=on_point) for S in family]
    good = [m for m in members if m.usable]
    refs = [m.reference_exponent for m in members if m.reference_exponent is not None]
    reference = refs[-1] if refs else None
    if len(good) < 2:
        return ThresholdFit(members, None, None, None, reference)
    slope, intercept, se = least_squares([math.log(m.n) for m in good], [math.log(m.p_half) for m in good])
    return ThresholdFit(members, slope, se, intercept, reference)


def write_csv(rows: Sequence[Sequence[str]], handle=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(rows)
    text = buf.getvalue()
    if handle is not None:
        handle.write(text)
    return text


# ---------------------------------------------------------------------------
# Second moment of the k-AP count in a random subset of the primes


@dataclass
class SecondMoment:
    n: int
    k: int
    p: Fraction
    ap_count: int
    expectation: Fraction
    shared: Dict[int, int]
    variance: Fraction
    variance_bound: Fraction
    simulated_mean: float
    simulated_se: float
    trials: int

    @property
    def pairs_one(self) -> int:
        """Unordered pairs of distinct APs sharing exactly one prime."""
        return self.shared.get(1, 0)

    @property
    def pairs_two_plus(self) -> int:
        return sum(c for j, c in self.shared.items() if j >= 2)

    def summary(self) -> Dict[str, object]:
        d = asdict(self)
        for key in ("p", "expectation", "variance", "variance_bound"):
            d[key] = str(d[key])
        d["shared"] = {str(j): c for j, c in self.shared.items()}
        return d


def _as_probability(p: Union[float, Fraction, str]) -> Fraction:
    q = Fraction(str(p)) if isinstance(p, float) else Fraction(p)
    if not 0 <= q <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return q


def shared_histogram(aps: np.ndarray) -> Dict[int, int]:
    """Unordered pairs of distinct APs counted by the number of shared terms."""
    m, k = aps.shape
    hist: Dict[int, int] = {}
    if m == 0:
        return hist
    flat = aps.ravel()
    order = np.argsort(flat, kind="stable")
    owner = order // k
    values, starts = np.unique(flat[order], return_index=True)
    ends = np.append(starts[1:], flat.size)
    pos = {int(v): (int(s), int(e)) for v, s, e in zip(values, starts, ends)}
    for a in range(m):
        parts = [owner[slice(*pos[int(v)])] for v in aps[a]]
        nb = np.concatenate(parts)
        nb = nb[nb > a]
        if nb.size == 0:
            continue
        _, counts = np.unique(nb, return_counts=True)
        for j, c in zip(*np.unique(counts, return_counts=True)):
            hist[int(j)] = hist.get(int(j), 0) + int(c)
    return dict(sorted(hist.items()))


def ap_second_moment(n: int, k: int, p: Union[float, Fraction, str], trials: int = 1000, seed: int = 0) -> SecondMoment:
    """E[X], Var(X) and a simulated mean for X = #k-APs in the random set P_{n,p}."""
    if k < 3:
        raise ValueError("k must be >= 3")
    q = _as_probability(p)
    P = sieve_primes(n)
    aps = list_k_aps(P, k)
    m = len(aps)
    expectation = m * q**k
    hist = shared_histogram(aps)
    var = m * (q**k - q ** (2 * k))
    bound = expectation
    for j, c in hist.items():
        var += 2 * c * (q ** (2 * k - j) - q ** (2 * k))
        bound += 2 * c * q ** (2 * k - j)
    idx = np.searchsorted(P.primes, aps) if m else np.zeros((0, k), dtype=np.int64)
    pf = float(q)
    xs = np.empty(trials, dtype=float)
    for t in range(trials):
        keep = trial_generator(seed, t).random(P.count) < pf
        xs[t] = keep[idx].all(axis=1).sum() if m else 0
    mean = float(xs.mean()) if trials else float("nan")
    se = float(xs.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("nan")
    return SecondMoment(n, k, q, m, expectation, hist, var, bound, mean, se, trials)


def fit_summary_json(fit: ThresholdFit, config: Dict[str, object]) -> str:
    return json.dumps({"config": config, **fit.summary()}, indent=2, sort_keys=True)
