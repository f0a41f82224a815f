"""Welch's t-test and the Mann-Whitney U test.

Implemented from the textbook formulas on top of special functions
(regularized incomplete beta for the Student-t tail, erfc for the
normal tail) so results stay reproducible and dependency-light.
Degenerate zero-variance inputs resolve by convention instead of
raising: identical data is a p=1 answer, not a crash.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc


@dataclass
class TTestResult:
    t: float
    df: float
    p: float
    kind: str  # two-sample | one-sample
    degenerate: bool = False

    def to_json_dict(self) -> dict:
        return {"t": self.t, "df": self.df, "p": self.p, "kind": self.kind}


@dataclass
class MannWhitneyResult:
    u: float  # U statistic of the first sample (pairs a > b, ties half)
    z: float
    p: float
    degenerate: bool = False

    def to_json_dict(self) -> dict:
        return {"U": self.u, "z": self.z, "p": self.p}


def student_t_two_sided_p(t: float, df: float) -> float:
    """Two-sided tail probability of Student's t via the regularized
    incomplete beta identity."""
    if df <= 0 or math.isnan(t):
        return float("nan")
    if math.isinf(t):
        return 0.0
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def normal_two_sided_p(z: float) -> float:
    return float(math.erfc(abs(z) / math.sqrt(2.0)))


def welch_ttest(sample_a, sample_b=None, mu0: float = 0.0) -> TTestResult:
    """Welch's unequal-variance t-test, or a one-sample test against mu0
    when sample_b is omitted.

    Zero-variance conventions: equal means give p=1, unequal means give
    p=0 with the degenerate flag set.
    """
    a = np.asarray(sample_a, dtype=np.float64)
    if a.size < 2:
        raise ValueError("need at least 2 observations in the first sample")

    if sample_b is None:
        mean = float(a.mean())
        var = float(a.var(ddof=1))
        n = a.size
        df = float(n - 1)
        if var == 0.0:
            if mean == mu0:
                return TTestResult(t=0.0, df=df, p=1.0, kind="one-sample", degenerate=True)
            return TTestResult(
                t=math.copysign(math.inf, mean - mu0), df=df, p=0.0, kind="one-sample", degenerate=True
            )
        t = (mean - mu0) / math.sqrt(var / n)
        return TTestResult(t=t, df=df, p=student_t_two_sided_p(t, df), kind="one-sample")

    b = np.asarray(sample_b, dtype=np.float64)
    if b.size < 2:
        raise ValueError("need at least 2 observations in the second sample")
    mean_a, mean_b = float(a.mean()), float(b.mean())
    var_a, var_b = float(a.var(ddof=1)), float(b.var(ddof=1))
    na, nb = a.size, b.size
    se2 = var_a / na + var_b / nb
    if se2 == 0.0:
        if mean_a == mean_b:
            return TTestResult(t=0.0, df=float(na + nb - 2), p=1.0, kind="two-sample", degenerate=True)
        return TTestResult(
            t=math.copysign(math.inf, mean_a - mean_b),
            df=float(na + nb - 2),
            p=0.0,
            kind="two-sample",
            degenerate=True,
        )
    t = (mean_a - mean_b) / math.sqrt(se2)
    # Welch-Satterthwaite effective degrees of freedom
    df = se2 * se2 / (
        (var_a / na) ** 2 / (na - 1) + (var_b / nb) ** 2 / (nb - 1)
    )
    return TTestResult(t=t, df=df, p=student_t_two_sided_p(t, df), kind="two-sample")


def _midranks(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ranks 1..N with tied values sharing their average rank.

    Also returns the tie-group sizes needed for the variance correction.
    """
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.float64)
    tie_sizes = []
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        tie_sizes.append(j - i + 1)
        i = j + 1
    return ranks, np.asarray(tie_sizes, dtype=np.float64)


def mann_whitney_u(sample_a, sample_b) -> MannWhitneyResult:
    """Rank-sum U with midrank ties, tie-corrected normal approximation,
    and continuity correction; two-sided p.

    U counts pairs where a > b (ties count half), i.e. U_A = R_A -
    n_A(n_A+1)/2 from the combined midranks.
    """
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    na, nb = a.size, b.size
    combined = np.concatenate([a, b])
    ranks, tie_sizes = _midranks(combined)
    u_a = float(ranks[:na].sum() - na * (na + 1) / 2.0)

    n = na + nb
    tie_term = float((tie_sizes**3 - tie_sizes).sum())
    var = na * nb / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0.0:
        # every observation identical: no evidence either way
        return MannWhitneyResult(u=u_a, z=0.0, p=1.0, degenerate=True)

    mu = na * nb / 2.0
    shift = abs(u_a - mu) - 0.5  # continuity correction toward the mean
    zmag = max(shift, 0.0) / math.sqrt(var)
    z = math.copysign(zmag, u_a - mu) if u_a != mu else 0.0
    return MannWhitneyResult(u=u_a, z=z, p=min(1.0, normal_two_sided_p(zmag)))


def summarize(values) -> dict:
    """Five-number-style summary used by grouping reports."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return {"count": 0, "mean": None, "median": None, "q1": None, "q3": None}
    return {
        "count": int(arr.size),
        "mean": float(arr.mean()),
        "median": float(np.median(arr)),
        "q1": float(np.percentile(arr, 25)),
        "q3": float(np.percentile(arr, 75)),
    }
