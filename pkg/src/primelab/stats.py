"""Empirical checks of classical prime statistics at desk scale.

Covers the prime-counting ratio, a seeded pigeonhole experiment on prime
gaps in [X, 2X), Mertens-type partial sums, the concentration of the
distinct-prime-factor count, and its Gaussian limit law. All sums that
feed assertions use math.fsum, which returns the correctly rounded total
regardless of summation order.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ValidationError
from .sieve import ArithTables, arith_tables, gap_scan, prime_count, primes_between, sieve_range

# Limit constants for the Mertens-type sums (reference targets only).
MERTENS_RECIPROCAL_CONSTANT = 0.2614972128476428  # lim sum 1/p - log log n
MERTENS_LOGP_CONSTANT = -1.3325822757332208  # lim sum log(p)/p - log n


@dataclass(frozen=True)
class StatReport:
    """One measured statistic against its theoretical target."""

    x: int
    statistic: str
    value: float
    reference: float

    @property
    def deviation(self) -> float:
        return abs(self.value - self.reference)


def reports_to_csv(reports: list[StatReport]) -> str:
    """CSV rendering, one StatReport per row."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "statistic", "value", "reference", "deviation"])
    for r in reports:
        writer.writerow([r.x, r.statistic, repr(r.value), repr(r.reference), repr(r.deviation)])
    return buf.getvalue()


def pnt_ratio(x: int) -> float:
    """pi(x) * log(x) / x; approaches 1 slowly from above."""
    if x < 10:
        raise ValidationError(f"x must be >= 10, got {x}")
    return prime_count(x) * math.log(x) / x


@dataclass(frozen=True)
class PigeonholeReport:
    """Window-sum of prime probabilities plus the true minimum gap.

    prob_sum estimates sum over 1 <= h <= H of P(n + h prime) for n drawn
    from [X, 2X). min_gap_found is the exact minimum consecutive-prime gap
    with both primes in [X, 2X + H); the window is widened by H so that
    prob_sum > 1 in exact mode forces min_gap_found <= H with no slack.
    """

    X: int
    H: int
    samples: int
    prob_sum: float
    min_gap_found: int
    exact: bool


def pigeonhole_experiment(
    X: int, H: int, samples: int, seed: int = 0, *, exact: bool = False
) -> PigeonholeReport:
    """Estimate the window-sum of prime probabilities over [X, 2X).

    In sampled mode, `samples` values of n are drawn uniformly (seeded);
    the frequency of n + h being prime estimates each term. In exact mode
    every n in [X, 2X) is counted once, making prob_sum an exact rational
    count divided by X, and the pigeonhole implication testable with zero
    tolerance.
    """
    if X < 100:
        raise ValidationError(f"X must be >= 100, got {X}")
    if H < 0:
        raise ValidationError(f"H must be >= 0, got {H}")
    if not exact and samples < 1:
        raise ValidationError(f"samples must be >= 1, got {samples}")
    table = sieve_range(X, 2 * X + H + 1)
    bits = table.primality
    if exact:
        # frequency of n + h prime over all n in [X, 2X): a popcount per h
        counts = [int(np.count_nonzero(bits[h : h + X])) for h in range(1, H + 1)]
        prob_sum = math.fsum(c / X for c in counts)
        n_used = X
    else:
        rng = np.random.default_rng(seed)
        draws = rng.integers(X, 2 * X, size=samples)
        freqs = [
            float(np.count_nonzero(bits[draws - X + h])) / samples
            for h in range(1, H + 1)
        ]
        prob_sum = math.fsum(freqs)
        n_used = samples
    scan = gap_scan(X, 2 * X + H + 1)
    return PigeonholeReport(
        X=X,
        H=H,
        samples=n_used,
        prob_sum=prob_sum,
        min_gap_found=scan.min_gap.gap,
        exact=exact,
    )


def mertens_sums(n: int) -> tuple[float, float]:
    """Deviations of the two Mertens-type prime sums from their leading terms.

    Returns (d1, d2) with
        d1 = sum_{p <= n} log(p)/p - log(n)
        d2 = sum_{p <= n} 1/p - log(log(n))
    accumulated over primes in ascending order with exact rounding.
    """
    if n < 3:
        raise ValidationError(f"n must be >= 3, got {n}")
    ps = primes_between(2, n + 1).astype(np.float64)
    d1 = math.fsum(np.log(ps) / ps) - math.log(n)
    d2 = math.fsum(1.0 / ps) - math.log(math.log(n))
    return d1, d2


def hardy_ramanujan_proportion(
    n: int, a: float, *, tables: Optional[ArithTables] = None
) -> float:
    """Fraction of N in {2..n} with |omega(N) - log log n| <= a sqrt(log log n).

    The centering uses log log n at the top of the range, so the band is
    common to every N; the proportion is nondecreasing in a.
    """
    if n < 16:
        raise ValidationError(f"n must be >= 16, got {n}")
    if not a > 0:
        raise ValidationError(f"a must be > 0, got {a}")
    if tables is None:
        tables = arith_tables(n)
    elif tables.n < n:
        raise ValidationError(f"tables cover only 1..{tables.n} < {n}")
    loglog = math.log(math.log(n))
    band = a * math.sqrt(loglog)
    om = tables.omega[2 : n + 1].astype(np.float64)
    inside = np.abs(om - loglog) <= band
    return float(np.count_nonzero(inside)) / (n - 1)


def normal_interval(a: float, b: float) -> float:
    """Standard normal probability of [a, b] via the error function."""
    if not a < b:
        raise ValidationError(f"need a < b, got a={a} b={b}")

    def cdf(z: float) -> float:
        if math.isinf(z):
            return 0.0 if z < 0 else 1.0
        return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))

    return cdf(b) - cdf(a)


@dataclass(frozen=True)
class ErdosKacReport:
    x: int
    a: float
    b: float
    empirical: float
    gaussian: float
    ks_distance: float


def erdos_kac(
    x: int,
    a: float,
    b: float,
    *,
    tables: Optional[ArithTables] = None,
    grid_points: int = 1000,
) -> ErdosKacReport:
    """Empirical law of the standardized distinct-prime-factor count.

    Standardizes omega(n) by log log n per n over 3 <= n <= x (smaller n
    have no usable normalization), compares the [a, b] mass with the
    normal law, and reports the sup-distance between the empirical CDF and
    the normal CDF over a fixed grid of `grid_points` points in [-5, 5].
    """
    if x < 16:
        raise ValidationError(f"x must be >= 16, got {x}")
    if not a < b:
        raise ValidationError(f"need a < b, got a={a} b={b}")
    if tables is None:
        tables = arith_tables(x)
    elif tables.n < x:
        raise ValidationError(f"tables cover only 1..{tables.n} < {x}")
    ns = np.arange(3, x + 1, dtype=np.float64)
    loglog = np.log(np.log(ns))
    std = (tables.omega[3 : x + 1].astype(np.float64) - loglog) / np.sqrt(loglog)
    total = std.size
    empirical = float(np.count_nonzero((std >= a) & (std <= b))) / total
    gaussian = normal_interval(a, b)

    std.sort()
    zs = np.linspace(-5.0, 5.0, grid_points)
    ecdf = np.searchsorted(std, zs, side="right") / total
    ncdf = 0.5 * (1.0 + np.array([math.erf(z / math.sqrt(2.0)) for z in zs]))
    ks = float(np.max(np.abs(ecdf - ncdf)))
    return ErdosKacReport(x=x, a=a, b=b, empirical=empirical, gaussian=gaussian, ks_distance=ks)
