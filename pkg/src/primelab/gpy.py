"""Divisor-weighted sums over [x, 2x) for an admissible tuple.

The weight f(n) squares a truncated Mobius-smoothed divisor sum over
d <= x^b dividing the product of the shifted values n + h_i. The module
computes the weighted count of prime tuple entries two independent ways
(a direct scan over n and a rearranged double sum over divisor pairs with
residue-class counts), the arithmetic-progression remainder terms those
sums hide, and empirical level-of-distribution error sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConsistencyError, ValidationError
from .sieve import mangoldt_range, primes_between, sieve_range
from .tuples import AdmissibleTuple

# Level exponent sufficient for the remainder sum to stay negligible in
# Zhang's bounded-gap argument. Recorded as context; nothing here depends
# on it and nothing here proves it.
ZHANG_LEVEL_EXPONENT = 0.25 + 1.0 / 1168.0

SupportArrays = tuple[np.ndarray, np.ndarray, np.ndarray]


def _mobius_small(d: int) -> int:
    """mu(d) by trial division; meant for the small divisor ranges here."""
    if d < 1:
        raise ValidationError(f"d must be >= 1, got {d}")
    mu, m, p = 1, d, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            mu = -mu
        p += 1
    if m > 1:
        mu = -mu
    return mu


def _totient_small(d: int) -> int:
    m, result, p = d, d, 2
    while p * p <= m:
        if m % p == 0:
            result -= result // p
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _prime_factors(d: int) -> list[int]:
    out, m, p = [], d, 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return out


@dataclass(frozen=True)
class GpyParams:
    """Parameters of one weighted-sum run.

    k is the tuple length, l >= 1 the smoothing exponent, b in (0, 1/2)
    the truncation exponent (divisors run to x^b), x the scale.
    """

    k: int
    l: int
    b: float
    x: int
    tuple: AdmissibleTuple

    def __post_init__(self):
        if not 0 < self.b < 0.5:
            raise ValidationError(f"b must lie in (0, 1/2), got {self.b}")
        if self.l < 1:
            raise ValidationError(f"l must be >= 1, got {self.l}")
        if self.x < 100:
            raise ValidationError(f"x must be >= 100, got {self.x}")
        if self.k != self.tuple.k:
            raise ValidationError(
                f"k={self.k} does not match tuple length {self.tuple.k}"
            )

    @property
    def D_limit(self) -> int:
        """floor(x^b); a 1e-9 slack absorbs float pow error at integer values."""
        return int(self.x**self.b + 1e-9)


@dataclass(frozen=True)
class GpyReport:
    """S1 = sum of f(n), S2 = sum of f(n) times the prime count in the tuple.

    S2_theta is the log-weighted variant of S2 (each prime counted with
    weight log(n + h_i)); reported side by side, never asserted equal.
    """

    params: GpyParams
    S1: float
    S2: float
    objective: float
    S2_theta: float
    D_limit: int
    E: Optional[float] = None


def lambda_d(d: int, params: GpyParams) -> float:
    """Weight mu(d) * (log(x^b / d))^(k+l) / (k+l)! for d <= x^b."""
    if d < 1 or d > params.D_limit:
        raise ValidationError(
            f"d must satisfy 1 <= d <= {params.D_limit}, got {d}"
        )
    mu = _mobius_small(d)
    if mu == 0:
        return 0.0
    logterm = max(params.b * math.log(params.x) - math.log(d), 0.0)
    e = params.k + params.l
    return mu * logterm**e / math.factorial(e)


def _divides_shifted_product(d: int, n: int, offsets: tuple[int, ...]) -> bool:
    """d | (n+h_1)...(n+h_k), via gcd accumulation (no big products)."""
    rem = d
    for h in offsets:
        rem //= math.gcd(rem, n + h)
        if rem == 1:
            return True
    return rem == 1


def f_weight(n: int, params: GpyParams) -> float:
    """Squared divisor sum at one n in [x, 2x)."""
    if not params.x <= n < 2 * params.x:
        raise ValidationError(f"n must lie in [x, 2x) = [{params.x}, {2 * params.x})")
    inner = math.fsum(
        lambda_d(d, params)
        for d in range(1, params.D_limit + 1)
        if _divides_shifted_product(d, n, params.tuple.offsets)
    )
    return inner * inner


def _count_in_class(lo: int, hi: int, r: int, m: int) -> int:
    """#{n in [lo, hi): n = r mod m}, exact."""
    return (hi - 1 - r) // m - (lo - 1 - r) // m


def _valid_residues(m: int, offsets: tuple[int, ...]) -> list[int]:
    """Residues r mod m with m | (r+h_1)...(r+h_k), for squarefree m, via CRT."""
    residues = [0]
    mod = 1
    for p in _prime_factors(m):
        roots = sorted({(-h) % p for h in offsets})
        new = []
        for r in residues:
            for s in roots:
                # CRT for coprime (mod, p)
                inv = pow(mod, -1, p)
                t = (s - r) * inv % p
                new.append(r + mod * t)
        residues = new
        mod *= p
    return sorted(residues)


def weighted_sums(
    params: GpyParams,
    *,
    rel_tol: float = 1e-9,
    with_error_sum: bool = False,
    error_index: int = 1,
) -> GpyReport:
    """Compute S1 and S2 two independent ways and insist they agree.

    The direct pipeline scans every n in [x, 2x), evaluating the weight by
    divisibility tests. The rearranged pipeline expands the square into a
    double sum over divisor pairs and counts n in residue classes mod
    lcm(d1, d2) with exact integer counts (and, for S2, prime counts in
    those classes). Disagreement beyond rel_tol raises ConsistencyError.
    """
    x, D = params.x, params.D_limit
    offsets = params.tuple.offsets
    lam = {d: lambda_d(d, params) for d in range(1, D + 1)}
    table = sieve_range(x, 2 * x + offsets[-1] + 1)
    bits = table.primality

    # direct scan
    f_terms, s2_terms, s2_theta_terms = [], [], []
    for n in range(x, 2 * x):
        inner = math.fsum(
            lam[d]
            for d in range(1, D + 1)
            if lam[d] != 0.0 and _divides_shifted_product(d, n, offsets)
        )
        fn = inner * inner
        if fn == 0.0:
            continue
        f_terms.append(fn)
        hits = [h for h in offsets if bits[n + h - x]]
        if hits:
            s2_terms.append(fn * len(hits))
            s2_theta_terms.append(fn * math.fsum(math.log(n + h) for h in hits))
    S1_direct = math.fsum(f_terms)
    S2_direct = math.fsum(s2_terms)
    S2_theta_direct = math.fsum(s2_theta_terms)

    # rearranged double sum over divisor pairs
    nonzero = [d for d in range(1, D + 1) if lam[d] != 0.0]
    pair_lcm: dict[tuple[int, int], int] = {}
    for d1 in nonzero:
        for d2 in nonzero:
            pair_lcm[(d1, d2)] = math.lcm(d1, d2)
    moduli = sorted(set(pair_lcm.values()))
    residues_by_m = {m: _valid_residues(m, offsets) for m in moduli}

    # per offset: the n in [x, 2x) with n + h prime, bucketed mod m on demand
    ns_by_offset = {}
    logq_by_offset = {}
    for h in offsets:
        qs = np.flatnonzero(bits[h : h + x]).astype(np.int64) + x  # n values
        ns_by_offset[h] = qs
        logq_by_offset[h] = np.log((qs + h).astype(np.float64))

    class_counts = {
        m: {
            h: np.bincount(ns_by_offset[h] % m, minlength=m)
            for h in offsets
        }
        for m in moduli
    }
    class_logsums = {
        m: {
            h: np.bincount(
                ns_by_offset[h] % m, weights=logq_by_offset[h], minlength=m
            )
            for h in offsets
        }
        for m in moduli
    }

    re_s1, re_s2, re_s2_theta = [], [], []
    for (d1, d2), m in pair_lcm.items():
        coef = lam[d1] * lam[d2]
        rs = residues_by_m[m]
        n_count = sum(_count_in_class(x, 2 * x, r, m) for r in rs)
        re_s1.append(coef * n_count)
        prime_hits = sum(int(class_counts[m][h][r]) for h in offsets for r in rs)
        re_s2.append(coef * prime_hits)
        logsum = math.fsum(
            float(class_logsums[m][h][r]) for h in offsets for r in rs
        )
        re_s2_theta.append(coef * logsum)
    S1_re = math.fsum(re_s1)
    S2_re = math.fsum(re_s2)
    S2_theta_re = math.fsum(re_s2_theta)

    for name, a, b in (
        ("S1", S1_direct, S1_re),
        ("S2", S2_direct, S2_re),
        ("S2_theta", S2_theta_direct, S2_theta_re),
    ):
        if abs(a - b) > rel_tol * max(1.0, abs(a)):
            raise ConsistencyError(
                f"direct and rearranged {name} disagree: {a!r} vs {b!r}"
            )

    E = error_sum_E(params, i=error_index) if with_error_sum else None
    return GpyReport(
        params=params,
        S1=S1_direct,
        S2=S2_direct,
        objective=S2_direct - S1_direct,
        S2_theta=S2_theta_direct,
        D_limit=D,
        E=E,
    )


def residue_set_C(i: int, d: int, tup: AdmissibleTuple) -> frozenset[int]:
    """Residues c in [1, d], coprime to d, with d | prod_j (c - h_i + h_j).

    i is 1-based. For squarefree d the set is assembled per prime factor
    and combined by CRT; d = 1 gives the single degenerate class {1}.
    """
    if not 1 <= i <= tup.k:
        raise ValidationError(f"i must lie in [1, {tup.k}], got {i}")
    if d < 1:
        raise ValidationError(f"d must be >= 1, got {d}")
    if _mobius_small(d) == 0:
        raise ValidationError(f"d must be squarefree, got {d}")
    if d == 1:
        return frozenset({1})
    hi = tup.offsets[i - 1]
    residues = [0]
    mod = 1
    for p in _prime_factors(d):
        # roots of prod_j (c - h_i + h_j) mod p, excluding c = 0 mod p
        roots = sorted({(hi - h) % p for h in tup.offsets} - {0})
        if not roots:
            return frozenset()
        new = []
        for r in residues:
            inv = pow(mod, -1, p)
            for s in roots:
                t = (s - r) * inv % p
                new.append(r + mod * t)
        residues = new
        mod *= p
    return frozenset(c if c != 0 else d for c in residues)


def remainder_R(
    x: int, d: int, c: int, *, support: Optional[SupportArrays] = None
) -> float:
    """Prime-power log sum over n in [x, 2x) with n = c mod d, minus x/phi(d).

    The sum runs over the von Mangoldt support (each prime power p**m
    contributes log p); support arrays can be shared across calls.
    """
    if d < 1:
        raise ValidationError(f"d must be >= 1, got {d}")
    if not 1 <= c <= d:
        raise ValidationError(f"c must lie in [1, {d}], got {c}")
    if math.gcd(c, d) != 1:
        raise ValidationError(f"need gcd(c, d) = 1, got c={c} d={d}")
    if support is None:
        support = mangoldt_range(x, 2 * x)
    ns, ps, _ = support
    mask = ns % d == (c % d)
    # math.log per element keeps the value multiset identical to any
    # scalar re-summation, and fsum is order-insensitive
    lam_sum = math.fsum(math.log(p) for p in ps[mask].tolist())
    return lam_sum - x / _totient_small(d)


def error_sum_E(
    params: GpyParams,
    i: int = 1,
    *,
    support: Optional[SupportArrays] = None,
) -> float:
    """Sum of |remainder_R| over squarefree d < x^(2b) and c in the residue set.

    The index i selects which tuple offset anchors the residue sets; it is
    a free choice and defaults to 1.
    """
    x = params.x
    d_max = int(math.ceil(params.x ** (2 * params.b) - 1e-9)) - 1
    if support is None:
        support = mangoldt_range(x, 2 * x)
    terms = []
    for d in range(1, d_max + 1):
        if _mobius_small(d) == 0:
            continue
        for c in sorted(residue_set_C(i, d, params.tuple)):
            terms.append(abs(remainder_R(x, d, c, support=support)))
    return math.fsum(terms)


def level_of_distribution_sum(x: int, theta: float, *, weighted: bool = False) -> float:
    """Sum over q <= x^theta of the worst residue-class error E_q.

    E_q compares the prime count in each invertible class a mod q with the
    equidistributed share pi(x)/phi(q) and takes the worst class. With
    weighted=True the count is replaced by the prime-power log sum (the
    same comparison against its total divided by phi(q)).
    """
    if x < 100:
        raise ValidationError(f"x must be >= 100, got {x}")
    if not 0 < theta < 1:
        raise ValidationError(f"theta must lie in (0, 1), got {theta}")
    q_max = int(x**theta + 1e-9)
    if weighted:
        ns, ps, _ = mangoldt_range(2, x + 1)
        vals = np.log(ps.astype(np.float64))
        total = math.fsum(vals.tolist())
    else:
        ns = primes_between(2, x + 1)
        vals = None
        total = float(ns.size)
    terms = []
    for q in range(1, q_max + 1):
        coprime = np.gcd(np.arange(q, dtype=np.int64), q) == 1
        phi_q = int(np.count_nonzero(coprime))
        share = total / phi_q
        if vals is None:
            per_class = np.bincount(ns % q, minlength=q).astype(np.float64)
        else:
            per_class = np.bincount(ns % q, weights=vals, minlength=q)
        errs = np.abs(per_class[coprime] - share)
        terms.append(float(np.max(errs)) if errs.size else 0.0)
    return math.fsum(terms)
