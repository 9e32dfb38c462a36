"""Lower bounds on the simplex Rayleigh quotient M_k = sup J(F)/I(F).

F ranges over square-integrable functions supported on the simplex
R_k = {t_i >= 0, sum t_i <= 1}, with

    I(F) = int_{R_k} F^2
    J(F) = sum_i int (int F dt_i)^2.

Two bound families are implemented. The polynomial method restricts F to
symmetric polynomials sum c_{a,b} (1-P1)^a P2^b of degree at most d,
turning J/I into a ratio of quadratic forms assembled in exact rational
arithmetic; the largest generalized eigenvalue is solved in floating
point and then re-certified exactly at the witness, so the reported bound
is true regardless of floating error. The analytic method evaluates the
closed-form bound for the product shape built from g(t) = 1/(1+At) on
[0, T]. A seeded Monte Carlo estimator of I and J validates the exact
pipeline from outside.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np
from scipy.linalg import eigh

from .errors import (
    CapacityError,
    ConsistencyError,
    ConvergenceError,
    InfeasibleError,
    ValidationError,
)
from .simplex import complement_moments, power_sum_moments
from .tuples import AdmissibleTuple, Refutation, is_admissible

RationalMatrix = list[list[Fraction]]


class BasisIndex(NamedTuple):
    """Exponent pair for the basis polynomial (1-P1)^a P2^b."""

    a: int
    b: int


def enumerate_basis(degree: int) -> list[BasisIndex]:
    """All (a, b) with a + 2b <= degree, sorted lexicographically."""
    if degree < 0:
        raise ValidationError(f"degree must be >= 0, got {degree}")
    return sorted(
        BasisIndex(a, b)
        for a in range(degree + 1)
        for b in range((degree - a) // 2 + 1)
    )


@dataclass(frozen=True)
class QuadraticFormPair:
    """Exact rational Gram matrices of the I-form (A1) and J-form (A2)."""

    k: int
    degree: int
    basis: tuple[BasisIndex, ...]
    A1: RationalMatrix
    A2: RationalMatrix

    def __post_init__(self):
        n = len(self.basis)
        for mat in (self.A1, self.A2):
            if len(mat) != n or any(len(row) != n for row in mat):
                raise ValidationError("matrix dimensions must equal basis size")


def build_quadratic_forms(k: int, degree: int, *, basis_cap: int = 64) -> QuadraticFormPair:
    """Assemble the exact I- and J-form matrices for dimension k.

    A1[q][r] integrates B_q B_r over R_k directly from the power-sum
    moment table. For A2, symmetry reduces J to k times its last term;
    integrating the last variable out of B_q in closed form leaves a
    polynomial in sigma = 1 - P1 and P2 of the remaining k-1 variables,

        G_q = sum_m C(b_q, m) a_q! (2m)! / (a_q + 2m + 1)!
              * sigma^(a_q + 2m + 1) P2^(b_q - m),

    and A2[q][r] = k * int_{R_(k-1)} G_q G_r.
    """
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    basis = enumerate_basis(degree)
    if k == 1:
        # one variable collapses P2 to P1^2; mixed elements duplicate pure
        # powers and would make the Gram matrix singular
        basis = [idx for idx in basis if idx.b == 0]
    n = len(basis)
    if n > basis_cap:
        raise CapacityError(
            f"basis size {n} exceeds cap {basis_cap}; lower the degree or raise the cap"
        )

    moments_k = power_sum_moments(k, 2 * degree, degree)
    comp_k = complement_moments(moments_k, 2 * degree, degree)
    A1: RationalMatrix = [[Fraction(0)] * n for _ in range(n)]
    for qi, (aq, bq) in enumerate(basis):
        for ri in range(qi, n):
            ar, br = basis[ri]
            val = comp_k[aq + ar][bq + br]
            A1[qi][ri] = val
            A1[ri][qi] = val

    moments_k1 = power_sum_moments(k - 1, 2 * degree + 2, degree)
    comp_k1 = complement_moments(moments_k1, 2 * degree + 2, degree)
    # per basis element: terms (coef, sigma exponent, P2 exponent) of G
    gterms: list[list[tuple[Fraction, int, int]]] = []
    for (a, b) in basis:
        terms = []
        for m in range(b + 1):
            coef = Fraction(
                math.comb(b, m) * math.factorial(a) * math.factorial(2 * m),
                math.factorial(a + 2 * m + 1),
            )
            terms.append((coef, a + 2 * m + 1, b - m))
        gterms.append(terms)
    A2: RationalMatrix = [[Fraction(0)] * n for _ in range(n)]
    for qi in range(n):
        for ri in range(qi, n):
            total = Fraction(0)
            for c1, e1, f1 in gterms[qi]:
                for c2, e2, f2 in gterms[ri]:
                    total += c1 * c2 * comp_k1[e1 + e2][f1 + f2]
            total *= k
            A2[qi][ri] = total
            A2[ri][qi] = total
    return QuadraticFormPair(k=k, degree=degree, basis=tuple(basis), A1=A1, A2=A2)


def ldl_pivots(matrix: RationalMatrix) -> list[Fraction]:
    """Pivots of the exact LDL^T decomposition of a symmetric matrix.

    Raises:
        ConsistencyError: some pivot is <= 0 (matrix not positive definite).
    """
    n = len(matrix)
    a = [row[:] for row in matrix]
    pivots = []
    for i in range(n):
        piv = a[i][i]
        if piv <= 0:
            raise ConsistencyError(
                f"pivot {i} of the LDL decomposition is {piv} <= 0: "
                "matrix is not positive definite"
            )
        pivots.append(piv)
        for j in range(i + 1, n):
            f = a[i][j] / piv
            if f == 0:
                continue
            aj, ai = a[j], a[i]
            for col in range(j, n):
                aj[col] -= f * ai[col]
    return pivots


def _scaled_float(matrix: RationalMatrix) -> tuple[np.ndarray, Fraction]:
    """Float image of matrix / max|entry|; entries at k ~ 100 underflow raw."""
    scale = max(abs(x) for row in matrix for x in row)
    if scale == 0:
        return np.array([[float(x) for x in row] for row in matrix]), Fraction(1)
    out = np.array([[float(x / scale) for x in row] for row in matrix])
    return out, scale


def largest_generalized_eigenvalue(
    pair: QuadraticFormPair,
    *,
    residual_tol: float = 1e-9,
    check_definite: bool = True,
) -> tuple[float, np.ndarray]:
    """Largest lambda with A2 a = lambda A1 a, plus the witness vector.

    A1 is certified positive definite by exact LDL pivots first; the
    eigenproblem itself is solved in floating point on rescaled matrices
    and the relative eigen-equation residual is checked against
    residual_tol.

    Raises:
        ConsistencyError: A1 fails the exact positive-definiteness check.
        ConvergenceError: the float solve misses the residual tolerance.
    """
    if check_definite:
        ldl_pivots(pair.A1)
    F1, s1 = _scaled_float(pair.A1)
    F2, s2 = _scaled_float(pair.A2)
    vals, vecs = eigh(F2, F1)
    mu = float(vals[-1])
    vec = np.ascontiguousarray(vecs[:, -1])
    lhs = F2 @ vec
    rhs = mu * (F1 @ vec)
    residual = float(np.linalg.norm(lhs - rhs) / max(np.linalg.norm(lhs), 1e-300))
    if residual > residual_tol:
        raise ConvergenceError(
            f"eigen residual {residual:.3e} exceeds {residual_tol:.1e}",
            residual=residual,
        )
    return mu * float(s2 / s1), vec


@dataclass(frozen=True)
class MkCertificate:
    """Self-verifying lower bound on M_k.

    For the polynomial method the witness is the coefficient vector (exact
    rationals) and lower_bound is the down-rounded float of the exact
    Rayleigh quotient at that witness, so the bound survives any floating
    error in the eigen stage. residual is the float eigen-equation
    residual. For the analytic method the witness is the (A, T) pair.
    """

    k: int
    method: str
    lower_bound: float
    witness: Union[tuple[Fraction, ...], tuple[float, float]]
    residual: float
    exact_value: Optional[Fraction] = None
    degree: Optional[int] = None

    def to_dict(self) -> dict:
        wit: Union[list[dict], dict]
        if self.method.startswith("poly"):
            wit = [
                {"num": str(c.numerator), "den": str(c.denominator)}
                for c in self.witness  # type: ignore[union-attr]
            ]
        else:
            wit = {"A": self.witness[0], "T": self.witness[1]}
        out = {
            "k": self.k,
            "method": self.method,
            "lower_bound": self.lower_bound,
            "witness": wit,
            "residual": self.residual,
        }
        if self.degree is not None:
            out["degree"] = self.degree
        if self.exact_value is not None:
            out["exact_value"] = {
                "num": str(self.exact_value.numerator),
                "den": str(self.exact_value.denominator),
            }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def rayleigh_quotient(pair: QuadraticFormPair, coeffs: Sequence[Fraction]) -> Fraction:
    """Exact a^T A2 a / a^T A1 a at rational coefficients a."""
    n = len(pair.basis)
    if len(coeffs) != n:
        raise ValidationError(f"need {n} coefficients, got {len(coeffs)}")
    num = Fraction(0)
    den = Fraction(0)
    for i in range(n):
        ci = coeffs[i]
        if ci == 0:
            continue
        for j in range(n):
            cj = coeffs[j]
            if cj == 0:
                continue
            num += ci * pair.A2[i][j] * cj
            den += ci * pair.A1[i][j] * cj
    if den == 0:
        raise ValidationError("witness has zero I-form norm")
    return num / den


def _float_rounded_down(q: Fraction) -> float:
    f = float(q)
    while Fraction(f) > q:
        f = math.nextafter(f, -math.inf)
    return f


def mk_lower_bound_poly(k: int, degree: int, *, basis_cap: int = 64) -> MkCertificate:
    """Polynomial-basis lower bound: build, eigensolve, recertify exactly.

    Any coefficient vector yields a valid lower bound, so the float
    witness is converted to exact rationals and the Rayleigh quotient is
    re-evaluated exactly; the certificate carries that exact value rounded
    down to a float.
    """
    pair = build_quadratic_forms(k, degree, basis_cap=basis_cap)
    lam, vec = largest_generalized_eigenvalue(pair)
    witness = tuple(Fraction(float(c)) for c in vec)
    exact = rayleigh_quotient(pair, witness)
    bound = _float_rounded_down(exact)
    F1, _ = _scaled_float(pair.A1)
    F2, _ = _scaled_float(pair.A2)
    v = np.array([float(c) for c in witness])
    lhs = F2 @ v
    mu_scaled = float(v @ lhs) / float(v @ (F1 @ v))
    residual = float(
        np.linalg.norm(lhs - mu_scaled * (F1 @ v)) / max(np.linalg.norm(lhs), 1e-300)
    )
    # the float eigenvalue and the exact quotient must match closely, or
    # the eigen stage silently went wrong
    if abs(lam - bound) > 1e-6 * max(1.0, abs(bound)):
        raise ConsistencyError(
            f"float eigenvalue {lam!r} far from exact recertification {bound!r}"
        )
    return MkCertificate(
        k=k,
        method=f"poly(degree={degree})",
        lower_bound=bound,
        witness=witness,
        residual=residual,
        exact_value=exact,
        degree=degree,
    )


# --------- analytic bound for g(t) = 1/(1+At) on [0, T] ---------

VARIANT_AS_PRINTED = "as-printed"
VARIANT_RATIO_SQUARED = "ratio-squared"
_VARIANTS = (VARIANT_AS_PRINTED, VARIANT_RATIO_SQUARED)


@dataclass(frozen=True)
class GBoundParams:
    """Parameters of the analytic bound; mu is derived, not chosen.

    variant picks the leading factor: "as-printed" uses the mass-center
    ratio int t g^2 / int g^2 (which stays below 1), "ratio-squared" uses
    (int g)^2 / int g^2. Both are kept because only the second can reach
    the stated log-growth target; see the package docs.
    """

    A: float
    T: float
    k: int
    variant: str = VARIANT_RATIO_SQUARED

    def __post_init__(self):
        if self.A <= 0 or self.T <= 0:
            raise ValidationError(f"A and T must be > 0, got A={self.A} T={self.T}")
        if self.k < 2:
            raise ValidationError(f"k must be >= 2, got {self.k}")
        if self.variant not in _VARIANTS:
            raise ValidationError(f"variant must be one of {_VARIANTS}")

    @property
    def mu(self) -> float:
        """Center of mass of g^2 on [0, T]."""
        gg, tg, _ = _g_integrals(self.A, self.T)
        return tg / gg


def _g_integrals(A: float, T: float) -> tuple[float, float, float]:
    """Closed forms of int g^2, int t g^2, int g on [0, T], g = 1/(1+At)."""
    u = A * T
    gg = T / (1.0 + u)
    tg = (math.log1p(u) - u / (1.0 + u)) / (A * A)
    g1 = math.log1p(u) / A
    return gg, tg, g1


def mk_lower_bound_g(params: GBoundParams) -> float:
    """Evaluate the analytic bound; may be <= 0 (then useless but reported).

    Raises:
        ValidationError: mu >= 1, or T >= k (1 - mu), naming the violated
            precondition.
    """
    gg, tg, g1 = _g_integrals(params.A, params.T)
    mu = tg / gg
    if not mu < 1:
        raise ValidationError(f"precondition mu < 1 violated: mu = {mu}")
    if not params.T < params.k * (1 - mu):
        raise ValidationError(
            f"precondition T < k (1 - mu) violated: T = {params.T}, "
            f"k (1 - mu) = {params.k * (1 - mu)}"
        )
    first = mu if params.variant == VARIANT_AS_PRINTED else g1 * g1 / gg
    denom = 1.0 - params.T / params.k - mu
    correction = 1.0 - params.T / (params.k * denom * denom)
    return first * correction


def optimize_g_bound(
    k: int,
    variant: str = VARIANT_RATIO_SQUARED,
    *,
    grid: int = 64,
    refine_rounds: int = 48,
) -> tuple[float, float, float]:
    """Deterministic grid seed plus coordinate shrink over (A, T).

    Searches A in [1e-3, 10 log k], T in [1, k]. Returns (A, T, bound).

    Raises:
        InfeasibleError: no grid point satisfies the preconditions.
    """
    if k < 2:
        raise ValidationError(f"k must be >= 2, got {k}")

    def value(A: float, T: float) -> Optional[float]:
        try:
            return mk_lower_bound_g(GBoundParams(A=A, T=T, k=k, variant=variant))
        except ValidationError:
            return None

    a_hi = 10.0 * math.log(k)
    best: Optional[tuple[float, float, float]] = None
    for i in range(1, grid + 1):
        A = 1e-3 + (a_hi - 1e-3) * i / grid
        for j in range(1, grid + 1):
            T = 1.0 + (k - 1.0) * j / grid
            v = value(A, T)
            if v is not None and (best is None or v > best[0]):
                best = (v, A, T)
    if best is None:
        raise InfeasibleError(
            f"no feasible (A, T) for k={k} on the {grid}x{grid} seed grid"
        )
    for _ in range(refine_rounds):
        v0, A0, T0 = best
        for factor in (0.9, 0.97, 1.03, 1.1):
            v = value(A0 * factor, T0)
            if v is not None and v > best[0]:
                best = (v, A0 * factor, T0)
        for factor in (0.9, 0.97, 1.03, 1.1):
            v = value(best[1], T0 * factor)
            if v is not None and v > best[0]:
                best = (v, best[1], T0 * factor)
        if best[0] == v0:
            break
    return best[1], best[2], best[0]


# --------- Monte Carlo validation of I and J ---------

@dataclass(frozen=True)
class IJEstimate:
    i_value: float
    j_value: float
    i_stderr: float
    j_stderr: float
    samples: int


def _eval_combo(
    coeffs: Sequence[float], basis: Sequence[BasisIndex], p1: np.ndarray, p2: np.ndarray
) -> np.ndarray:
    acc = np.zeros_like(p1)
    for c, (a, b) in zip(coeffs, basis):
        if c == 0.0:
            continue
        term = np.full_like(p1, float(c))
        if a:
            term = term * (1.0 - p1) ** a
        if b:
            term = term * p2**b
        acc += term
    return acc


def _uniform_simplex(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    """n points uniform on R_dim via exponential spacings; dim 0 allowed."""
    if dim == 0:
        return np.zeros((n, 0))
    e = rng.standard_exponential((n, dim + 1))
    return e[:, :dim] / e.sum(axis=1, keepdims=True)


def ij_monte_carlo(
    k: int,
    coeffs: Sequence[float],
    degree: int,
    samples: int,
    seed: int,
    *,
    chunk: int = 1_000_000,
) -> IJEstimate:
    """Seeded Monte Carlo estimates of I(F) and J(F) with standard errors.

    F = sum c_{a,b} (1-P1)^a P2^b on R_k. I uses uniform simplex samples;
    J uses k times its symmetric last term, with the inner square turned
    into a product over two independent uniform points of the last
    coordinate. Used only to validate the exact pipeline.
    """
    if samples < 1000:
        raise ValidationError(f"samples must be >= 1000, got {samples}")
    basis = enumerate_basis(degree)
    if len(coeffs) != len(basis):
        raise ValidationError(f"need {len(basis)} coefficients, got {len(coeffs)}")
    rng = np.random.default_rng(seed)
    vol_k = 1.0 / math.factorial(k)
    vol_k1 = 1.0 / math.factorial(k - 1)

    sums = np.zeros(2)
    sqsums = np.zeros(2)
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        t = _uniform_simplex(rng, n, k)
        p1 = t.sum(axis=1)
        p2 = (t * t).sum(axis=1)
        fi = _eval_combo(coeffs, basis, p1, p2)
        wi = vol_k * fi * fi

        tp = _uniform_simplex(rng, n, k - 1)
        s = tp.sum(axis=1)
        q2 = (tp * tp).sum(axis=1)
        sigma = 1.0 - s
        u1 = sigma * rng.random(n)
        u2 = sigma * rng.random(n)
        f1 = _eval_combo(coeffs, basis, s + u1, q2 + u1 * u1)
        f2 = _eval_combo(coeffs, basis, s + u2, q2 + u2 * u2)
        wj = k * vol_k1 * sigma * sigma * f1 * f2

        sums += (wi.sum(), wj.sum())
        sqsums += ((wi * wi).sum(), (wj * wj).sum())
        done += n

    means = sums / samples
    variances = np.maximum(sqsums / samples - means * means, 0.0)
    stderrs = np.sqrt(variances / samples)
    return IJEstimate(
        i_value=float(means[0]),
        j_value=float(means[1]),
        i_stderr=float(stderrs[0]),
        j_stderr=float(stderrs[1]),
        samples=samples,
    )


# --------- inference chain ---------

def dhl_inference(mk_lower: float, theta: float, m: int) -> bool:
    """Strict test mk_lower > 2m/theta; theta = 1 is the conditional path."""
    if not 0 < theta <= 1:
        raise ValidationError(f"theta must lie in (0, 1], got {theta}")
    if m < 1:
        raise ValidationError(f"m must be >= 1, got {m}")
    return mk_lower > 2.0 * m / theta


@dataclass(frozen=True)
class GapChainReport:
    """Outcome of the full chain: certificate, inference, claimed bound.

    When the inference holds, the claim is that infinitely many n put at
    least m+1 primes among n + offsets, hence gap bound = tuple diameter,
    conditional on the assumed distribution level theta. When it fails,
    claimed_gap_bound is None and failing_inequality explains why.
    """

    k: int
    degree: int
    theta: float
    m: int
    certificate: MkCertificate
    tuple: AdmissibleTuple
    threshold: float
    dhl_holds: bool
    claimed_gap_bound: Optional[int]
    failing_inequality: Optional[str]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "degree": self.degree,
            "theta": self.theta,
            "m": self.m,
            "certificate": self.certificate.to_dict(),
            "offsets": list(self.tuple.offsets),
            "tuple_certificate": {str(p): r for p, r in sorted(self.tuple.certificate.items())},
            "threshold": self.threshold,
            "dhl_holds": self.dhl_holds,
            "claimed_gap_bound": self.claimed_gap_bound,
            "failing_inequality": self.failing_inequality,
        }


def gap_bound_chain(
    k: int,
    degree: int,
    theta: float,
    m: int,
    tup: AdmissibleTuple,
    *,
    basis_cap: int = 64,
) -> GapChainReport:
    """Run the polynomial bound, the strict inference, and emit the claim."""
    if tup.k != k:
        raise ValidationError(f"tuple has {tup.k} offsets, expected {k}")
    verdict = is_admissible(tup.offsets)
    if isinstance(verdict, Refutation):
        raise ValidationError(
            f"tuple is not admissible (all classes mod {verdict.prime} covered)"
        )
    cert = mk_lower_bound_poly(k, degree, basis_cap=basis_cap)
    threshold = 2.0 * m / theta
    holds = dhl_inference(cert.lower_bound, theta, m)
    failing = None
    if not holds:
        failing = (
            f"lower bound {cert.lower_bound!r} does not strictly exceed "
            f"2m/theta = {threshold!r}"
        )
    return GapChainReport(
        k=k,
        degree=degree,
        theta=theta,
        m=m,
        certificate=cert,
        tuple=verdict,
        threshold=threshold,
        dhl_holds=holds,
        claimed_gap_bound=tup.diameter if holds else None,
        failing_inequality=failing,
    )
