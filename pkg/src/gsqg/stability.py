"""Linearized stability of self-similar triples.

Around a centered self-similar triple with rates (a, b), the shape
perturbation (x_2, x_3, conj x_2, conj x_3) evolves to linear order under
the 4x4 complex matrix

    L = [ -a-ib    0      L13    L14 ]
        [   0    -a-ib    L23    L24 ]
        [ conj(L13) conj(L14) -a+ib   0 ]
        [ conj(L23) conj(L24)   0   -a+ib ]

The stability requirement is that every eigenvalue of L has real part
exactly -a, which holds precisely when the quartic

    mu^4 + mu^2 (c1 - 2 b^2) + b^4 - b^2 c1 + c2 = 0

has four distinct real roots mu (the eigenvalues are then -a + i mu).
Solving for mu^2 reduces this to two explicit inequalities:

    c1^2 - 4 c2 > 0    and    2 b^2 - c1 - sqrt(c1^2 - 4 c2) > 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .kernel import DomainError, SingularityError, coupling_constant
from .selfsimilar import RATE_TOL, SS_TOL, TripleConfig, center, selfsimilar_rate

EIG_TOL = 1e-8


@dataclass(frozen=True)
class StabilityMatrix:
    entries: np.ndarray     # 4x4 complex
    a_rate: float
    b_rate: float
    off: tuple[complex, complex, complex, complex]   # (L13, L14, L23, L24)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.entries))


@dataclass(frozen=True)
class MuRoots:
    """Roots of the eigenvalue quartic, or the reason there are none."""

    roots: np.ndarray | None       # 4 reals, ascending, when successful
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.roots is not None


@dataclass(frozen=True)
class HypothesisReport:
    selfsimilar_ok: bool
    a_positive: bool
    mu: MuRoots
    eigen_ok: bool
    distinct: bool
    details: str
    a_rate: float = np.nan
    b_rate: float = np.nan
    matrix: StabilityMatrix | None = None
    c1: float = np.nan
    c2: float = np.nan
    eigenvalues: np.ndarray | None = None

    @property
    def passed(self) -> bool:
        return (self.selfsimilar_ok and self.a_positive and self.mu.ok
                and self.eigen_ok and self.distinct)

    def to_json(self) -> str:
        def f(v):
            return float(f"{v:.17g}")

        def c(v):
            return [f(v.real), f(v.imag)]

        obj = {
            "passed": self.passed,
            "selfsimilar_ok": self.selfsimilar_ok,
            "a_positive": self.a_positive,
            "eigen_ok": self.eigen_ok,
            "distinct": self.distinct,
            "details": self.details,
            "a": f(self.a_rate),
            "b": f(self.b_rate),
            "c1": f(self.c1),
            "c2": f(self.c2),
            "mu": [f(m) for m in self.mu.roots] if self.mu.ok else None,
            "mu_failure": self.mu.failure,
            "L": {k: c(v) for k, v in zip(("L13", "L14", "L23", "L24"),
                                          self.matrix.off)} if self.matrix else None,
            "eigenvalues": [c(e) for e in self.eigenvalues]
            if self.eigenvalues is not None else None,
        }
        return json.dumps(obj, indent=2)


def l_matrix(cfg: TripleConfig, a_rate: float, b_rate: float) -> StabilityMatrix:
    """Assemble the linearization matrix at the triple's positions.

    The four off-diagonal coefficients are sums of terms

        -(i c_alpha / |a1|^2) conj(a1^2 xi_m ((alpha-2)|d|^(alpha-4)
                                              - |d|^(alpha-2) / d^2))

    over the interactions that perturb each shape coordinate, with a2/a1
    or a3/a1 prefactors on the contributions routed through vortex 1.
    """
    ca = coupling_constant(cfg.alpha)
    alpha = cfg.alpha
    a1, a2, a3 = cfg.a
    dmin = 1e-12 * max(abs(a1 - a2), abs(a1 - a3), abs(a2 - a3))
    pre = -1j * ca / abs(a1) ** 2

    def term(m: float, d: complex) -> complex:
        if abs(d) < dmin:
            raise SingularityError(f"coincident vortices in linearization: |d|={abs(d):.3e}")
        bracket = (alpha - 2.0) * abs(d) ** (alpha - 4.0) - abs(d) ** (alpha - 2.0) / d**2
        return pre * np.conj(a1**2 * m * bracket)

    xi1, xi2, xi3 = cfg.xi
    L13 = term(xi3, a2 - a3) + term(xi1, a2 - a1) + (a2 / a1) * term(xi2, a1 - a2)
    L14 = term(xi3, a2 - a3) + (a2 / a1) * term(xi3, a1 - a3)
    L23 = term(xi2, a3 - a2) + (a3 / a1) * term(xi2, a1 - a2)
    L24 = term(xi2, a3 - a2) + term(xi1, a3 - a1) + (a3 / a1) * term(xi2, a1 - a3)

    d1 = -a_rate - 1j * b_rate
    d2 = -a_rate + 1j * b_rate
    M = np.array(
        [
            [d1, 0.0, L13, L14],
            [0.0, d1, L23, L24],
            [np.conj(L13), np.conj(L14), d2, 0.0],
            [np.conj(L23), np.conj(L24), 0.0, d2],
        ],
        dtype=complex,
    )
    return StabilityMatrix(entries=M, a_rate=a_rate, b_rate=b_rate,
                           off=(complex(L13), complex(L14), complex(L23), complex(L24)))


def mu_coefficients(M: StabilityMatrix) -> tuple[float, float]:
    """Coefficients (c1, c2) of the eigenvalue quartic.

    c1 = |L13|^2 + |L24|^2 + 2 Re(L23 conj(L14)),
    c2 = |L13|^2 |L24|^2 + |L23|^2 |L14|^2 - 2 Re(L14 conj(L13) L23 conj(L24)).
    Both are manifestly real; computed in complex arithmetic as a guard.
    """
    L13, L14, L23, L24 = M.off
    c1 = L13 * np.conj(L13) + L24 * np.conj(L24) + L23 * np.conj(L14) + L14 * np.conj(L23)
    c2 = (L13 * np.conj(L13) * L24 * np.conj(L24)
          + L23 * np.conj(L23) * L14 * np.conj(L14)
          - L14 * np.conj(L13) * L23 * np.conj(L24)
          - L13 * np.conj(L14) * L24 * np.conj(L23))
    scale = max(abs(c1), abs(c2), 1.0)
    if abs(c1.imag) > 1e-12 * scale or abs(c2.imag) > 1e-12 * scale:
        raise ArithmeticError(f"mu coefficients not real: {c1}, {c2}")
    return float(c1.real), float(c2.real)


def mu_roots(b_rate: float, c1: float, c2: float) -> MuRoots:
    """Solve mu^4 + mu^2 (c1 - 2 b^2) + b^4 - b^2 c1 + c2 = 0 for real mu.

    As a quadratic in mu^2 the roots are (2 b^2 - c1 +- sqrt(c1^2 - 4 c2))/2,
    so four distinct real mu exist exactly when c1^2 - 4 c2 > 0 and
    2 b^2 - c1 - sqrt(c1^2 - 4 c2) > 0.  Failure is a value, not an error.
    """
    disc = c1 * c1 - 4.0 * c2
    if disc <= 0.0:
        return MuRoots(None, failure=f"complex mu^2: c1^2 - 4 c2 = {disc:.6e} <= 0")
    s = np.sqrt(disc)
    lo = (2.0 * b_rate**2 - c1 - s) / 2.0
    if lo <= 0.0:
        return MuRoots(
            None, failure=f"negative mu^2: 2 b^2 - c1 - sqrt(disc) = {2*lo:.6e} <= 0"
        )
    hi = (2.0 * b_rate**2 - c1 + s) / 2.0
    r = np.sqrt([lo, hi])
    return MuRoots(np.array([-r[1], -r[0], r[0], r[1]]))


def eigen4(M: StabilityMatrix) -> np.ndarray:
    """Eigenvalues of the 4x4 matrix by a general dense solver (LAPACK),
    kept as an oracle independent of the quartic route."""
    return np.linalg.eigvals(M.entries)


def mu_distinct(mu: np.ndarray) -> bool:
    gaps = np.diff(np.sort(mu))
    return bool(np.all(gaps > 1e-9 * (1.0 + np.max(np.abs(mu)))))


def hypothesis_a_check(cfg: TripleConfig) -> HypothesisReport:
    """Full stability check of a candidate triple.

    Pipeline: center -> self-similarity rates (residual <= SS_TOL and
    a > 0 required) -> linearization matrix -> quartic roots cross-checked
    against the dense eigensolver -> four distinct real mu.
    """
    cen = center(cfg)
    a_rate, b_rate, residual = selfsimilar_rate(cen)
    ss_ok = residual <= SS_TOL
    a_pos = a_rate > RATE_TOL     # a relative equilibrium (a = 0) is not a burst
    if not (ss_ok and a_pos):
        detail = f"residual={residual:.3e}, a={a_rate:.6g}"
        return HypothesisReport(
            selfsimilar_ok=ss_ok, a_positive=a_pos,
            mu=MuRoots(None, failure="prerequisites failed"),
            eigen_ok=False, distinct=False, details=detail,
            a_rate=a_rate, b_rate=b_rate,
        )
    M = l_matrix(cen, a_rate, b_rate)
    c1, c2 = mu_coefficients(M)
    mu = mu_roots(b_rate, c1, c2)
    eigs = eigen4(M)
    if not mu.ok:
        return HypothesisReport(
            selfsimilar_ok=True, a_positive=True, mu=mu, eigen_ok=False,
            distinct=False, details=mu.failure or "", a_rate=a_rate,
            b_rate=b_rate, matrix=M, c1=c1, c2=c2, eigenvalues=eigs,
        )
    # oracle agreement: eigenvalues must be -a + i mu_j
    predicted = -a_rate + 1j * mu.roots
    order_p = np.argsort(predicted.imag)
    order_e = np.argsort(eigs.imag)
    mismatch = float(np.max(np.abs(predicted[order_p] - eigs[order_e])))
    eig_ok = bool(mismatch <= EIG_TOL and np.max(np.abs(eigs.real + a_rate)) <= EIG_TOL)
    distinct = mu_distinct(mu.roots)
    detail = f"max |eig - (-a + i mu)| = {mismatch:.3e}"
    return HypothesisReport(
        selfsimilar_ok=True, a_positive=True, mu=mu, eigen_ok=eig_ok,
        distinct=distinct, details=detail, a_rate=a_rate, b_rate=b_rate,
        matrix=M, c1=c1, c2=c2, eigenvalues=eigs,
    )


def propagator_norm(M: StabilityMatrix, alpha: float, t: float) -> float:
    """Operator 2-norm of exp((log t / ((4-alpha) a)) L) for t in (0, 1].

    When every eigenvalue has real part -a the norm decays like
    t^(-1/(4-alpha)) up to a non-normality prefactor.
    """
    if not 0.0 < t <= 1.0:
        raise DomainError(f"propagator defined for t in (0, 1], got {t}")
    if M.a_rate == 0.0:
        raise DomainError("propagator scaling undefined for a = 0")
    tau = np.log(t) / ((4.0 - alpha) * M.a_rate)
    return float(np.linalg.norm(scipy.linalg.expm(tau * M.entries), 2))
