"""Self-similar three-vortex motions.

A centered triple (a_1, a_2, a_3) with intensities (xi_1, xi_2, xi_3)
evolves self-similarly, z_j(t) = a_j Z(t), exactly when

    i c_alpha sum_{k != j} xi_k |a_j - a_k|^(alpha-2) / (a_j - a_k)
        = conj(a_j) (a - i b)       for j = 1, 2, 3

with a common pair of real rates (a, b).  The scale factor is then

    Z(t) = ((4 - alpha) a (t - t0))^(1/(4-alpha))
           * exp(i (theta0 + b / ((4 - alpha) a) * log(t - t0)))

a burst for a > 0 (domain t > t0), a collapse for a < 0 (t < t0, with
|t - t0| in place of t - t0), and a relative equilibrium for a = 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .kernel import DomainError, VortexState, conserved, coupling_constant

# The self-similarity relation is algebraically exact; these thresholds
# only absorb floating-point noise.
SS_TOL = 1e-8
RATE_TOL = 1e-10


class Classification(Enum):
    RELATIVE_EQUILIBRIUM = "relative_equilibrium"
    BURST = "burst"
    COLLAPSE = "collapse"
    NOT_SELF_SIMILAR = "not_self_similar"


@dataclass(frozen=True)
class TripleConfig:
    """Candidate shape for a self-similar three-vortex motion."""

    a: np.ndarray          # three complex positions
    xi: np.ndarray         # three real nonzero intensities
    alpha: float

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex)
        xi = np.asarray(self.xi, dtype=float)
        if a.shape != (3,) or xi.shape != (3,):
            raise DomainError("TripleConfig needs exactly three vortices")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "xi", xi)
        coupling_constant(self.alpha)  # validates alpha
        if np.any(xi == 0.0):
            raise DomainError("all intensities must be nonzero")
        d = [abs(a[0] - a[1]), abs(a[0] - a[2]), abs(a[1] - a[2])]
        if min(d) == 0.0:
            raise DomainError("positions must be pairwise distinct")

    def state(self, t: float = 0.0) -> VortexState:
        return VortexState(t=t, z=self.a.copy(), xi=self.xi.copy(), alpha=self.alpha)

    def is_centered(self, tol: float = 1e-12) -> bool:
        scale = np.max(np.abs(self.a)) * np.max(np.abs(self.xi))
        return abs(np.sum(self.xi * self.a)) <= tol * max(scale, 1.0)

    def to_json(self) -> str:
        return json.dumps(
            {
                "alpha": self.alpha,
                "positions": [[z.real, z.imag] for z in self.a],
                "intensities": list(self.xi),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "TripleConfig":
        obj = json.loads(text)
        pos = np.array([complex(re, im) for re, im in obj["positions"]])
        return cls(a=pos, xi=np.array(obj["intensities"], dtype=float),
                   alpha=float(obj["alpha"]))


@dataclass(frozen=True)
class SelfSimilarMotion:
    """Rates and phase data of z_j(t) = a_j Z(t)."""

    a_rate: float
    b_rate: float
    t0: float
    theta0: float
    alpha: float

    def classification(self) -> Classification:
        if abs(self.a_rate) <= RATE_TOL:
            return Classification.RELATIVE_EQUILIBRIUM
        return Classification.BURST if self.a_rate > 0 else Classification.COLLAPSE

    def to_json(self) -> str:
        return json.dumps(
            {"a": self.a_rate, "b": self.b_rate, "t0": self.t0,
             "theta0": self.theta0, "alpha": self.alpha}
        )

    @classmethod
    def from_json(cls, text: str) -> "SelfSimilarMotion":
        o = json.loads(text)
        return cls(a_rate=o["a"], b_rate=o["b"], t0=o["t0"],
                   theta0=o["theta0"], alpha=o["alpha"])


def center(cfg: TripleConfig) -> TripleConfig:
    """Translate so the center of vorticity sits at the origin."""
    total = float(np.sum(cfg.xi))
    if total == 0.0:
        raise DomainError("zero total intensity: vorticity-weighted center undefined")
    shift = np.sum(cfg.xi * cfg.a) / total
    return TripleConfig(a=cfg.a - shift, xi=cfg.xi, alpha=cfg.alpha)


def selfsimilar_rate(cfg: TripleConfig) -> tuple[float, float, float]:
    """Rates (a, b) of the self-similarity relation plus its residual.

    Evaluates q_j = (i c_alpha sum_k ...) / conj(a_j) for each vortex and
    returns the mean of q_j split as (a, b) = (Re, -Im), with
    residual = max_j |q_j - mean|.  The configuration is self-similar when
    the residual is below SS_TOL; requires a centered configuration.
    """
    if np.any(cfg.a == 0.0):
        raise DomainError("vortex at the origin: q_j undefined")
    ca = coupling_constant(cfg.alpha)
    a, xi, alpha = cfg.a, cfg.xi, cfg.alpha
    q = np.empty(3, dtype=complex)
    for j in range(3):
        d = a[j] - np.delete(a, j)
        w = np.delete(xi, j)
        vbar = 1j * ca * np.sum(w * np.abs(d) ** (alpha - 2.0) / d)
        q[j] = vbar / np.conj(a[j])
    mean = complex(np.mean(q))
    residual = float(np.max(np.abs(q - mean)))
    return mean.real, -mean.imag, residual


def check_H_L_zero(cfg: TripleConfig) -> tuple[float, float]:
    """Interaction energy H and moment of inertia L of the triple."""
    c = conserved(cfg.state())
    return c.H, c.Lmom


def classify(cfg: TripleConfig) -> Classification:
    """Classify a centered triple by the self-similarity relation."""
    a_rate, _, residual = selfsimilar_rate(cfg)
    if residual > SS_TOL:
        return Classification.NOT_SELF_SIMILAR
    if abs(a_rate) <= RATE_TOL:
        return Classification.RELATIVE_EQUILIBRIUM
    return Classification.BURST if a_rate > 0 else Classification.COLLAPSE


def zeta(motion: SelfSimilarMotion, t: float) -> complex:
    """Scale factor Z(t) of the self-similar motion.

    Domain: t > t0 on the burst branch (a > 0), t < t0 on the collapse
    branch (a < 0), where |t - t0| replaces t - t0.
    """
    a, b, alpha = motion.a_rate, motion.b_rate, motion.alpha
    if abs(a) <= RATE_TOL:
        raise DomainError("zeta undefined for a relative equilibrium (a = 0)")
    dt = t - motion.t0
    if a > 0 and dt <= 0:
        raise DomainError(f"burst branch needs t > t0, got t - t0 = {dt}")
    if a < 0 and dt >= 0:
        raise DomainError(f"collapse branch needs t < t0, got t - t0 = {dt}")
    s = abs(dt)
    mod = ((4.0 - alpha) * abs(a) * s) ** (1.0 / (4.0 - alpha))
    phase = motion.theta0 + b / ((4.0 - alpha) * a) * np.log(s)
    return mod * np.exp(1j * phase)


def motion_from_config(cfg: TripleConfig, t0: float = 0.0,
                       theta0: float = 0.0) -> SelfSimilarMotion:
    """Build the SelfSimilarMotion whose shape coefficients are cfg.a.

    cfg must be centered and genuinely self-similar (residual <= SS_TOL);
    t0 and theta0 are free parameters of the autonomous dynamics and are
    stored as given, never inferred.
    """
    a_rate, b_rate, residual = selfsimilar_rate(cfg)
    if residual > SS_TOL:
        raise DomainError(f"configuration not self-similar (residual {residual:.2e})")
    return SelfSimilarMotion(a_rate=a_rate, b_rate=b_rate, t0=t0,
                             theta0=theta0, alpha=cfg.alpha)


def reference_time(motion: SelfSimilarMotion) -> float:
    """Time at which |Z| = 1, i.e. the trajectory passes through the shape
    coefficients themselves."""
    a, alpha = motion.a_rate, motion.alpha
    if abs(a) <= RATE_TOL:
        raise DomainError("reference time undefined for a = 0")
    return motion.t0 + np.sign(a) / ((4.0 - alpha) * abs(a))
