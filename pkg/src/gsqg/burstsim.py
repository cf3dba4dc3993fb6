"""Bursts seeded among background vortices, and their time reversals.

A Hypothesis-A triple placed at a burst site with its self-similar scale
Z(t_ini), surrounded by well-separated background vortices, is integrated
under the full N-vortex dynamics.  Shrinking t_ini toward the singular
time produces runs that converge to the limiting burst solution; the
Cauchy gaps between successive runs are the numerical evidence for that
limit (the construction itself is an existence argument, not an
algorithm, so the study is evidence rather than proof).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .integrator import IntegratorConfig, Status, Trajectory, integrate
from .kernel import DomainError, VortexState, rhs
from .selfsimilar import (Classification, SelfSimilarMotion, TripleConfig,
                          center, motion_from_config, zeta)

RHO_SEP_DEFAULT = 0.5


@dataclass(frozen=True)
class BurstScenario:
    triple: TripleConfig                      # centered on construction
    background: tuple[tuple[complex, float], ...] = ()
    burst_site: complex = 0.0 + 0.0j
    t_ini_sequence: tuple[float, ...] = (1e-4, 5e-5, 2.5e-5, 1.25e-5)
    horizon: float = 1e-3
    rho_sep: float = RHO_SEP_DEFAULT
    time_reversed: bool = False
    motion: SelfSimilarMotion = field(init=False)

    def __post_init__(self):
        cen = center(self.triple)
        object.__setattr__(self, "triple", cen)
        object.__setattr__(self, "motion", motion_from_config(cen))
        want = Classification.COLLAPSE if self.time_reversed else Classification.BURST
        if self.motion.classification() is not want:
            raise DomainError(
                f"triple classifies as {self.motion.classification().value}, "
                f"scenario needs a {want.value}"
            )
        t_ini = tuple(float(t) for t in self.t_ini_sequence)
        if any(t <= 0 for t in t_ini) or any(
            t_ini[i] <= t_ini[i + 1] for i in range(len(t_ini) - 1)
        ):
            raise DomainError("t_ini_sequence must be positive and decreasing")
        object.__setattr__(self, "t_ini_sequence", t_ini)
        pts = [self.burst_site] + [p for p, _ in self.background]
        for i in range(len(pts)):
            for k in range(i + 1, len(pts)):
                if abs(pts[i] - pts[k]) < self.rho_sep:
                    raise DomainError(
                        "background vortices must stay rho_sep away from each "
                        "other and from the burst site"
                    )
        if any(zeta_ == 0.0 for _, zeta_ in self.background):
            raise DomainError("background intensities must be nonzero")

    @property
    def merged_intensity(self) -> float:
        """Intensity of the vortex the triple merges into at the singular time."""
        return float(np.sum(self.triple.xi))

    def to_json(self) -> str:
        return json.dumps(
            {
                "triple": json.loads(self.triple.to_json()),
                "background": [
                    {"position": [p.real, p.imag], "intensity": z}
                    for p, z in self.background
                ],
                "t_ini": list(self.t_ini_sequence),
                "horizon": self.horizon,
                "site": [self.burst_site.real, self.burst_site.imag],
                "rho_sep": self.rho_sep,
                "time_reversed": self.time_reversed,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "BurstScenario":
        o = json.loads(text)
        triple = TripleConfig.from_json(json.dumps(o["triple"]))
        bg = tuple(
            (complex(b["position"][0], b["position"][1]), float(b["intensity"]))
            for b in o.get("background", [])
        )
        site = complex(*o.get("site", [0.0, 0.0]))
        return cls(
            triple=triple, background=bg, burst_site=site,
            t_ini_sequence=tuple(o["t_ini"]), horizon=float(o["horizon"]),
            rho_sep=float(o.get("rho_sep", RHO_SEP_DEFAULT)),
            time_reversed=bool(o.get("time_reversed", False)),
        )


@dataclass(frozen=True)
class BurstDiagnostics:
    exponent_fit: float
    cauchy_gaps: tuple[float, ...]
    background_drift: float


def _signed_time(s: BurstScenario, t: float) -> float:
    return -t if s.time_reversed else t


def make_burst_initial(s: BurstScenario, t_ini: float) -> VortexState:
    """Full N-vortex state with the triple at site + a_j Z(t_ini)."""
    if t_ini <= 0.0:
        raise DomainError("t_ini must be positive")
    t = _signed_time(s, t_ini)
    Z = zeta(s.motion, t)
    triple_pos = s.burst_site + s.triple.a * Z
    spread = max(
        abs(triple_pos[i] - triple_pos[k]) for i in range(3) for k in range(i + 1, 3)
    )
    if spread > s.rho_sep / 2.0:
        raise DomainError(
            f"triple spread {spread:.3e} at t_ini={t_ini} exceeds rho_sep/2"
        )
    z = np.concatenate([triple_pos, np.array([p for p, _ in s.background])])
    xi = np.concatenate([s.triple.xi, np.array([w for _, w in s.background])])
    return VortexState(t=t, z=z, xi=xi, alpha=s.triple.alpha)


def _spread_series(traj: Trajectory) -> np.ndarray:
    z = traj.positions[:, :3]
    pairs = [(0, 1), (0, 2), (1, 2)]
    return np.max(np.abs([z[:, i] - z[:, k] for i, k in pairs]), axis=0)


def _fit_exponent(times: np.ndarray, spread: np.ndarray) -> float:
    """Log-log slope over the last two decades of |t| (skips the early
    transient from background forcing)."""
    tt = np.abs(times)
    sel = (tt >= tt.max() / 100.0) & (spread > 0)
    if sel.sum() < 4:
        sel = spread > 0
    slope, _ = np.polyfit(np.log(tt[sel]), np.log(spread[sel]), 1)
    return float(slope)


def run_burst(s: BurstScenario, t_ini: float,
              cfg: IntegratorConfig = IntegratorConfig()) -> tuple[Trajectory, BurstDiagnostics]:
    """Integrate one seeded run and fit the triple-spread scaling.

    A burst runs from t_ini out to the horizon; a time-reversed scenario
    runs from -horizon in toward -t_ini (the spread then shrinks).
    """
    if s.time_reversed:
        state0 = make_burst_initial(s, s.horizon)
        t_end = -t_ini
    else:
        state0 = make_burst_initial(s, t_ini)
        t_end = s.horizon
    traj = integrate(state0, t_end, cfg)
    if traj.status is Status.STEP_FAILURE:
        raise RuntimeError(f"integration failed at t={traj.t_event}")
    expo = _fit_exponent(traj.times, _spread_series(traj))
    drift = 0.0
    if s.background:
        bg0 = np.array([p for p, _ in s.background])
        drift = float(np.max(np.abs(traj.positions[-1, 3:] - bg0)))
    return traj, BurstDiagnostics(
        exponent_fit=expo, cauchy_gaps=(), background_drift=drift
    )


def convergence_study(s: BurstScenario,
                      cfg: IntegratorConfig = IntegratorConfig(),
                      n_grid: int = 120) -> BurstDiagnostics:
    """Cauchy study over the t_ini refinement sequence.

    Successive runs are compared in the sup norm over a shared log-spaced
    time grid; decreasing gaps are the numerical evidence that the seeded
    runs converge to a limiting burst among the background vortices.
    """
    if len(s.t_ini_sequence) < 3:
        raise DomainError("need at least three t_ini values")
    if s.time_reversed:
        raise DomainError("convergence study is defined on the burst orientation")
    runs = [run_burst(s, t_ini, cfg) for t_ini in s.t_ini_sequence]
    t_lo = s.t_ini_sequence[0]
    grid = np.geomspace(t_lo, s.horizon, n_grid)
    gaps = []
    for (tr_a, _), (tr_b, _) in zip(runs, runs[1:]):
        worst = 0.0
        for t in grid:
            za = tr_a.eval(float(t))
            zb = tr_b.eval(float(t))
            worst = max(worst, float(np.max(np.abs(za - zb))))
        gaps.append(worst)
    last_traj, last_diag = runs[-1]
    return BurstDiagnostics(
        exponent_fit=last_diag.exponent_fit,
        cauchy_gaps=tuple(gaps),
        background_drift=last_diag.background_drift,
    )


def collapse_scenario(s: BurstScenario) -> BurstScenario:
    """Time inversion: negate every intensity and flip the orientation
    flag.  Applying it twice returns the original scenario."""
    triple = TripleConfig(a=s.triple.a, xi=-s.triple.xi, alpha=s.triple.alpha)
    background = tuple((p, -w) for p, w in s.background)
    return BurstScenario(
        triple=triple, background=background, burst_site=s.burst_site,
        t_ini_sequence=s.t_ini_sequence, horizon=s.horizon,
        rho_sep=s.rho_sep, time_reversed=not s.time_reversed,
    )


def suggest_horizon(s: BurstScenario) -> float:
    """Horizon keeping background motion under rho_sep/10, estimated from
    the speeds in the widest seeded state."""
    state = make_burst_initial(s, s.t_ini_sequence[0])
    speeds = np.abs(rhs(state))
    v = float(np.max(speeds[3:])) if s.background else float(np.max(speeds))
    if v == 0.0:
        return s.horizon
    return min(s.horizon, s.rho_sep / (10.0 * v))
