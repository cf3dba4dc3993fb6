import numpy as np
import pytest

import gsqg
from gsqg.search import _margin_grid
from gsqg.stability import StabilityMatrix

from conftest import THM_A


def make_matrix(L13, L14, L23, L24, a=0.5, b=2.0):
    M = np.array([
        [-a - 1j * b, 0, L13, L14],
        [0, -a - 1j * b, L23, L24],
        [np.conj(L13), np.conj(L14), -a + 1j * b, 0],
        [np.conj(L23), np.conj(L24), 0, -a + 1j * b],
    ], dtype=complex)
    return StabilityMatrix(entries=M, a_rate=a, b_rate=b,
                           off=(L13, L14, L23, L24))


# ---------------------------------------------------------------- l_matrix

def test_l_matrix_trace_and_structure(thm_centered):
    a, b, _ = gsqg.selfsimilar_rate(thm_centered)
    M = gsqg.l_matrix(thm_centered, a, b)
    E = M.entries
    assert M.trace == pytest.approx(-4 * a, rel=1e-12)
    assert E[0, 0] == E[1, 1] == pytest.approx(-a - 1j * b)
    assert E[2, 2] == E[3, 3] == pytest.approx(-a + 1j * b)
    # bottom-left block is the entrywise conjugate of the top-right
    assert np.array_equal(E[2:, :2], np.conj(E[:2, 2:]))
    assert E[0, 1] == E[1, 0] == E[2, 3] == E[3, 2] == 0.0


def test_l_matrix_term_dropout(thm_centered):
    # with xi_3 and xi_1 switched off, the top-right corner keeps only the
    # vortex-1-routed term with the a2/a1 prefactor
    a1, a2, _ = thm_centered.a
    alpha = thm_centered.alpha
    near_zero = 1e-300
    cfg = gsqg.TripleConfig(a=thm_centered.a,
                            xi=np.array([near_zero, 1.0, near_zero]), alpha=alpha)
    M = gsqg.l_matrix(cfg, 0.1, 0.2)
    ca = gsqg.coupling_constant(alpha)
    d = a1 - a2
    bracket = (alpha - 2) * abs(d) ** (alpha - 4) - abs(d) ** (alpha - 2) / d**2
    expect = (-1j * ca / abs(a1) ** 2) * (a2 / a1) * np.conj(a1**2 * 1.0 * bracket)
    assert M.off[0] == pytest.approx(expect, rel=1e-13)


def test_l_matrix_rejects_coincident_points():
    cfg = gsqg.TripleConfig(a=np.array([0.5, -0.5, 0.5 + 1e-14j]),
                            xi=np.array([1.0, 1.0, 1.0]), alpha=1.0)
    with pytest.raises(gsqg.SingularityError):
        gsqg.l_matrix(cfg, 0.1, 0.1)


# ---------------------------------------------------------------- mu machinery

def test_mu_coefficients_trivial():
    c1, c2 = gsqg.mu_coefficients(make_matrix(1.0, 0.0, 0.0, 1.0))
    assert (c1, c2) == (2.0, 1.0)


def test_mu_coefficients_decoupled():
    L13, L24 = 0.7 - 0.2j, -1.1 + 0.4j
    c1, c2 = gsqg.mu_coefficients(make_matrix(L13, 0.0, 0.0, L24))
    assert c1 == pytest.approx(abs(L13) ** 2 + abs(L24) ** 2)
    assert c2 == pytest.approx(abs(L13) ** 2 * abs(L24) ** 2)


def test_mu_roots_worked_example():
    # b^2 = 5, c1 = 4, c2 = 3: disc = 4, mu^2 in {4, 2}
    res = gsqg.mu_roots(np.sqrt(5.0), 4.0, 3.0)
    assert res.ok
    assert np.allclose(np.sort(res.roots), [-2, -np.sqrt(2), np.sqrt(2), 2])


def test_mu_roots_complex_failure():
    res = gsqg.mu_roots(1.0, 1.0, 10.0)
    assert not res.ok and "complex" in res.failure


def test_mu_roots_negative_failure():
    res = gsqg.mu_roots(0.1, 4.0, 3.0)
    assert not res.ok and "negative" in res.failure


# ---------------------------------------------------------------- eigen4

def test_eigen4_diagonal():
    M = StabilityMatrix(entries=np.diag([1.0, 2j, -1.0, -2j]).astype(complex),
                        a_rate=0.0, b_rate=0.0, off=(0, 0, 0, 0))
    assert np.allclose(np.sort_complex(gsqg.eigen4(M)),
                       np.sort_complex(np.array([1.0, 2j, -1.0, -2j])))


def test_eigen4_cross_checks_mu_roots(thm_report):
    assert thm_report.mu.ok
    eigs = thm_report.eigenvalues
    assert np.max(np.abs(eigs.real + thm_report.a_rate)) <= 1e-8
    assert np.allclose(np.sort(eigs.imag), np.sort(thm_report.mu.roots), atol=1e-8)


def test_repeated_eigenvalues_flagged():
    # c1 = 2, c2 = 1 with b = 2: disc = 0, quartic (mu^2 - 3)^2
    M = make_matrix(1.0, 0.0, 0.0, 1.0, a=0.5, b=2.0)
    res = gsqg.mu_roots(2.0, *gsqg.mu_coefficients(M))
    assert not res.ok                      # strict inequality fails at disc = 0
    eigs = gsqg.eigen4(M)
    assert np.allclose(np.sort(eigs.imag), [-np.sqrt(3), -np.sqrt(3),
                                            np.sqrt(3), np.sqrt(3)], atol=1e-9)
    assert np.allclose(eigs.real, -0.5, atol=1e-12)


# ---------------------------------------------------------------- hypothesis check

def test_hypothesis_passes_on_reference(thm_report):
    assert thm_report.passed
    assert thm_report.mu.ok and len(thm_report.mu.roots) == 4
    assert thm_report.a_rate == pytest.approx(THM_A, abs=1e-12)


def test_hypothesis_fails_below_lower_exponent():
    for x in (0.55, 0.70, 0.85):
        cfg = gsqg.oriented_config(0.9, x)
        assert not gsqg.hypothesis_a_check(cfg).passed


def test_hypothesis_fails_for_relative_equilibrium():
    w = np.exp(2j * np.pi * np.arange(3) / 3)
    cfg = gsqg.TripleConfig(a=w, xi=np.array([1.0, 1.0, 1.0]), alpha=1.5)
    rep = gsqg.hypothesis_a_check(cfg)
    assert not rep.passed and not rep.a_positive


def test_report_json_has_intermediates(thm_report):
    import json

    obj = json.loads(thm_report.to_json())
    assert obj["passed"] is True
    assert len(obj["mu"]) == 4 and len(obj["eigenvalues"]) == 4
    assert set(obj["L"]) == {"L13", "L14", "L23", "L24"}


# ---------------------------------------------------------------- spectrum invariants

@pytest.mark.parametrize("seed", range(6))
def test_spectrum_conjugation_closed_and_trace(seed):
    rng = np.random.default_rng(seed)
    L = rng.normal(size=4) + 1j * rng.normal(size=4)
    a, b = rng.uniform(0.05, 0.5), rng.uniform(-1, 1)
    M = make_matrix(*L, a=a, b=b)
    eigs = gsqg.eigen4(M)
    # multiset closure under conjugation
    for lam in eigs:
        assert np.min(np.abs(np.conj(lam) - eigs)) <= 1e-10
    assert np.trace(M.entries) == pytest.approx(-4 * a, rel=1e-10)
    assert np.sum(eigs) == pytest.approx(-4 * a, abs=1e-10)


def test_mu_eigen_agreement_on_sweep_sample():
    # 200 admissible parameter points spread over the open stability window
    pts = []
    for alpha in np.linspace(1.15, 1.95, 9):
        xs = np.arange(0.3, 1.0, 7e-4)
        margin = _margin_grid(alpha, xs)
        good = xs[margin > 0]
        take = good[:: max(1, len(good) // 24)]
        pts += [(alpha, float(x)) for x in take]
    assert len(pts) >= 200
    worst = 0.0
    for alpha, x in pts[:220]:
        rep = gsqg.hypothesis_a_check(gsqg.oriented_config(alpha, x))
        assert rep.passed
        predicted = np.sort(rep.mu.roots)
        from_eigs = np.sort(rep.eigenvalues.imag)
        worst = max(worst, float(np.max(np.abs(predicted - from_eigs))))
        worst = max(worst, float(np.max(np.abs(rep.eigenvalues.real + rep.a_rate))))
    assert worst <= 1e-7


def test_intensity_scaling_homogeneity(thm_centered):
    # scaling all intensities by lam scales (a, b, L) by lam and leaves the
    # eigenvalue condition's truth value unchanged
    lam = 3.7
    a0, b0, _ = gsqg.selfsimilar_rate(thm_centered)
    M0 = gsqg.l_matrix(thm_centered, a0, b0)
    scaled = gsqg.TripleConfig(a=thm_centered.a, xi=lam * thm_centered.xi,
                               alpha=thm_centered.alpha)
    a1, b1, _ = gsqg.selfsimilar_rate(scaled)
    M1 = gsqg.l_matrix(scaled, a1, b1)
    assert a1 == pytest.approx(lam * a0, rel=1e-12)
    assert b1 == pytest.approx(lam * b0, rel=1e-12)
    assert np.allclose(np.array(M1.off), lam * np.array(M0.off), rtol=1e-12)
    c1a, c2a = gsqg.mu_coefficients(M0)
    c1b, c2b = gsqg.mu_coefficients(M1)
    assert gsqg.mu_roots(b0, c1a, c2a).ok == gsqg.mu_roots(b1, c1b, c2b).ok


# ---------------------------------------------------------------- propagator

def test_propagator_identity_at_t1(thm_report):
    assert gsqg.propagator_norm(thm_report.matrix, 1.0, 1.0) == pytest.approx(1.0)


def test_propagator_exact_power_for_normal_matrix():
    # zero off-diagonal block: the matrix is normal with Re(eig) = -a
    M = make_matrix(0.0, 0.0, 0.0, 0.0, a=0.25, b=0.8)
    alpha = 1.0
    for t in (0.5, 1e-2, 1e-5):
        assert gsqg.propagator_norm(M, alpha, t) == pytest.approx(
            t ** (-1.0 / (4 - alpha)), rel=1e-12)


def test_propagator_slope_asymptotics(thm_report):
    # the reference matrix is far from normal: the decay prefactor kappa
    # oscillates boundedly, so the power law only emerges over very many
    # decades; the pinned window [1e-6, 1e-1] is recorded separately in
    # the acceptance suite
    M = thm_report.matrix
    ts = np.geomspace(1e-60, 1e-1, 40)
    norms = np.array([gsqg.propagator_norm(M, 1.0, t) for t in ts])
    slope, _ = np.polyfit(np.log(ts), np.log(norms), 1)
    assert slope == pytest.approx(-1.0 / 3.0, abs=0.05)
    kappa = norms * ts ** (1.0 / 3.0)
    assert np.all(kappa > 1.0) and np.all(kappa < 2e3)   # recorded, bounded
