"""Smoke tests of the python module against the builtin datasets."""

import math

import pytest

import mesoncp as m


def test_version():
    assert m.__version__


def test_kaon_epsilon_windows():
    ds = m.builtin_dataset("kaon")
    assert ds.time_unit == "s"
    eth = m.epsilon_renormalized(ds.params)
    assert 1.16e-3 < abs(eth.value) < 1.42e-3
    assert 44.3 < abs(math.degrees(math.atan2(eth.value.imag, eth.value.real))) < 49.3
    assert not eth.flagged


def test_bs_q_over_p():
    ds = m.builtin_dataset("Bs")
    qp = m.q_over_p(m.epsilon_renormalized(ds.params))
    assert 0.95 < qp.modulus < 0.97


def test_hamiltonian_and_cpt():
    p = m.builtin_dataset("kaon").params
    c = m.couplings_from_params(p, 0.0, math.pi / 2)
    h = m.build_effective_hamiltonian(c)
    assert h.basis == m.Basis.CpEigen
    entries = h.matrix()
    assert entries[0].imag == pytest.approx(-0.5 * p.gamma_short, rel=1e-12)
    report = m.cpt_check(m.to_flavor_basis(h), 1e-10)
    assert report.satisfied
    pairs = m.eigensystem(h)
    assert pairs[0].value.imag == pytest.approx(-0.5 * p.gamma_short, rel=1e-3)
    assert m.cpt_allowed_phases(-1, 0) == pytest.approx([-math.pi / 2, math.pi / 2])


def test_wavefunction_and_densities():
    p = m.builtin_dataset("kaon").params
    w = m.build_wavefunction(p, m.epsilon_bare(p))
    wp, wm = m.sector_weights(w)
    assert wp + wm == pytest.approx(1.0, abs=1e-12)
    grid = [k * p.tau_short() for k in range(50)]
    dens = m.density_cp(w, 1, grid)
    amps = m.psi_tilde(w, grid[3])
    assert dens.values[3] == pytest.approx(abs(amps[0]) ** 2, rel=1e-12)


def test_sampling_determinism_and_histogram():
    p = m.builtin_dataset("kaon").params
    w = m.build_wavefunction(p, m.epsilon_bare(p))
    a = m.sample_decays(w, 500, 42)
    b = m.sample_decays(w, 500, 42)
    assert a.times == b.times
    assert a.sectors == b.sectors
    edges = [k * p.tau_short() for k in range(21)]
    hist = m.histogram(a, m.SectorFilter.All, edges)
    assert hist.n_used + hist.n_overflow == 500


def test_fit_round_trip():
    truth = m.FitParams()
    truth.delta_m = 0.5
    truth.eps_mod = 0.03
    truth.eps_arg = 0.8
    truth.gamma_short = 1.0
    truth.gamma_long = 1.0 / 579.6
    truth.scale = 1.0
    grid = [0.05 * k for k in range(300)]
    values = [m.intensity_model(t, truth) for t in grid]
    data = m.IntensitySeries(grid, values)
    cfg = m.FitConfig()
    cfg.initial = truth
    cfg.initial.delta_m = 0.55
    res = m.fit_intensity(data, cfg)
    assert res.converged
    assert res.params.delta_m == pytest.approx(0.5, rel=1e-6)


def test_evolution_matches_exponential_decay():
    p = m.builtin_dataset("kaon").params
    c = m.couplings_from_params(p, 0.0, math.pi / 2)
    grid = [k * p.tau_short() / 4 for k in range(9)]
    states = m.evolve_exact(c, m.FormFactor(), [1.0 + 0.0j, 0.0j], grid)
    # the CP=-1 admixture perturbs the pure exponential at O(eps)
    for t, (f1, _) in zip(grid, states):
        assert abs(f1) ** 2 == pytest.approx(math.exp(-p.gamma_short * t), rel=1e-2)


def test_errors_are_raised():
    with pytest.raises(Exception):
        m.builtin_dataset("pion")
    with pytest.raises(Exception):
        m.survival_probability(1.0, -1.0)
