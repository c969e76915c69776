import math

import numpy as np
import pytest

from diracfield.algebra import (
    LadderConvention,
    ModelParams,
    build_full_hamiltonian,
    build_invariant,
    invariant_value,
)
from diracfield.dynamics import (
    LN2,
    Propagator,
    StateVector,
    dirac_oscillator_state,
    entanglement_trajectory,
    evolve,
    prepare_initial,
    purity_entropy,
    reduce_isospin,
    state_to_vector,
)

FIG_PARAMS = ModelParams(1, 3.2, 0.0, 1.0, 1.2, 3.1)


def dense_evolution(state, t, params, n_max=10):
    """Brute-force oracle: eigendecompose the truncated full matrix."""
    h = build_full_hamiltonian(params, n_max)
    w, u = np.linalg.eigh(h.entries)
    v0 = state_to_vector(state, h.basis)
    vt = u @ (np.exp(-1j * w * t) * (u.conj().T @ v0))
    return h.basis, vt


def test_oscillator_state_is_exact_eigenvector():
    for n in (0, 1, 5):
        for sign in ("positive", "negative"):
            osc = dirac_oscillator_state(n, FIG_PARAMS, sign)
            c = math.sqrt(n + 1.0)
            two = np.array([[FIG_PARAMS.m, c], [c, -FIG_PARAMS.m]])
            v = np.array([osc.amp_plus, osc.amp_minus])
            assert np.linalg.norm(two @ v - osc.energy * v) < 1e-12
            assert np.linalg.norm(v) == pytest.approx(1.0)
    assert dirac_oscillator_state(2, FIG_PARAMS).energy == pytest.approx(
        math.sqrt(3.0 + 3.2 ** 2))


def test_oscillator_state_respects_convention():
    stretched = ModelParams(1, 3.2, 0.0, 1.0, 1.2, 3.1,
                            LadderConvention(scale=math.sqrt(2.0)))
    osc = dirac_oscillator_state(3, stretched)
    assert osc.energy == pytest.approx(math.sqrt(3.2 ** 2 + 2.0 * 4.0))


def test_prepare_initial_support_and_norm():
    state = prepare_initial(2, math.pi / 3, FIG_PARAMS)
    assert state.norm() == pytest.approx(1.0, abs=1e-14)
    assert set(lab[:2] for lab in state.amplitudes) == {(2, 1), (3, -1)}
    # doublet weights divide each oscillator component as cos/sin
    a_pp = state.amplitudes[(2, 1, 1)]
    a_pm = state.amplitudes[(2, 1, -1)]
    assert abs(a_pm / a_pp) == pytest.approx(math.tan(math.pi / 3))


def test_prepare_initial_theta_zero_is_product_with_plus():
    state = prepare_initial(0, 0.0, FIG_PARAMS)
    assert all(lab[2] == 1 for lab in state.amplitudes)
    purity, entropy = purity_entropy(reduce_isospin(state))
    assert purity == pytest.approx(1.0, abs=1e-14)
    assert entropy == pytest.approx(0.0, abs=1e-14)


def test_prepare_initial_rejects_other_dimensions():
    with pytest.raises(ValueError):
        prepare_initial(0, 0.3, ModelParams(2, 1.0, 0.0, 1.0, 1.0, 0.0))


def test_decomposition_touches_sectors_read_from_invariant():
    state = prepare_initial(0, math.pi / 4, FIG_PARAMS)
    expected = {int(invariant_value(lab, FIG_PARAMS))
                for lab in state.amplitudes}
    assert expected == {0, -1}
    prop = Propagator(FIG_PARAMS)
    parts = prop.decompose(state)
    assert len(parts) == len(expected)
    sizes = sorted(len(states) for states, *_ in parts)
    assert sizes == [3, 4]


def test_evolution_matches_dense_oracle():
    params = FIG_PARAMS
    state0 = prepare_initial(1, math.pi / 4, params)
    for t in (0.3, 2.0, 7.7):
        state_t = evolve(state0, t, params)
        basis, oracle = dense_evolution(state0, t, params)
        mine = state_to_vector(state_t, basis)
        assert np.max(np.abs(mine - oracle)) < 1e-12


def test_evolution_preserves_norm_energy_invariant():
    params = FIG_PARAMS
    state0 = prepare_initial(0, math.pi / 4, params)
    h = build_full_hamiltonian(params, 8)
    inv = build_invariant(params, 8)
    ref_e = ref_i = None
    for t in np.linspace(0.0, 40.0, 17):
        vec = state_to_vector(evolve(state0, float(t), params), h.basis)
        assert abs(np.vdot(vec, vec).real - 1.0) < 1e-13
        e = np.vdot(vec, h.entries @ vec).real
        i_val = np.vdot(vec, inv.entries @ vec).real
        if ref_e is None:
            ref_e, ref_i = e, i_val
        assert abs(e - ref_e) < 1e-11
        assert abs(i_val - ref_i) < 1e-11


def test_reduced_density_against_partial_trace():
    params = FIG_PARAMS
    state = evolve(prepare_initial(0, math.pi / 4, params), 3.3, params)
    basis, vec = dense_evolution(prepare_initial(0, math.pi / 4, params),
                                 3.3, params)
    rho = np.zeros((2, 2), dtype=complex)
    for i, lab_i in enumerate(basis.labels):
        for k, lab_k in enumerate(basis.labels):
            if lab_i[:2] == lab_k[:2]:
                r = 0 if lab_i[2] == 1 else 1
                c = 0 if lab_k[2] == 1 else 1
                rho[r, c] += vec[i] * np.conj(vec[k])
    reduced = reduce_isospin(state)
    assert np.max(np.abs(reduced.rho_iso - rho)) < 1e-12
    assert abs(np.trace(reduced.rho_iso).real - 1.0) < 1e-12


def test_purity_entropy_bounds_and_extremes():
    from diracfield.dynamics import ReducedDensity
    pure = ReducedDensity(np.diag([1.0, 0.0]).astype(complex),
                          np.array([0.0, 1.0]))
    assert purity_entropy(pure) == (1.0, 0.0)
    mixed = ReducedDensity(np.eye(2, dtype=complex) / 2.0,
                           np.array([0.5, 0.5]))
    p, s = purity_entropy(mixed)
    assert p == pytest.approx(0.5)
    assert s == pytest.approx(LN2)


def test_trajectory_bounds_fig_parameters():
    times = np.linspace(0.0, 30.0, 61)
    for theta in (0.0, math.pi / 4):
        points = entanglement_trajectory(0, theta, FIG_PARAMS, times)
        assert len(points) == times.size
        for pt in points:
            assert 0.5 - 1e-12 <= pt.purity <= 1.0 + 1e-12
            assert -1e-12 <= pt.entropy <= LN2 + 1e-12
            assert pt.gamma == FIG_PARAMS.gamma
        assert points[0].purity == pytest.approx(1.0, abs=1e-12)
        assert points[0].entropy == pytest.approx(0.0, abs=1e-12)


def test_trajectory_equals_pointwise_evolution():
    times = np.array([0.0, 1.1, 4.4])
    points = entanglement_trajectory(1, 0.9, FIG_PARAMS, times)
    state0 = prepare_initial(1, 0.9, FIG_PARAMS)
    for pt in points:
        state = evolve(state0, pt.t, FIG_PARAMS)
        p_ref, s_ref = purity_entropy(reduce_isospin(state))
        assert pt.purity == pytest.approx(p_ref, abs=1e-13)
        assert pt.entropy == pytest.approx(s_ref, abs=1e-13)


def test_trajectory_rejects_bad_grid():
    with pytest.raises(ValueError):
        entanglement_trajectory(0, 0.1, FIG_PARAMS, [])
    with pytest.raises(ValueError):
        entanglement_trajectory(0, 0.1, FIG_PARAMS, [1.0, 0.5])


def test_propagator_rejects_unknown_sector():
    prop = Propagator(FIG_PARAMS)
    with pytest.raises(ValueError):
        prop.sector(-3)


def test_state_to_vector_missing_label():
    basis = build_full_hamiltonian(FIG_PARAMS, 4).basis
    state = StateVector(amplitudes={(9, 1, 1): 1.0})
    with pytest.raises(ValueError):
        state_to_vector(state, basis)
