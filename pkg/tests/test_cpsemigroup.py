import numpy as np
import pytest

from eigenlab import cpsemigroup as cps
from eigenlab.densop import DensityOperator, random_density, random_unitary
from eigenlab.errors import BadDim, NotFaithful, NotInvariant, NotUnital


def amplitude_damping(gamma):
    v = np.zeros((2, 2), dtype=complex)
    v[0, 1] = np.sqrt(gamma)
    return cps.LindbladGenerator(2, np.zeros((2, 2)), (v,))


def test_not_faithful():
    with pytest.raises(NotFaithful):
        cps.build_detailed_balance_generator([1.0, 0.0])
    with pytest.raises(NotFaithful):
        cps.build_detailed_balance_generator([0.5, 0.2])


def test_bad_dim():
    with pytest.raises(BadDim):
        cps.build_detailed_balance_generator([1.0])
    with pytest.raises(BadDim):
        cps.CPSemigroup(cps.build_detailed_balance_generator(np.full(9, 1 / 9)))


def test_rate_ratio_balances_weights():
    omega = [0.5, 0.3, 0.2]
    gen = cps.build_detailed_balance_generator(omega, rate_scale=2.0)
    for i in range(3):
        for j in range(3):
            if i != j:
                assert cps.jump_rate(gen, i, j) * omega[j] == pytest.approx(
                    cps.jump_rate(gen, j, i) * omega[i], rel=1e-13
                )
    assert cps.invariance_deviation(gen, np.diag(omega)) <= 1e-14


def test_uniform_weights_give_symmetric_rates():
    gen = cps.build_detailed_balance_generator([0.25] * 4)
    rates = np.array([[cps.jump_rate(gen, i, j) for j in range(4)] for i in range(4)])
    assert np.allclose(rates, rates.T)


def test_not_unital_generator():
    with pytest.raises(NotUnital):
        # an anti-Hermitian "Hamiltonian" is rejected by the Hermitian check,
        # so break unitality through a bad jump list instead
        class Broken(cps.LindbladGenerator):
            def heisenberg(self, x):
                return np.asarray(x, dtype=complex)

        Broken(2, np.zeros((2, 2)), ())


def test_superoperators_match_direct_application():
    gen = cps.build_detailed_balance_generator([0.6, 0.3, 0.1], dephasing=0.3)
    rng = np.random.default_rng(0)
    x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.allclose((gen.heisenberg_matrix() @ x.ravel()).reshape(3, 3), gen.heisenberg(x))
    assert np.allclose((gen.schrodinger_matrix() @ x.ravel()).reshape(3, 3), gen.schrodinger(x))


@pytest.mark.parametrize("t", [0.0, 0.3, 1.0, 4.0])
def test_amplitude_damping_closed_form(t):
    gamma = 0.7
    sg = cps.CPSemigroup(amplitude_damping(gamma))
    rho = random_density(2, seed=4).matrix
    out = cps.evolve_state(sg, rho, t).matrix
    decay = np.exp(-gamma * t)
    assert out[1, 1] == pytest.approx(rho[1, 1] * decay, abs=1e-12)
    assert out[0, 0] == pytest.approx(rho[0, 0] + rho[1, 1] * (1 - decay), abs=1e-12)
    assert out[0, 1] == pytest.approx(rho[0, 1] * np.exp(-gamma * t / 2), abs=1e-12)


def test_duality():
    gen = cps.build_detailed_balance_generator([0.7, 0.2, 0.1], dephasing=0.5)
    sg = cps.CPSemigroup(gen)
    rng = np.random.default_rng(1)
    for t in (0.2, 1.5):
        rho = random_density(3, seed=int(10 * t)).matrix
        x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        lhs = np.trace(cps.evolve_state(sg, rho, t).matrix @ x)
        rhs = np.trace(rho @ cps.heisenberg_apply(sg, x, t))
        assert abs(lhs - rhs) <= 1e-12


def test_unital_and_trace_preserving():
    sg = cps.CPSemigroup(cps.build_detailed_balance_generator([0.5, 0.5], dephasing=1.0))
    assert np.allclose(cps.heisenberg_apply(sg, np.eye(2), 3.0), np.eye(2), atol=1e-13)
    assert np.trace(cps.evolve_state(sg, np.diag([1.0, 0.0]), 3.0).matrix).real == pytest.approx(1.0)


def test_semigroup_property():
    sg = cps.CPSemigroup(cps.build_detailed_balance_generator([0.6, 0.4], dephasing=0.2))
    assert cps.semigroup_property_check(sg, [(0.5, 1.5), (0.0, 2.0), (3.0, 7.0)]) <= 1e-12


def test_negative_time_rejected():
    sg = cps.CPSemigroup(amplitude_damping(1.0))
    with pytest.raises(ValueError):
        sg.heisenberg_map(-1.0)


@pytest.mark.parametrize("t", [0.0, 0.1, 1.0, 10.0])
def test_choi_psd(t):
    sg = cps.CPSemigroup(cps.build_detailed_balance_generator([0.5, 0.3, 0.2], dephasing=0.1))
    c = cps.choi_matrix(sg, t)
    assert np.allclose(c, c.conj().T, atol=1e-12)
    assert np.linalg.eigvalsh(c)[0] >= -1e-10


def test_choi_identity_at_zero():
    sg = cps.CPSemigroup(amplitude_damping(1.0))
    v = np.eye(2).ravel()
    assert np.allclose(cps.choi_matrix(sg, 0.0), np.outer(v, v))


def test_absorbing_ergodic():
    omega = np.diag([0.75, 0.25])
    sg = cps.CPSemigroup(cps.build_detailed_balance_generator([0.75, 0.25], dephasing=0.5))
    rep = cps.verify_absorbing(sg, omega, trials=10)
    assert rep.ergodic
    assert rep.worst_final <= 1e-6
    assert all(tr.monotone for tr in rep.trials)


def test_absorbing_disconnected():
    # pure dephasing leaves populations untouched
    deph = np.diag([1.0, 0.0]).astype(complex)
    gen = cps.LindbladGenerator(2, np.zeros((2, 2)), (deph,))
    sg = cps.CPSemigroup(gen)
    rep = cps.verify_absorbing(sg, np.eye(2) / 2, trials=3, initial=[np.diag([1.0, 0.0])])
    assert not rep.ergodic
    assert rep.trials[0].final == pytest.approx(1.0, abs=1e-12)


def test_absorbing_rejects_non_invariant():
    sg = cps.CPSemigroup(amplitude_damping(1.0))
    with pytest.raises(NotInvariant):
        cps.verify_absorbing(sg, np.eye(2) / 2)


def test_generator_json_roundtrip():
    gen = cps.build_detailed_balance_generator([0.6, 0.4], dephasing=0.2)
    back = cps.LindbladGenerator.from_json(gen.to_json())
    assert np.allclose(back.heisenberg_matrix(), gen.heisenberg_matrix())


# -- compression ------------------------------------------------------------


def test_compress_faithful_gives_identity_projection():
    u = random_unitary(3, np.random.default_rng(2))
    rep = cps.compress_unital_cp([u], np.eye(3) / 3)
    assert np.allclose(rep.projection, np.eye(3))
    assert rep.monotone
    assert rep.corner_deviation <= 1e-12


def test_compress_amplitude_damping_channel():
    g = 0.4
    k0 = np.diag([1.0, np.sqrt(1 - g)])
    k1 = np.array([[0.0, np.sqrt(g)], [0.0, 0.0]])
    rep = cps.compress_unital_cp([k0, k1], np.diag([1.0, 0.0]))
    assert np.allclose(rep.projection, np.diag([1.0, 0.0]))
    assert rep.monotone
    assert rep.corner_deviation <= 1e-12
    assert rep.invariance_deviation <= 1e-12
    assert np.allclose(rep.compressed(np.eye(1)), np.eye(1))


def block_upper_channel(seed):
    # Kraus operators with P_perp K P = 0 for P the first two coordinates
    rng = np.random.default_rng(seed)
    u1 = random_unitary(2, rng)
    u2 = random_unitary(2, rng)
    c = 0.6
    k0 = np.zeros((4, 4), dtype=complex)
    k0[:2, :2] = u1
    k0[2:, 2:] = np.sqrt(c) * u2
    k1 = np.zeros((4, 4), dtype=complex)
    k1[:2, 2:] = np.sqrt(1 - c) * random_unitary(2, rng)
    return [k0, k1], u1


@pytest.mark.parametrize("seed", range(5))
def test_compress_block_structured(seed):
    kraus, _ = block_upper_channel(seed)
    w = np.zeros((4, 4), dtype=complex)
    w[:2, :2] = np.eye(2) / 2
    rep = cps.compress_unital_cp(kraus, w, seed=seed)
    assert rep.monotone
    assert rep.corner_deviation <= 1e-12
    assert rep.invariance_deviation <= 1e-12
    v = rep.isometry
    x = random_density(2, seed=seed).matrix
    # K1 kills the support, so only K0 survives the compression
    w = v.conj().T @ kraus[0] @ v
    assert np.allclose(rep.compressed(x), w.conj().T @ x @ w, atol=1e-12)
    assert np.allclose(v @ v.conj().T, rep.projection, atol=1e-12)


def test_compress_mixed_unitary():
    rng = np.random.default_rng(8)
    us = [np.kron(np.eye(1), random_unitary(3, rng)) for _ in range(3)]
    kraus = [u / np.sqrt(3) for u in us]
    rep = cps.compress_unital_cp(kraus, np.eye(3) / 3)
    assert rep.monotone and rep.corner_deviation <= 1e-12


def test_compress_rejects_non_unital_and_non_invariant():
    with pytest.raises(NotUnital):
        cps.compress_unital_cp([np.eye(2) * 2], np.eye(2) / 2)
    g = 0.4
    k0 = np.diag([1.0, np.sqrt(1 - g)])
    k1 = np.array([[0.0, np.sqrt(g)], [0.0, 0.0]])
    with pytest.raises(NotInvariant):
        cps.compress_unital_cp([k0, k1], DensityOperator(np.diag([0.0, 1.0])))


def test_two_level_flow_ratio():
    # e_ij moves population from level j to level i; with weights (3/4, 1/4)
    # the flow out of the heavier level is a third of the flow back into it
    gen = cps.build_detailed_balance_generator([0.75, 0.25])
    assert cps.jump_rate(gen, 1, 0) / cps.jump_rate(gen, 0, 1) == pytest.approx(1 / 3, rel=1e-14)
    assert cps.invariance_deviation(gen, np.diag([0.75, 0.25])) <= 1e-10
