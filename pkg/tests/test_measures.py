import numpy as np
import pytest

from spincoh import linalg, measures, oracle
from spincoh.cue import sample_cue
from spincoh.models import spin1_operators

QUTRIT_EYE = np.eye(3)
LOG2_3 = np.log2(3.0)


def kk_state():
    """Classically correlated state sum_k |kk><kk| / 3."""
    rho = np.zeros((9, 9), dtype=complex)
    for k in range(3):
        rho[k * 3 + k, k * 3 + k] = 1.0 / 3.0
    return rho


def max_entangled():
    v = np.zeros(9)
    v[[0, 4, 8]] = 1.0 / np.sqrt(3.0)
    return np.outer(v, v).astype(complex)


def product_state(seed=0):
    rng = np.random.default_rng(seed)
    return np.kron(linalg.random_density_matrix(3, rng),
                   linalg.random_density_matrix(3, rng))


FAST = measures.DiscordConfig(restarts=8, seed=0)


def test_mutual_information_analytic():
    assert abs(measures.mutual_information(product_state())) < 1e-12
    assert abs(measures.mutual_information(max_entangled()) - 2 * LOG2_3) < 1e-12
    assert abs(measures.mutual_information(kk_state()) - LOG2_3) < 1e-12


def test_conditional_state_projective_cases():
    rho = np.zeros((9, 9), dtype=complex)
    rho[0, 0] = 1.0  # |00><00|
    p, ra = measures.conditional_state(rho, np.outer(QUTRIT_EYE[0], QUTRIT_EYE[0]))
    assert abs(p - 1.0) < 1e-12
    assert np.allclose(ra, np.outer(QUTRIT_EYE[0], QUTRIT_EYE[0]))

    me = max_entangled()
    for k in range(3):
        p, ra = measures.conditional_state(me, np.outer(QUTRIT_EYE[k], QUTRIT_EYE[k]))
        assert abs(p - 1.0 / 3.0) < 1e-12
        assert np.max(np.abs(ra - np.outer(QUTRIT_EYE[k], QUTRIT_EYE[k]))) < 1e-12


def test_conditional_probabilities_sum_to_one():
    rng = np.random.default_rng(1)
    rho = linalg.random_density_matrix(9, rng)
    u = sample_cue(3, 2)
    ps = [measures.conditional_state(rho, np.outer(u[:, k], u[:, k].conj()))[0]
          for k in range(3)]
    assert abs(sum(ps) - 1.0) < 1e-12


def test_conditional_state_zero_probability_branch():
    rho = np.zeros((9, 9), dtype=complex)
    rho[0, 0] = 1.0
    p, ra = measures.conditional_state(rho, np.outer(QUTRIT_EYE[2], QUTRIT_EYE[2]))
    assert p < 1e-14 and ra is None


def test_classical_correlation_analytic():
    val, basis, _ = measures.classical_correlation(kk_state(), (3, 3), FAST)
    assert abs(val - LOG2_3) < 1e-6
    # the optimal basis is the reference basis (up to permutation/phases)
    fp = basis.fingerprint()
    assert np.max(np.abs(np.sort(fp, axis=0) - np.sort(np.eye(3), axis=0))) < 1e-3

    val, _, _ = measures.classical_correlation(product_state(), (3, 3), FAST)
    assert abs(val) < 1e-9

    val, _, _ = measures.classical_correlation(max_entangled(), (3, 3), FAST)
    assert abs(val - LOG2_3) < 1e-3


def test_discord_identity_and_bounds():
    rng = np.random.default_rng(3)
    for _ in range(3):
        rho = linalg.random_density_matrix(9, rng)
        res = measures.quantum_discord(rho, (3, 3), FAST)
        assert abs(res.discord + res.classical_correlation
                   - res.mutual_information) < 1e-9
        assert res.discord > -1e-9
        assert res.discord <= res.mutual_information + 1e-9
        assert 1 <= res.restarts_within_tol <= FAST.restarts


def test_discord_analytic_states():
    assert abs(measures.quantum_discord(product_state(), (3, 3), FAST).discord) < 1e-6
    res = measures.quantum_discord(max_entangled(), (3, 3), FAST)
    assert abs(res.discord - LOG2_3) < 1e-3


def test_discord_zero_on_classical_quantum_states():
    rng = np.random.default_rng(4)
    rho = sum(p * np.kron(linalg.random_density_matrix(3, rng),
                          np.outer(QUTRIT_EYE[k], QUTRIT_EYE[k]))
              for k, p in enumerate([0.5, 0.3, 0.2]))
    res = measures.quantum_discord(rho, (3, 3), FAST)
    assert res.discord < 1e-6


def test_discord_pure_state_equals_entanglement_entropy():
    rng = np.random.default_rng(5)
    psi = linalg.random_pure_state(9, rng)
    rho = np.outer(psi, psi.conj())
    s_a = linalg.von_neumann_entropy(linalg.partial_trace(rho, (3, 3), "B"))
    res = measures.quantum_discord(rho, (3, 3),
                                   measures.DiscordConfig(restarts=12, seed=1))
    assert abs(res.discord - s_a) < 1e-3


def test_discord_matches_brute_force():
    rho = linalg.random_density_matrix(9, np.random.default_rng(11))
    res = measures.quantum_discord(rho, (3, 3),
                                   measures.DiscordConfig(restarts=24, seed=2))
    bf = oracle.brute_force_discord(rho, samples=3000, polish_iters=250, seed=3)
    assert abs(res.discord - bf) < 1e-3


def test_discord_nonincreasing_in_restarts():
    rho = linalg.random_density_matrix(9, np.random.default_rng(12))
    values = []
    for restarts in (2, 6, 12):
        cfg = measures.DiscordConfig(restarts=restarts, seed=7)
        values.append(measures.quantum_discord(rho, (3, 3), cfg).discord)
    # same seed sequence prefix: more restarts can only improve C
    assert values[1] <= values[0] + 1e-12
    assert values[2] <= values[1] + 1e-12


def test_discord_measurement_side_a():
    # on a classical-quantum state with the classical side A, measuring A
    # reveals everything
    rng = np.random.default_rng(6)
    rho = sum(p * np.kron(np.outer(QUTRIT_EYE[k], QUTRIT_EYE[k]),
                          linalg.random_density_matrix(3, rng))
              for k, p in enumerate([0.6, 0.25, 0.15]))
    cfg = measures.DiscordConfig(restarts=8, seed=0, measurement_side="A")
    assert measures.quantum_discord(rho, (3, 3), cfg).discord < 1e-6


def test_discord_povm_mode_consistent():
    rho = linalg.random_density_matrix(9, np.random.default_rng(13), rank=3)
    proj = measures.quantum_discord(rho, (3, 3),
                                    measures.DiscordConfig(restarts=16, seed=4))
    povm = measures.quantum_discord(
        rho, (3, 3), measures.DiscordConfig(restarts=16, seed=4, mode="povm",
                                            povm_outcomes=3))
    # a 3-outcome dilated measurement can reproduce any projective one
    assert povm.classical_correlation >= proj.classical_correlation - 2e-3
    povm.optimal_basis.validate()


def test_povm_mode_more_outcomes_never_worse():
    rho = kk_state()
    res = measures.quantum_discord(
        rho, (3, 3), measures.DiscordConfig(restarts=10, seed=5, mode="povm",
                                            povm_outcomes=4))
    assert res.classical_correlation > LOG2_3 - 1e-4
    assert res.discord < 1e-4


# --- coherence measures -----------------------------------------------------


def test_rel_entropy_coherence_values():
    assert measures.rel_entropy_coherence(np.diag([0.2, 0.5, 0.3])) == 0.0
    v = np.ones(3) / np.sqrt(3.0)
    rho = np.outer(v, v)
    assert abs(measures.rel_entropy_coherence(rho) - LOG2_3) < 1e-12


def test_rel_entropy_coherence_recomputation():
    rng = np.random.default_rng(7)
    for _ in range(5):
        rho = linalg.random_density_matrix(4, rng)
        expect = (linalg.entropy_of_probabilities(np.diag(rho).real)
                  - linalg.von_neumann_entropy(rho))
        assert abs(measures.rel_entropy_coherence(rho) - expect) < 1e-12
        assert measures.rel_entropy_coherence(rho) > -1e-12


def test_l1_coherence_values():
    assert measures.l1_coherence(np.diag([0.2, 0.5, 0.3])) == 0.0
    v = np.ones(3) / np.sqrt(3.0)
    assert abs(measures.l1_coherence(np.outer(v, v)) - 2.0) < 1e-12


def test_coherences_invariant_under_diagonal_phases():
    rng = np.random.default_rng(8)
    rho = linalg.random_density_matrix(3, rng)
    d = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, 3)))
    rot = d @ rho @ d.conj().T
    assert abs(measures.l1_coherence(rho) - measures.l1_coherence(rot)) < 1e-10
    assert abs(measures.rel_entropy_coherence(rho)
               - measures.rel_entropy_coherence(rot)) < 1e-10


def test_skew_information_pure_state_is_variance():
    ops = spin1_operators()
    rho = np.zeros((3, 3), dtype=complex)
    rho[0, 0] = 1.0  # |m=+1>
    val = measures.skew_information(rho, ops.sx)
    assert abs(val - 0.5) < 1e-12
    assert abs(val - measures.variance(rho, ops.sx)) < 1e-12


def test_skew_information_vanishes_for_commuting():
    ops = spin1_operators()
    rho = np.diag([0.5, 0.3, 0.2]).astype(complex)
    assert measures.skew_information(rho, ops.sz) < 1e-12


def test_skew_information_bounded_by_variance():
    ops = spin1_operators()
    rng = np.random.default_rng(9)
    for _ in range(20):
        rho = linalg.random_density_matrix(3, rng)
        si = measures.skew_information(rho, ops.sz)
        assert -1e-12 <= si <= measures.variance(rho, ops.sz) + 1e-10


def test_skew_information_zero_iff_commuting():
    ops = spin1_operators()
    rng = np.random.default_rng(10)
    # nonzero commutator -> strictly positive skew information
    rho = linalg.random_density_matrix(3, rng)
    assert measures.skew_information(rho, ops.sx) > 1e-6
    # commuting case -> zero (diagonal in the observable eigenbasis)
    w, v = np.linalg.eigh(ops.sx)
    rho_c = (v * np.array([0.5, 0.3, 0.2])) @ v.conj().T
    assert measures.skew_information(rho_c, ops.sx) < 1e-12


def test_local_observable_structure():
    ops = spin1_operators()
    local = measures.local_observable(ops.sz, side="B")
    assert np.allclose(local, np.kron(np.eye(3), ops.sz))
    w = np.linalg.eigvalsh(local)
    assert np.allclose(np.sort(w), np.repeat([-1.0, 0.0, 1.0], 3))


def test_skew_information_local_additivity_on_products():
    ops = spin1_operators()
    rng = np.random.default_rng(11)
    ra = linalg.random_density_matrix(3, rng)
    rb = linalg.random_density_matrix(3, rng)
    prod = np.kron(ra, rb)
    lhs = measures.skew_information(prod, measures.local_observable(ops.sz, "B"))
    rhs = measures.skew_information(rb, ops.sz)
    assert abs(lhs - rhs) < 1e-10


def test_basis_distance_gauge_invariance():
    u = sample_cue(3, 1)
    t1 = np.abs(u) ** 2
    # outcome permutation compares as equal
    t2 = t1[:, [2, 0, 1]]
    assert measures.basis_distance(t1, t2) < 1e-12
    # a genuinely different basis does not
    t3 = np.abs(sample_cue(3, 2)) ** 2
    assert measures.basis_distance(t1, t3) > 1e-3
