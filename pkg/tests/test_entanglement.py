import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tilted_ising.dynamics import bell_seed_state
from tilted_ising.entanglement import (
    concurrence,
    concurrence_from_spin_flip,
    concurrence_matrix,
    entropy_block,
    entropy_profile,
    half_chain_entropies,
    localization,
    measure_all,
    nn_concurrences,
    q_measure,
    schmidt_entropy,
    total_tangle,
    von_neumann_entropy,
)
from tilted_ising.state import basis_state, partial_trace, random_state, single_site_purities

from conftest import ghz, random_local_unitary, random_product_state, w_state

PHI_PLUS = np.array([1, 0, 0, 1]) / np.sqrt(2)
SWAP = np.eye(4)[[0, 2, 1, 3]]


def werner(p):
    return p * np.outer(PHI_PLUS, PHI_PLUS) + (1 - p) * np.eye(4) / 4


def random_two_qubit_rho(rng, rank=None):
    rank = rank or int(rng.integers(1, 5))
    g = rng.standard_normal((4, rank)) + 1j * rng.standard_normal((4, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


# -- entropies ---------------------------------------------------------------

def test_entropy_bell_and_product(rng):
    psi = np.kron(np.kron(random_state(1, rng), PHI_PLUS), random_state(2, rng))
    # sites 2,3 hold the pair; the cut after site 2 splits it
    assert entropy_block(psi, 2) == pytest.approx(1.0, abs=1e-12)
    assert entropy_block(psi, 1) == pytest.approx(0.0, abs=1e-12)
    prod = random_product_state(6, rng)
    assert np.all(np.abs(entropy_profile(prod)) < 1e-10)


def test_entropy_block_range():
    psi = ghz(4)
    for l in (0, 4, -1):
        with pytest.raises(ValueError):
            entropy_block(psi, l)
    assert np.allclose(entropy_profile(psi), 1.0)


def page_average_bits(m, n):
    """Exact mean entropy (bits) of an m-dim subsystem of a random pure state in m*n dims, m <= n."""
    s = sum(1.0 / k for k in range(n + 1, m * n + 1)) - (m - 1) / (2 * n)
    return s / math.log(2)


def test_page_average_l10(rng):
    samples = [entropy_block(random_state(10, rng), 5) for _ in range(100)]
    mean = np.mean(samples)
    assert abs(mean - (5 - 1 / (2 * math.log(2)))) < 0.05
    assert abs(mean - page_average_bits(32, 32)) < 0.02


@pytest.mark.parametrize("L", [2, 5, 8])
def test_schmidt_and_density_matrix_routes_agree(L, rng):
    for _ in range(5):
        psi = random_state(L, rng)
        for l in range(1, L):
            assert schmidt_entropy(psi, l) == pytest.approx(entropy_block(psi, l), abs=1e-10)


def test_complementary_blocks(rng):
    L = 7
    for _ in range(10):
        psi = random_state(L, rng)
        for l in range(1, L):
            rest = von_neumann_entropy(partial_trace(psi, range(l + 1, L + 1)))
            assert entropy_block(psi, l) == pytest.approx(rest, abs=1e-10)


def test_half_chain_batch(rng):
    for L in (4, 7):
        states = np.column_stack([random_state(L, rng) for _ in range(6)])
        got = half_chain_entropies(states)
        want = [entropy_block(states[:, k], L // 2) for k in range(6)]
        assert np.allclose(got, want, atol=1e-10)


# -- concurrence -------------------------------------------------------------

def test_concurrence_examples(rng):
    assert concurrence(np.outer(PHI_PLUS, PHI_PLUS)) == pytest.approx(1.0, abs=1e-12)
    a, b = random_state(1, rng), random_state(1, rng)
    prod = np.kron(a, b)
    assert concurrence(np.outer(prod, prod.conj())) == pytest.approx(0.0, abs=1e-12)
    assert concurrence(werner(0.5)) == pytest.approx(0.25, abs=1e-12)
    assert concurrence_from_spin_flip(werner(0.5)) == pytest.approx(0.25, abs=1e-12)


@pytest.mark.parametrize("p", np.linspace(0, 1, 11))
def test_werner_closed_form(p):
    assert concurrence(werner(p)) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-10)


def test_pure_state_closed_form(rng):
    # for a pure two-qubit state a|00>+b|01>+c|10>+d|11>, C = 2|ad - bc|
    for _ in range(50):
        v = random_state(2, rng)
        expected = 2 * abs(v[0] * v[3] - v[1] * v[2])
        assert concurrence(np.outer(v, v.conj())) == pytest.approx(expected, abs=1e-12)


def test_routes_agree_on_random_mixed_states(rng):
    for _ in range(200):
        rho = random_two_qubit_rho(rng)
        assert concurrence(rho) == pytest.approx(concurrence_from_spin_flip(rho), abs=1e-7)


def test_concurrence_swap_invariance(rng):
    for _ in range(100):
        rho = random_two_qubit_rho(rng)
        assert concurrence(SWAP @ rho @ SWAP) == pytest.approx(concurrence(rho), abs=1e-12)


def test_concurrence_input_errors():
    with pytest.raises(ValueError):
        concurrence(np.eye(2) / 2)
    with pytest.raises(ValueError):
        concurrence(np.eye(4) / 2)
    bad = np.eye(4) / 4
    bad[0, 1] = 0.1
    with pytest.raises(ValueError):
        concurrence(bad)
    with pytest.raises(ValueError):
        concurrence(np.diag([0.6, 0.6, -0.1, -0.1]))


# -- tangle, Q, localization ---------------------------------------------------

def test_tangle_examples():
    assert total_tangle(bell_seed_state(10)) == pytest.approx(1.0, abs=1e-12)
    assert total_tangle(ghz(5)) == pytest.approx(0.0, abs=1e-12)
    C = concurrence_matrix(w_state(3))
    assert np.allclose(C[np.triu_indices(3, 1)], 2 / 3, atol=1e-12)
    assert total_tangle(w_state(3)) == pytest.approx(4 / 3, abs=1e-12)


def test_concurrence_matrix_shape(rng):
    C = concurrence_matrix(random_state(5, rng))
    assert np.array_equal(C, C.T)
    assert np.all(np.diag(C) == 0)
    assert np.all((C >= 0) & (C <= 1))
    assert np.allclose(nn_concurrences(random_state(1, rng)), [])


def test_q_examples(rng):
    assert q_measure(random_product_state(6, rng)) == pytest.approx(0.0, abs=1e-12)
    assert q_measure(ghz(6)) == pytest.approx(1.0, abs=1e-12)
    assert q_measure(bell_seed_state(10)) == pytest.approx(0.2, abs=1e-12)


def test_q_from_explicit_purities(rng):
    psi = random_state(6, rng)
    pur = [np.trace(partial_trace(psi, [k]).matrix @ partial_trace(psi, [k]).matrix).real for k in range(1, 7)]
    assert np.allclose(single_site_purities(psi), pur, atol=1e-13)
    assert q_measure(psi) == pytest.approx(2 * (1 - np.mean(pur)), abs=1e-12)


def test_localization_examples():
    L = 6
    assert localization(basis_state([0, 1, 1, 0, 0, 1])) == pytest.approx((0.0, 0.0), abs=1e-14)
    uniform = np.full(2 ** L, 2 ** (-L / 2))
    assert localization(uniform) == pytest.approx((L * math.log(2), L * math.log(2)), abs=1e-12)
    four = np.zeros(2 ** L)
    four[[1, 7, 20, 63]] = 0.5
    assert localization(four) == pytest.approx((math.log(4), math.log(4)), abs=1e-12)


# -- bundled measures ---------------------------------------------------------

def test_measure_all_examples(rng):
    m = measure_all(random_product_state(5, rng))
    for value in (m.S_half, m.Q, m.total_tangle):
        assert abs(value) < 1e-10
    assert np.all(np.abs(m.S_l) < 1e-10)

    m = measure_all(basis_state([1, 0, 1, 1]))
    assert m.log_PR == pytest.approx(0.0, abs=1e-14) and m.S_sh == pytest.approx(0.0, abs=1e-14)

    m = measure_all(ghz(6))
    assert m.Q == pytest.approx(1.0) and m.total_tangle == pytest.approx(0.0, abs=1e-12)
    assert np.allclose(m.S_l, 1.0)

    m = measure_all(bell_seed_state(8))
    assert m.Q == pytest.approx(0.2 * 10 / 8)
    assert m.total_tangle == pytest.approx(1.0, abs=1e-12)
    assert m.S_l[0] == pytest.approx(1.0, abs=1e-12)
    assert m.nn_concurrence()[0] == pytest.approx(1.0, abs=1e-12)


def test_measure_set_ranges(rng):
    for L in (2, 5, 8):
        m = measure_all(random_state(L, rng))
        assert 0 <= m.Q <= 1
        assert np.all(m.S_l >= -1e-12)
        assert np.all(m.S_l <= np.minimum(np.arange(1, L), L - np.arange(1, L)) + 1e-12)
        assert 0 <= m.log_PR <= L * math.log(2) + 1e-12
        assert 0 <= m.S_sh <= L * math.log(2) + 1e-12


def test_monogamy_thousand_states(rng):
    worst = -np.inf
    for k in range(1000):
        L = 3 + k % 6
        psi = random_state(L, rng) if k % 3 else random_product_state(L, rng)
        if k % 5 == 0:
            # rotate a W state locally to probe near-saturating cases
            psi = random_local_unitary(L, rng) @ w_state(L)
        C = concurrence_matrix(psi)
        linear = 2 * (1 - single_site_purities(psi))
        worst = max(worst, np.max(np.sum(C ** 2, axis=1) - linear))
        m_q = q_measure(psi)
        assert m_q >= 2 / L * total_tangle(psi) - 1e-10
    assert worst <= 1e-10


def test_w_state_saturates_monogamy():
    L = 5
    C = concurrence_matrix(w_state(L))
    linear = 2 * (1 - single_site_purities(w_state(L)))
    assert np.allclose(np.sum(C ** 2, axis=1), linear, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2 ** 32 - 1))
def test_local_unitary_invariance(L, seed):
    rng = np.random.default_rng(seed)
    psi = random_state(L, rng)
    phi = random_local_unitary(L, rng) @ psi
    a, b = measure_all(psi), measure_all(phi)
    assert np.allclose(a.S_l, b.S_l, atol=1e-10)
    assert a.Q == pytest.approx(b.Q, abs=1e-10)
    assert a.total_tangle == pytest.approx(b.total_tangle, abs=1e-10)
    assert np.allclose(a.concurrence_matrix, b.concurrence_matrix, atol=1e-10)
