import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schottky4 import forms, lattice
from schottky4.errors import CutoffInfeasibleError, ResourceLimitError, ValidationError

E8 = lattice.gram_e8()
E8E8 = lattice.gram_e8_e8()
D16 = lattice.gram_d16_plus()


def test_grams_even_unimodular():
    for S, n in ((E8, 8), (E8E8, 16), (D16, 16)):
        assert S.dim == n
        assert S.det() == 1
        assert np.all(S.entries.diagonal() % 2 == 0)
    assert E8E8 != D16


def test_gram_validation():
    with pytest.raises(ValidationError):
        lattice.GramMatrix(np.array([[2, 1], [0, 2]]))
    with pytest.raises(ValidationError):
        lattice.GramMatrix(np.array([[1, 0], [0, 1]]))
    with pytest.raises(ValidationError):
        lattice.GramMatrix(np.array([[2, 3], [3, 2]]))


@pytest.mark.parametrize("S,norm,expected", [
    (E8, 2, 240), (E8, 4, 2160),
    (E8E8, 2, 480), (E8E8, 4, 61920),
    (D16, 2, 480), (D16, 4, 61920),
])
def test_classical_counts(S, norm, expected):
    assert lattice.short_vectors(S, 4).count(norm) == expected
    assert lattice.representation_count(S, [[norm]]) == expected


def _box_norm_counts(A, r, max_norm):
    counts = {}
    for v in itertools.product(range(-r, r + 1), repeat=len(A)):
        v = np.array(v)
        n = int(v @ A @ v)
        if 0 < n <= max_norm:
            counts[n] = counts.get(n, 0) + 1
    return counts


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=15, deadline=None)
def test_short_vectors_match_box_oracle(seed):
    rng = np.random.default_rng(seed)
    B = rng.integers(-2, 3, (3, 3))
    if round(abs(np.linalg.det(B))) == 0:
        return
    S = lattice.GramMatrix(2 * B.T @ B)
    table = lattice.short_vectors(S, 12)
    # box radius from the Cholesky bound |x_i| <= sqrt(N (S^-1)_ii)
    r = int(np.ceil(np.sqrt(12 * np.linalg.inv(S.entries.astype(float)).diagonal().max()))) + 1
    oracle = _box_norm_counts(S.entries, r, 12)
    assert {n: table.count(n) for n in table.by_norm} == oracle


def test_resource_limit():
    tiny = lattice.LatticeConfig(max_vectors=10)
    with pytest.raises(ResourceLimitError):
        lattice.short_vectors(E8, 6, tiny)


@pytest.mark.parametrize("T", [[[2]], [[4]], [[2, 1], [1, 2]], [[4, 1], [1, 4]],
                               [[2, 1, 0], [1, 2, 1], [0, 1, 4]]])
def test_engines_agree_e8(T):
    assert (lattice.representation_count(E8, T, method="glue")
            == lattice.representation_count(E8, T, method="columns"))


@pytest.mark.parametrize("T", [[[2]], [[4]], [[2, 1], [1, 2]], [[2, 1, 0], [1, 2, 1], [0, 1, 2]]])
def test_engines_agree_rank16(T):
    for S in (E8E8, D16):
        assert (lattice.representation_count(S, T, method="glue")
                == lattice.representation_count(S, T, method="columns"))


def test_known_values():
    assert lattice.representation_count(E8, [[8, 3], [3, 8]]) == 24192000
    assert lattice.representation_count(D16, lattice.d4_gram()) == 2096640
    assert lattice.representation_count(E8E8, lattice.d4_gram()) == 7257600


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=10, deadline=None)
def test_basis_independence(seed):
    rng = np.random.default_rng(seed)
    U = np.eye(8, dtype=np.int64)
    for _ in range(6):
        i, j = rng.choice(8, 2, replace=False)
        U[:, i] += int(rng.integers(-1, 2)) * U[:, j]
    S2 = E8.change_basis(U)
    S2 = lattice.GramMatrix(S2.entries)            # forget the block model
    for T in ([[2]], [[4, 1], [1, 2]]):
        assert lattice.representation_count(S2, T) == lattice.representation_count(E8, T)


@given(st.sampled_from([[[2]], [[4]], [[2, 1], [1, 2]], [[4, 2], [2, 4]], [[2, 0], [0, 4]]]))
@settings(max_examples=5, deadline=None)
def test_direct_sum_convolution(T):
    # N(E8+E8, T) = sum over T = T1 + T2 of N(E8, T1) N(E8, T2)
    T = np.array(T)
    g = len(T)
    total = 0
    for T1 in forms.enumerate_psd(g, max_diag=int(T.diagonal().max())):
        T2 = T - T1
        if forms.is_even_psd(T2):
            total += lattice.representation_count(E8, T1) * lattice.representation_count(E8, T2)
    assert total == lattice.representation_count(E8E8, T)


def test_singular_targets_reduce():
    assert lattice.representation_count(E8, np.zeros((3, 3), int)) == 1
    T = np.array([[2, 2], [2, 2]])                     # v, v
    assert lattice.representation_count(E8, T) == 240
    with pytest.raises(ValidationError):
        lattice.representation_count(E8, [[3]])
    with pytest.raises(ValidationError):
        lattice.representation_count(E8, [[2, 3], [3, 2]])


@pytest.mark.parametrize("g,md", [(1, 8), (2, 6), (3, 4)])
def test_witt_small(g, md):
    table = lattice.count_table({"a": E8E8, "b": D16}, g, max_diag=md)
    assert len(table.targets) > 0
    assert not any(table.difference("a", "b"))


def test_genus_two_factorization():
    # theta of E8+E8 is the square of theta of E8 in every genus (checked per target)
    table = lattice.count_table({"e8": E8}, 2, max_diag=4)
    for T in table.targets:
        total = 0
        for T1 in table.targets:
            T2 = T - T1
            if forms.is_even_psd(T2):
                total += lattice.representation_count(E8, T1) * lattice.representation_count(E8, T2)
        assert total == lattice.representation_count(E8E8, T)


def _e8_box_theta(y, r=5):
    """sum over E8 = {x in Z^8 or (Z+1/2)^8, sum x even} inside the box |x_i| <= r of exp(-pi y |x|^2).

    The box sum factorizes: the parity condition is handled by the sign
    trick (1 + (-1)^sum) / 2, and half-integer x use the character
    exp(pi i sum x) as well.
    """
    n = np.arange(-r, r + 1)
    w = np.exp(-np.pi * y * n ** 2)
    even_int = ((w.sum()) ** 8 + (((-1.0) ** n) * w).sum() ** 8) / 2
    h = np.arange(-r, r) + 0.5
    wh = np.exp(-np.pi * y * h ** 2)
    phase = np.exp(1j * np.pi * h)
    even_half = ((wh.sum()) ** 8 + (phase * wh).sum() ** 8) / 2
    return complex(even_int + even_half)


def test_theta_matches_box_sum():
    value = lattice.lattice_theta_value(E8, 1j * np.eye(1), tol=1e-10)
    assert abs(value - _e8_box_theta(1.0)) < 1e-10


def test_theta_factorization_genus_one():
    tau = np.array([[0.1 + 2j]])
    a = lattice.lattice_theta_value(E8, tau, tol=1e-11)
    b = lattice.lattice_theta_value(E8E8, tau, tol=1e-10)
    assert abs(b - a * a) < 1e-9


def test_theta_infeasible_cutoff():
    with pytest.raises(CutoffInfeasibleError):
        lattice.lattice_theta_value(E8E8, np.array([[0.8j]]), tol=1e-12)


def test_theta_large_imaginary_part():
    assert abs(lattice.lattice_theta_value(E8, 8j * np.eye(1), tol=1e-10) - 1) < 1e-10


def test_count_table_exports():
    table = lattice.count_table({"E8+E8": E8E8, "D16+": D16}, 1, max_diag=4)
    csv_text = table.to_csv("E8+E8", "D16+")
    assert csv_text.splitlines()[0] == "t11,N_E8+E8,N_D16+,difference"
    assert csv_text.splitlines()[2] == "2,480,480,0"
    assert table.to_text("E8+E8", "D16+").splitlines()[-1] == "4 | 61920 61920 0"


def test_separation_witness_is_d4():
    T, n1, n2, checked = lattice.separation_witness(E8E8, D16)
    assert np.array_equal(T, lattice.d4_gram())
    assert n1 - n2 == 5160960
    assert len(checked) == 1


def test_no_witness_in_genus_three():
    assert lattice.separation_witness(E8E8, D16, max_diag=4, g=3) is None
