"""Group arithmetic, Smith normal form, characters, and data validation."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bbgkz.abelian import (AbelianGroup, NoDegreeFunctional, NotSpanning,
                           _det_sign, char_value, pair, smith_normal_form,
                           validate_data)


class TestAbelianGroup:
    def test_invariant_factor_validation(self):
        AbelianGroup(2, (2, 4))
        with pytest.raises(ValueError):
            AbelianGroup(1, (1,))
        with pytest.raises(ValueError):
            AbelianGroup(1, (4, 2))
        with pytest.raises(ValueError):
            AbelianGroup(-1)

    def test_torsion_order(self):
        assert AbelianGroup(3).torsion_order == 1
        assert AbelianGroup(1, (2, 6)).torsion_order == 12

    def test_element_reduction(self):
        N = AbelianGroup(1, (4,))
        assert N.element((2,), (7,)).torsion == (3,)
        assert N.element((2,), (-1,)).torsion == (3,)

    def test_element_arithmetic(self):
        N = AbelianGroup(1, (3,))
        a = N.element((2,), (2,))
        b = N.element((1,), (2,))
        assert (a + b) == N.element((3,), (1,))
        assert (a - b) == N.element((1,), (0,))
        assert (-a) == N.element((-2,), (1,))
        assert a.scale(3) == N.element((6,), (0,))

    def test_from_presentation(self):
        # Z^2 / (2 e1) = Z + Z/2
        G = AbelianGroup.from_presentation([[2, 0]])
        assert (G.rank, G.torsion_invariants) == (1, (2,))
        # Z^2 / ((2,0), (0,3)) = Z/2 + Z/3 = Z/6 in invariant-factor form
        G = AbelianGroup.from_presentation([[2, 0], [0, 3]])
        assert (G.rank, G.torsion_invariants) == (0, (6,))

    def test_enumerations(self):
        N = AbelianGroup(1, (2, 2))
        assert len(N.characters()) == 4
        assert len(N.torsion_elements()) == 4
        assert N.characters()[0].is_trivial()


class TestPairing:
    def test_pair_formula(self):
        N = AbelianGroup(2, (5,))
        mu = N.dual_element((3, -1))
        v = N.element((2, 4), (3,))
        assert pair(mu, v) == 2

    def test_pair_kills_torsion(self):
        N = AbelianGroup(1, (6,))
        mu = N.dual_element((7,))
        for t in N.torsion_elements():
            assert pair(mu, t) == 0


class TestCharacters:
    def test_z2_nontrivial_value(self):
        N = AbelianGroup(0, (2,))
        rho = N.character((1,))
        t, z = char_value(rho, N.element((), (1,)))
        assert t == Fraction(1, 2)
        assert z == -1

    def test_z4_exponent_one_on_three(self):
        N = AbelianGroup(0, (4,))
        rho = N.character((1,))
        t, z = char_value(rho, N.element((), (3,)))
        assert t == Fraction(3, 4)
        assert z == -1j

    def test_trivial_character(self):
        N = AbelianGroup(1, (3,))
        rho = N.character((0,))
        t, z = char_value(rho, N.element((5,), (2,)))
        assert t == 0 and z == 1

    @pytest.mark.parametrize("invariants", [(2,), (3,), (4,), (2, 2), (2, 6)])
    def test_character_table_unitary(self, invariants):
        """Orthogonality: the character-value matrix is unitary up to scale."""
        N = AbelianGroup(0, invariants)
        G = N.torsion_order
        chars = N.characters()
        elems = N.torsion_elements()
        assert len(chars) == G and len(elems) == G
        M = [[char_value(rho, c)[1] for c in elems] for rho in chars]
        for i in range(G):
            for j in range(G):
                s = sum(M[i][k] * M[j][k].conjugate() for k in range(G))
                expect = G if i == j else 0
                assert abs(s - expect) < 1e-12

    def test_multiplicativity(self):
        N = AbelianGroup(0, (8,))
        rho = N.character((3,))
        a, b = N.element((), (5,)), N.element((), (6,))
        ta, za = char_value(rho, a)
        tb, zb = char_value(rho, b)
        tab, zab = char_value(rho, a + b)
        assert (ta + tb) % 1 == tab
        assert abs(za * zb - zab) < 1e-12


int_matrices = st.lists(
    st.lists(st.integers(-9, 9), min_size=1, max_size=4),
    min_size=1, max_size=4).filter(lambda rows: len({len(r) for r in rows}) == 1)


class TestSmithNormalForm:
    @settings(max_examples=150, deadline=None)
    @given(int_matrices)
    def test_snf_properties(self, A):
        m, n = len(A), len(A[0])
        U, D, V = smith_normal_form(A)
        # U A V == D
        UA = [[sum(U[i][k] * A[k][j] for k in range(m)) for j in range(n)]
              for i in range(m)]
        UAV = [[sum(UA[i][k] * V[k][j] for k in range(n)) for j in range(n)]
               for i in range(m)]
        assert UAV == D
        # diagonal, nonnegative, divisibility chain
        for i in range(m):
            for j in range(n):
                if i != j:
                    assert D[i][j] == 0
        diag = [D[i][i] for i in range(min(m, n))]
        assert all(d >= 0 for d in diag)
        for a, b in zip(diag, diag[1:]):
            if a:
                assert b % a == 0
            else:
                assert b == 0
        # unimodular transforms
        assert abs(_det_sign(U)) == 1
        assert abs(_det_sign(V)) == 1

    def test_known_example(self):
        _, D, _ = smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
        assert [D[i][i] for i in range(3)] == [2, 6, 12]


class TestValidateData:
    def test_z2_example(self):
        N = AbelianGroup(1, (2,))
        A = (N.element((1,), (0,)), N.element((1,), (1,)))
        deg = validate_data(N, A)
        assert deg.free_covector == (1,)

    def test_projective_plane_degree(self):
        N = AbelianGroup(3)
        A = tuple(N.element(v) for v in [(0, 0, 1), (1, 0, 1), (0, 1, 1), (-1, -1, 1)])
        deg = validate_data(N, A)
        assert all(pair(deg, v) == 1 for v in A)

    def test_no_degree_functional(self):
        N = AbelianGroup(1)
        A = (N.element((1,)), N.element((2,)))
        with pytest.raises(NoDegreeFunctional):
            validate_data(N, A)

    def test_not_spanning(self):
        # (0,1), (3,1) generate an index-3 sublattice of Z^2
        N = AbelianGroup(2)
        A = (N.element((0, 1)), N.element((3, 1)))
        with pytest.raises(NotSpanning):
            validate_data(N, A)
