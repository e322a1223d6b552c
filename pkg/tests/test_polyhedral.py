"""Cone geometry, layer enumeration, K_prim, and normalized volume.

Layer counts are cross-checked against hand-counted lattice points and an
Ehrhart polynomial fit, which independently recovers the normalized volume
from nothing but the layer sizes.
"""

import math
from fractions import Fraction

import pytest

from bbgkz.abelian import AbelianGroup
from bbgkz.polyhedral import (DegeneratePolytope, GradedSemigroup,
                              KPrimGuardError, NotPointed, build_semigroup,
                              enumerate_layer, facets_and_faces, k_prim,
                              normalized_volume, triangulate_polytope)
from conftest import make_problem


class TestCone:
    def test_square_cone_facets(self):
        cone = facets_and_faces([(0, 0, 1), (0, 1, 1), (1, 1, 1), (1, 0, 1)])
        # x >= 0, y >= 0, z - x >= 0, z - y >= 0
        assert set(cone.facet_normals) == {(1, 0, 0), (0, 1, 0),
                                          (-1, 0, 1), (0, -1, 1)}
        assert cone.contains((1, 2, 2))
        assert not cone.contains((3, 0, 2))
        assert cone.strictly_contains((1, 1, 2))
        assert not cone.strictly_contains((0, 1, 2))

    def test_membership_matches_inequalities(self):
        cone = facets_and_faces([(-1, 1), (1, 1)])
        for a in range(-3, 4):
            for b in range(-3, 4):
                expect = b >= abs(a)
                assert cone.contains((a, b)) == expect
                assert cone.strictly_contains((a, b)) == (b > abs(a))

    def test_face_lattice_of_square_cone(self):
        cone = facets_and_faces([(0, 0, 1), (0, 1, 1), (1, 1, 1), (1, 0, 1)])
        by_dim = {}
        for face in cone.faces:
            by_dim.setdefault(face.dim, []).append(face)
        # vertex cone over a square: 1 apex, 4 rays, 4 facets, 1 full cone
        assert len(by_dim[0]) == 1
        assert len(by_dim[1]) == 4
        assert len(by_dim[2]) == 4
        assert len(by_dim[3]) == 1

    def test_not_pointed(self):
        with pytest.raises(NotPointed):
            facets_and_faces([(1,), (-1,)])
        with pytest.raises(NotPointed):
            facets_and_faces([(1, 0), (-1, 0), (0, 1)])

    def test_not_spanning_rejected(self):
        with pytest.raises(ValueError):
            facets_and_faces([(1, 0), (2, 0)])


# hand-countable layer sizes: square cone has (k+1)^2 points at degree k,
# with (k-1)^2 interior; the Z+Z/2 line doubles each degree point
LAYER_COUNTS = {
    "ex52": lambda k: (k + 1) ** 2,
    "z2": lambda k: 2,
    "ex51": lambda k: 1,
    "p1": lambda k: 2 * k + 1,
}
INTERIOR_COUNTS = {
    "ex52": lambda k: max(0, k - 1) ** 2,
    "z2": lambda k: 2 if k >= 1 else 0,
    "ex51": lambda k: 1 if k >= 1 else 0,
    "p1": lambda k: max(0, 2 * k - 1),
}


class TestLayers:
    @pytest.mark.parametrize("name", sorted(LAYER_COUNTS))
    def test_layer_sizes(self, name):
        S, _, _ = make_problem(name)
        for k in range(5):
            assert len(S.layer(k)) == LAYER_COUNTS[name](k)
            assert len(S.layer(k, "interior")) == INTERIOR_COUNTS[name](k)

    def test_layer_contents_z2(self):
        S, _, _ = make_problem("z2")
        N = S.group
        assert S.layer(0) == (N.element((0,), (0,)), N.element((0,), (1,)))
        assert S.layer(2) == (N.element((2,), (0,)), N.element((2,), (1,)))

    def test_interior_subset_of_full(self, named_problem):
        _, S, _, _ = named_problem
        for k in range(4):
            full = set(S.layer(k))
            for c in S.layer(k, "interior"):
                assert c in full

    def test_closure_under_generators(self, named_problem):
        _, S, _, _ = named_problem
        for k in range(3):
            nxt = set(S.layer(k + 1))
            for c in S.layer(k):
                for v in S.A:
                    assert c + v in nxt

    def test_deterministic_order(self, named_problem):
        _, S, _, _ = named_problem
        for k in range(3):
            layer = S.layer(k)
            assert list(layer) == sorted(layer, key=lambda c: c.sort_key())

    def test_negative_degree_rejected(self):
        S, _, _ = make_problem("ex51")
        with pytest.raises(ValueError):
            enumerate_layer(S, -1)

    def test_torsion_copies(self):
        S, _, _ = make_problem("square_z2")
        for k in range(4):
            assert len(S.layer(k)) == 2 * (k + 1) ** 2


class TestKPrim:
    def test_z2(self):
        S, _, _ = make_problem("z2")
        N = S.group
        assert set(k_prim(S)) == {N.element((0,), (0,)), N.element((0,), (1,))}

    @pytest.mark.parametrize("name", ["ex51", "ex52", "p1", "p2", "repeated"])
    def test_origin_only(self, name):
        S, _, _ = make_problem(name)
        assert k_prim(S) == [S.group.zero()]

    def test_sublattice_example(self):
        # (0,1) and (3,1) generate an index-3 sublattice; the preimage cone
        # keeps all Z^2 points, so degree-1 points 1 and 2 are primitive
        N = AbelianGroup(2)
        A = (N.element((0, 1)), N.element((3, 1)))
        S = GradedSemigroup(N, A, N.dual_element((0, 1)))
        assert set(k_prim(S)) == {N.element((0, 0)), N.element((1, 1)),
                                  N.element((2, 1))}

    def test_guard_raises_on_high_degree_primitives(self):
        S, _, _ = make_problem("ex51")

        class Bogus(GradedSemigroup):
            def layer(self, k, region="full"):
                got = super().layer(k, region)
                if k == self.rank + 1 and region == "full":
                    return got + (self.group.element((-10,)),)
                return got

        B = Bogus(S.group, S.A, S.deg)
        with pytest.raises(KPrimGuardError):
            k_prim(B)


VOLUMES = {
    "z2": 1, "ex51": 1, "ex52": 2, "p1": 2, "p2": 3,
    "square_z2": 2, "repeated": 1, "g3": 1,
}


class TestVolume:
    def test_known_volumes(self, named_problem):
        name, S, _, _ = named_problem
        assert normalized_volume(S.A) == VOLUMES[name]

    def test_degenerate(self):
        N = AbelianGroup(3)
        A = (N.element((0, 0, 1)), N.element((1, 0, 1)))
        with pytest.raises(DegeneratePolytope):
            normalized_volume(A)

    def test_triangulation_covers_volume(self):
        # unit square split from a corner: two triangles
        simplices = triangulate_polytope([(0, 0), (0, 1), (1, 0), (1, 1)])
        assert len(simplices) == 2
        assert all(len(s) == 3 for s in simplices)

    def test_ehrhart_fit(self, named_problem):
        """Leading Ehrhart coefficient recovers the volume from layer counts.

        For the free quotient, |layer k| is a degree (r-1) polynomial in k
        whose leading coefficient is vol / (r-1)!.
        """
        name, S, _, _ = named_problem
        r = S.rank
        d = r - 1
        tors = S.group.torsion_order
        counts = [Fraction(len(S.layer(k)), tors) for k in range(d + 1)]
        # finite differences: d-th difference equals d! * leading coefficient
        diffs = list(counts)
        for _ in range(d):
            diffs = [b - a for a, b in zip(diffs, diffs[1:])]
        assert diffs[0] == normalized_volume(S.A)
