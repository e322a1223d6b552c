"""Graded and filtered linear algebra at a fixed coefficient vector.

All computations happen on the degree layers of the semigroup: multiplication
by the log-derivatives of f = sum x_i [v_i] maps layer k to layer k + 1, and
every dimension reported here is a difference of exact matrix ranks over the
Gaussian rationals.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .linalg import GaussianRational, RowSpace, nullspace
from .polyhedral import GradedSemigroup, normalized_volume

Scalar = GaussianRational


class NondegeneracyRetriesExhausted(RuntimeError):
    """No nondegenerate coefficient vector found within the retry cap."""


def as_scalar(value) -> Scalar:
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussianRational(Fraction(value))
    raise TypeError(f"cannot convert {value!r} to an exact scalar")


@dataclass(frozen=True)
class FVector:
    """Coefficients of the degree-one element sum x_i [v_i]."""
    x: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(as_scalar(v) for v in self.x))

    def __len__(self):
        return len(self.x)

    def __getitem__(self, i):
        return self.x[i]


@dataclass(frozen=True)
class DimReport:
    per_degree: tuple
    total: int

    @classmethod
    def of(cls, per_degree):
        per_degree = tuple(int(d) for d in per_degree)
        return cls(per_degree, sum(per_degree))

    def __iter__(self):
        return iter(self.per_degree)


def _layer_index(layer):
    return {c: i for i, c in enumerate(layer)}


def log_derivative_matrices(f: FVector, S: GradedSemigroup, k, region="full"):
    """Matrices of the r log-derivative multiplications from layer k to k+1.

    Matrix j sends [c] to sum_i x_i * mu_j(v_i) * [c + v_i], with mu_j the
    j-th coordinate covector; rows follow the layer k+1 order, columns the
    layer k order.
    """
    src = S.layer(k, region)
    dst = S.layer(k + 1, region)
    idx = _layer_index(dst)
    r = S.rank
    zero = GaussianRational(0)
    mats = [[[zero] * len(src) for _ in range(len(dst))] for _ in range(r)]
    for col, c in enumerate(src):
        for i, v in enumerate(S.A):
            d = idx[c + v]
            xi = f[i]
            for j in range(r):
                coeff = v.free[j]
                if coeff:
                    mats[j][d][col] = mats[j][d][col] + xi * coeff
    return mats


def _image_rows(f, S, k, region="full"):
    """Sparse generators of (I C[S])_k: the columns f_j * [c], c in layer k-1."""
    if k == 0:
        return []
    src = S.layer(k - 1, region)
    dst_idx = _layer_index(S.layer(k, region))
    r = S.rank
    rows = []
    for c in src:
        cols = [{} for _ in range(r)]
        for i, v in enumerate(S.A):
            d = dst_idx[c + v]
            xi = f[i]
            for j in range(r):
                if v.free[j]:
                    cols[j][d] = cols[j].get(d, GaussianRational(0)) + xi * v.free[j]
        rows.extend(cols)
    return rows


def jacobian_dims(f: FVector, S: GradedSemigroup, max_degree, region="full") -> DimReport:
    """Graded dimensions of C[S]_k modulo the log-derivative image."""
    dims = []
    for k in range(max_degree + 1):
        space = RowSpace()
        for row in _image_rows(f, S, k, region):
            space.add(row)
        dims.append(len(S.layer(k, region)) - space.rank)
    return DimReport.of(dims)


@dataclass(frozen=True)
class NondegeneracyCertificate:
    total: int
    expected_total: int
    per_degree: tuple
    tail_degrees_zero: bool

    @property
    def ok(self):
        return self.total == self.expected_total and self.tail_degrees_zero

    def __bool__(self):
        return self.ok


def is_nondegenerate(f: FVector, S: GradedSemigroup, max_degree=None):
    """Dimension-count test for regularity of the log-derivative sequence.

    True iff the quotient has total dimension vol * torsion order and its
    graded pieces vanish strictly above degree rank(N).  Returns the boolean
    together with a certificate recording both facts.
    """
    r = S.rank
    if max_degree is None:
        max_degree = r + 1
    if max_degree < r + 1:
        raise ValueError("max_degree must be at least rank + 1")
    dims = jacobian_dims(f, S, max_degree)
    expected = normalized_volume(S.A) * S.group.torsion_order
    tail_zero = all(d == 0 for d in dims.per_degree[r + 1:])
    cert = NondegeneracyCertificate(dims.total, expected, dims.per_degree, tail_zero)
    return cert.ok, cert


def dual_kernel_dims(f: FVector, S: GradedSemigroup, max_degree, region="full") -> DimReport:
    """Per-degree solution counts of the homogeneous adjoint system.

    Degree k counts the coefficient vectors on layer k annihilated by
    sum_i x_i lambda_{c+v_i} v_i = 0 for every c in layer k-1; computed as an
    explicit nullspace, independent of the image-rank route.
    """
    r = S.rank
    dims = []
    for k in range(max_degree + 1):
        layer = S.layer(k, region)
        if k == 0:
            dims.append(len(layer))
            continue
        prev = S.layer(k - 1, region)
        idx = _layer_index(layer)
        rows = []
        for c in prev:
            data = [{} for _ in range(r)]
            for i, v in enumerate(S.A):
                col = idx[c + v]
                for j in range(r):
                    if v.free[j]:
                        data[j][col] = data[j].get(col, GaussianRational(0)) + f[i] * v.free[j]
            for j in range(r):
                rows.append([data[j].get(col, GaussianRational(0))
                             for col in range(len(layer))])
        dims.append(len(nullspace(rows, len(layer), one=GaussianRational(1))))
    return DimReport.of(dims)


def _hat_rows(f, beta, S, region, max_src_degree):
    """Sparse rows mu_j . hat[n] over the point index of degrees 0..D.

    Point indices follow the (degree, lex) order of `_point_index`.
    """
    index, points = _point_index(S, region, max_src_degree + 1)
    r = S.rank
    rows = []
    for n in points:
        deg_n = sum(m * a for m, a in zip(S.deg.free_covector, n.free))
        if deg_n > max_src_degree:
            continue
        base = index[n]
        shifted = [index[n + v] for v in S.A]
        for j in range(r):
            row = {}
            for i, v in enumerate(S.A):
                if v.free[j]:
                    col = shifted[i]
                    row[col] = row.get(col, GaussianRational(0)) + f[i] * v.free[j]
            diag = as_scalar(n.free[j]) - beta[j]
            if diag:
                row[base] = row.get(base, GaussianRational(0)) + diag
            row = {c: v for c, v in row.items() if v}
            if row:
                rows.append(row)
            else:
                rows.append({})
    return rows, index, points


def _point_index(S, region, D):
    """Deterministic index of the layer points of degrees 0..D."""
    points = []
    degrees = []
    for k in range(D + 1):
        for c in S.layer(k, region):
            points.append(c)
            degrees.append(k)
    index = {c: i for i, c in enumerate(points)}
    return index, points


def hat_quotient_dims(f: FVector, beta, S: GradedSemigroup, region="full",
                      filtration_bound=None) -> DimReport:
    """Filtration-graded dimensions of the twisted module modulo the ideal.

    beta: tuple of Scalars, coordinates in the free part.  The quotient is
    computed at filtration bound D as dim C[S]_{<=D} minus the rank of the
    generators mu_j . hat[n] with deg n <= D - 1; the reported per-degree
    numbers are the jumps of the induced filtration.
    """
    r = S.rank
    D = filtration_bound if filtration_bound is not None else r + 1
    if D < r + 1:
        raise ValueError("filtration bound must be at least rank + 1")
    beta = tuple(as_scalar(b) for b in beta)
    rows, index, points = _hat_rows(f, beta, S, region, D - 1)
    npts = len(points)
    # pivot on the highest-degree (largest-index) coordinate first
    space = RowSpace(key=lambda c: -c)
    for row in rows:
        if row:
            space.add(row)
    base_rank = space.rank
    one = GaussianRational(1)
    dims_le = []
    added = 0
    pos = 0
    deg_of = []
    for k in range(D + 1):
        layer_len = len(S.layer(k, region))
        for _ in range(layer_len):
            if space.add({pos: one}):
                added += 1
            pos += 1
        dims_le.append(added)
    per_degree = [dims_le[0]] + [dims_le[k] - dims_le[k - 1] for k in range(1, D + 1)]
    report = DimReport.of(per_degree)
    assert report.total == npts - base_rank
    return report


def r1_dims(f: FVector, S: GradedSemigroup, max_degree=None) -> DimReport:
    """Graded dimensions of the interior image inside the Jacobian quotient.

    Degree k is dim (C[K°]_k + (I C[K])_k) / (I C[K])_k.
    """
    r = S.rank
    if max_degree is None:
        max_degree = r + 1
    one = GaussianRational(1)
    dims = []
    for k in range(max_degree + 1):
        space = RowSpace()
        for row in _image_rows(f, S, k, "full"):
            space.add(row)
        base_rank = space.rank
        idx = _layer_index(S.layer(k, "full"))
        added = 0
        for c in S.layer(k, "interior"):
            if space.add({idx[c]: one}):
                added += 1
        dims.append(added)
    return DimReport.of(dims)


def hat_restriction_rank(f: FVector, S: GradedSemigroup, filtration_bound=None) -> int:
    """Rank of the interior-to-full map of twisted quotients at beta = 0."""
    r = S.rank
    D = filtration_bound if filtration_bound is not None else r + 1
    if D < r + 1:
        raise ValueError("filtration bound must be at least rank + 1")
    beta = tuple(GaussianRational(0) for _ in range(r))
    rows, index, points = _hat_rows(f, beta, S, "full", D - 1)
    space = RowSpace(key=lambda c: -c)
    for row in rows:
        if row:
            space.add(row)
    base_rank = space.rank
    one = GaussianRational(1)
    added = 0
    for k in range(D + 1):
        for c in S.layer(k, "interior"):
            if space.add({index[c]: one}):
                added += 1
    return added


def random_rational_x(S: GradedSemigroup, seed=0, denominator_bound=4, max_retries=16):
    """Seeded random small-rational coefficients, retried until nondegenerate.

    Returns (FVector, certificate).  Raises NondegeneracyRetriesExhausted
    after `max_retries` failures.
    """
    rng = random.Random(seed)
    n = len(S.A)
    for _ in range(max_retries):
        vals = []
        for _ in range(n):
            num = rng.randint(1, 9) * rng.choice((1, -1))
            den = rng.randint(1, denominator_bound)
            vals.append(Fraction(num, den))
        f = FVector(tuple(vals))
        ok, cert = is_nondegenerate(f, S)
        if ok:
            return f, cert
    raise NondegeneracyRetriesExhausted(
        f"no nondegenerate x within {max_retries} draws (seed {seed})")
