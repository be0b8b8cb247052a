"""Exact algebra of V + V* with its split-signature pairing.

Everything here is finite dimensional and rational: each identity a
constructor or checker asserts holds exactly, never approximately.

Coordinate convention, fixed once for the whole package: for dim V = 2n
an element of V + V* is stored as 2n vector components in a basis
{e_1, ..., e_2n} of V followed by 2n covector components in the dual
basis {a_1, ..., a_2n}.  Endomorphisms act on these 4n coordinates with
the V block first, so the canonical orientation is the one of the
ordered reference basis {e_1, ..., e_2n, a_1, ..., a_2n}.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import exactmat as xm
from .exactmat import F0, F1, Mat, Vec, fr

Scalar = Fraction


class DimensionMismatchError(ValueError):
    """Operands live on spaces of different dimension."""


class DegenerateInputError(ValueError):
    """Input fails a nondegeneracy precondition (singular matrix, chart edge)."""


class InvariantError(ValueError):
    """A constructed object violates one of its defining identities."""


# ---------------------------------------------------------------------------
# elements and endomorphisms


@dataclass(frozen=True)
class GElement:
    """An element X + xi of V + V*, stored as (vector, covector) coordinates."""

    dim_v: int
    vec: Vec
    cov: Vec

    def __post_init__(self):
        if self.dim_v < 0 or self.dim_v % 2 != 0:
            raise InvariantError("dim V must be even and nonnegative")
        if len(self.vec) != self.dim_v or len(self.cov) != self.dim_v:
            raise DimensionMismatchError("coordinate length does not match dim V")

    @property
    def coords(self) -> Vec:
        return self.vec + self.cov

    def __add__(self, other: "GElement") -> "GElement":
        _same_dim(self, other)
        return GElement(self.dim_v, tuple(a + b for a, b in zip(self.vec, other.vec)),
                        tuple(a + b for a, b in zip(self.cov, other.cov)))

    def __sub__(self, other: "GElement") -> "GElement":
        return self + (-other)

    def __neg__(self) -> "GElement":
        return self.scale(-1)

    def scale(self, c) -> "GElement":
        c = fr(c)
        return GElement(self.dim_v, tuple(c * a for a in self.vec),
                        tuple(c * a for a in self.cov))

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coords)


def gelem(vec: Iterable, cov: Iterable) -> GElement:
    v = xm.vec(vec)
    c = xm.vec(cov)
    return GElement(len(v), v, c)


def from_coords(coords: Sequence) -> GElement:
    half = len(coords) // 2
    return gelem(coords[:half], coords[half:])


def zero_element(dim_v: int) -> GElement:
    return GElement(dim_v, (F0,) * dim_v, (F0,) * dim_v)


def basis_vector(dim_v: int, i: int) -> GElement:
    """The element e_{i+1} (pure vector)."""
    return GElement(dim_v, tuple(F1 if k == i else F0 for k in range(dim_v)),
                    (F0,) * dim_v)


def basis_covector(dim_v: int, i: int) -> GElement:
    """The element a_{i+1} (pure covector)."""
    return GElement(dim_v, (F0,) * dim_v,
                    tuple(F1 if k == i else F0 for k in range(dim_v)))


def coordinate_elements(dim_v: int) -> list[GElement]:
    """The reference basis e_1, ..., e_2n, a_1, ..., a_2n."""
    return [basis_vector(dim_v, i) for i in range(dim_v)] + \
        [basis_covector(dim_v, i) for i in range(dim_v)]


def _same_dim(a: GElement, b: GElement) -> None:
    if a.dim_v != b.dim_v:
        raise DimensionMismatchError(f"dim V mismatch: {a.dim_v} vs {b.dim_v}")


@dataclass(frozen=True)
class Endo:
    """A square matrix acting on the 4n coordinates of V + V*."""

    dim: int
    rows: Mat

    def __post_init__(self):
        if len(self.rows) != self.dim or any(len(r) != self.dim for r in self.rows):
            raise DimensionMismatchError("endomorphism matrix is not square of the stated size")

    @property
    def half(self) -> int:
        return self.dim // 2

    def block(self, which: str) -> Mat:
        """One of the four blocks: 'vv' (V->V), 'vc' (V*->V), 'cv' (V->V*), 'cc'."""
        h = self.half
        r0, c0 = {"vv": (0, 0), "vc": (0, h), "cv": (h, 0), "cc": (h, h)}[which]
        return tuple(tuple(self.rows[r0 + i][c0 + j] for j in range(h)) for i in range(h))

    def apply(self, a: GElement) -> GElement:
        if 2 * a.dim_v != self.dim:
            raise DimensionMismatchError("element does not match endomorphism size")
        return from_coords(xm.mat_vec(self.rows, a.coords))

    def compose(self, other: "Endo") -> "Endo":
        if self.dim != other.dim:
            raise DimensionMismatchError("endomorphism sizes differ")
        return Endo(self.dim, xm.mat_mul(self.rows, other.rows))

    def __add__(self, other: "Endo") -> "Endo":
        return Endo(self.dim, xm.mat_add(self.rows, other.rows))

    def __sub__(self, other: "Endo") -> "Endo":
        return Endo(self.dim, xm.mat_sub(self.rows, other.rows))

    def __neg__(self) -> "Endo":
        return Endo(self.dim, xm.mat_neg(self.rows))

    def scale(self, c) -> "Endo":
        return Endo(self.dim, xm.mat_scale(fr(c), self.rows))

    def is_zero(self) -> bool:
        return xm.is_zero(self.rows)


def endo(rows: Iterable[Iterable]) -> Endo:
    m = xm.mat(rows)
    return Endo(len(m), m)


def endo_to_json(e: Endo) -> list[str]:
    """Row-major list of canonical rational strings."""
    from .poly import scalar_to_str
    return [scalar_to_str(x) for row in e.rows for x in row]


def endo_from_json(data: Sequence[str]) -> Endo:
    from math import isqrt

    from .poly import scalar_from_str
    dim = isqrt(len(data))
    if dim * dim != len(data):
        raise DimensionMismatchError("row-major data is not square")
    values = [scalar_from_str(s) for s in data]
    return Endo(dim, xm.mat([values[i * dim:(i + 1) * dim] for i in range(dim)]))


def endo_from_blocks(vv: Mat, vc: Mat, cv: Mat, cc: Mat) -> Endo:
    h = len(vv)
    rows = [tuple(vv[i]) + tuple(vc[i]) for i in range(h)]
    rows += [tuple(cv[i]) + tuple(cc[i]) for i in range(h)]
    return Endo(2 * h, xm.mat(rows))


def identity_endo(dim: int) -> Endo:
    return Endo(dim, xm.identity(dim))


def zero_endo(dim: int) -> Endo:
    return Endo(dim, xm.zeros(dim, dim))


def commutator(a: Endo, b: Endo) -> Endo:
    return a.compose(b) - b.compose(a)


# ---------------------------------------------------------------------------
# the pairing and derived checks


def neutral_pairing(a: GElement, b: GElement) -> Scalar:
    """<X + xi, Y + eta> = (xi(Y) + eta(X)) / 2, the split-signature pairing."""
    _same_dim(a, b)
    return Fraction(1, 2) * (sum(x * y for x, y in zip(a.cov, b.vec))
                             + sum(x * y for x, y in zip(b.cov, a.vec)))


def _pairing_gram(dim_v: int) -> Mat:
    half = Fraction(1, 2)
    g = [[F0] * (2 * dim_v) for _ in range(2 * dim_v)]
    for i in range(dim_v):
        g[i][dim_v + i] = half
        g[dim_v + i][i] = half
    return xm.mat(g)


def is_pairing_skew(m: Endo) -> bool:
    """True iff <mA, B> + <A, mB> = 0 for all A, B.

    In blocks [[A, B], [C, D]] this reads: B and C skew, D = -A^T.
    """
    h = m.half
    rows = m.rows
    for i in range(h):
        for j in range(h):
            if rows[i][h + j] + rows[j][h + i] != 0:        # B skew
                return False
            if rows[h + i][j] + rows[h + j][i] != 0:        # C skew
                return False
            if rows[h + i][h + j] + rows[j][i] != 0:        # D = -A^T
                return False
    return True


def is_pairing_orthogonal(m: Endo) -> bool:
    """True iff <mA, mB> = <A, B> for all A, B."""
    g = _pairing_gram(m.half)
    lhs = xm.mat_mul(xm.mat_mul(xm.transpose(m.rows), g), m.rows)
    return lhs == g


def fib_pairing(a: Endo, b: Endo) -> Scalar:
    """The pairing <a, b> = -Trace(a b) / 2 on skew endomorphisms."""
    if a.dim != b.dim:
        raise DimensionMismatchError("endomorphism sizes differ")
    return -Fraction(1, 2) * xm.trace_product(a.rows, b.rows)


# ---------------------------------------------------------------------------
# orientation


def orientation_sign(vectors: "Sequence[GElement] | OrthonormalBasis") -> int:
    """Sign of the transition determinant from the reference basis.

    The input must be a basis of V + V*; a zero determinant raises.
    """
    if isinstance(vectors, OrthonormalBasis):
        vectors = vectors.vectors
    if not vectors:
        raise DegenerateInputError("empty basis")
    dim = 2 * vectors[0].dim_v
    if len(vectors) != dim:
        raise DimensionMismatchError("wrong number of basis elements")
    m = xm.transpose(xm.mat([v.coords for v in vectors]))
    d = xm.det(m)
    if d == 0:
        raise DegenerateInputError("input does not span the space")
    return 1 if d > 0 else -1


def structure_orientation(j: Endo) -> int:
    """Orientation induced by a complex structure j on V + V*.

    Computed from an adapted basis {b_1, j b_1, b_2, j b_2, ...} built
    greedily from the reference basis; for a complex structure the
    result does not depend on the choices made.
    """
    dim = j.dim
    if dim == 0:
        return 1
    dim_v = dim // 2
    chosen: list[GElement] = []
    span = xm.RowReducer()
    for cand in coordinate_elements(dim_v):
        if len(chosen) == dim:
            break
        if span.contains(cand.coords):
            continue
        image = j.apply(cand)
        chosen.extend([cand, image])
        if not (span.add(cand.coords) and span.add(image.coords)):
            raise InvariantError("adapted basis construction failed; j is not a complex structure")
    return orientation_sign(chosen)


# ---------------------------------------------------------------------------
# structures and orthonormal bases


@dataclass(frozen=True)
class GCStructure:
    """A complex structure on V + V* compatible with the pairing.

    Construction checks j^2 = -Id and pairing skewness exactly.  The
    orientation is not part of the invariant; use `structure_orientation`
    (it is +1 exactly when the structure belongs to the canonical
    component G(V)).
    """

    j: Endo

    def __post_init__(self):
        sq = self.j.compose(self.j)
        if sq != (-identity_endo(self.j.dim)):
            raise InvariantError("j^2 is not -Id")
        if not is_pairing_skew(self.j):
            raise InvariantError("j is not skew for the neutral pairing")

    @property
    def dim_v(self) -> int:
        return self.j.half

    def apply(self, a: GElement) -> GElement:
        return self.j.apply(a)

    def orientation(self) -> int:
        return structure_orientation(self.j)


@dataclass(frozen=True)
class OrthonormalBasis:
    """4n elements Q_i with <Q_i, Q_j> = delta_ij eps_i, positive signs first."""

    vectors: tuple[GElement, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        n4 = len(self.vectors)
        if n4 == 0 or n4 % 4 != 0:
            raise DimensionMismatchError("an orthonormal basis of V + V* has 4n elements")
        if len(self.signs) != n4:
            raise DimensionMismatchError("one sign per basis element")
        if any(s not in (1, -1) for s in self.signs):
            raise InvariantError("signs must be +1 or -1")
        half = n4 // 2
        if self.signs != (1,) * half + (-1,) * half:
            raise InvariantError("expected 2n signs +1 followed by 2n signs -1")
        for i, a in enumerate(self.vectors):
            for k in range(i, n4):
                expected = Fraction(self.signs[i]) if i == k else F0
                if neutral_pairing(a, self.vectors[k]) != expected:
                    raise InvariantError(f"pairing of elements {i} and {k} is not orthonormal")

    @property
    def dim_v(self) -> int:
        return len(self.vectors) // 2

    def matrix(self) -> Mat:
        """Columns are the basis elements in reference coordinates."""
        return xm.transpose(xm.mat([v.coords for v in self.vectors]))


def reference_basis(n: int) -> OrthonormalBasis:
    """The standard orthonormal basis {e_i + a_i ; e_i - a_i} of V + V*."""
    dim_v = 2 * n
    plus = [basis_vector(dim_v, i) + basis_covector(dim_v, i) for i in range(dim_v)]
    minus = [basis_vector(dim_v, i) - basis_covector(dim_v, i) for i in range(dim_v)]
    return OrthonormalBasis(tuple(plus + minus), (1,) * dim_v + (-1,) * dim_v)


def _rotation_params(rng: random.Random) -> tuple[Fraction, Fraction]:
    # rational point on c^2 + s^2 = 1 via a Pythagorean parametrisation
    while True:
        p = rng.randint(-3, 3)
        q = rng.randint(-3, 3)
        if (p, q) != (0, 0) and q != 0:
            break
    den = p * p + q * q
    return Fraction(p * p - q * q, den), Fraction(2 * p * q, den)


def _hyperbolic_params(rng: random.Random) -> tuple[Fraction, Fraction]:
    # rational point on c^2 - s^2 = 1, parameter away from +-1
    while True:
        t = Fraction(rng.randint(-2, 2), rng.randint(1, 3))
        if abs(t) != 1:
            break
    den = 1 - t * t
    return Fraction(1 + t * t, den), Fraction(2 * t, den)


def random_orthonormal_basis(n: int, seed: int | random.Random, words: int = 12) -> OrthonormalBasis:
    """A seeded random orthonormal basis, exact by construction.

    Starting from the reference basis, applies a word of elementary
    special-orthogonal moves: rational circular rotations inside a sign
    class and rational hyperbolic rotations across the two classes.
    Every move has determinant one, so the result is positively
    oriented.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    base = reference_basis(n)
    vectors = list(base.vectors)
    dim_v = 2 * n
    for _ in range(words):
        kind = rng.choice(("circular+", "circular-", "hyperbolic"))
        if kind == "circular+":
            i, k = rng.sample(range(dim_v), 2)
        elif kind == "circular-":
            i, k = (dim_v + x for x in rng.sample(range(dim_v), 2))
        else:
            i = rng.randrange(dim_v)
            k = dim_v + rng.randrange(dim_v)
        if kind == "hyperbolic":
            c, s = _hyperbolic_params(rng)
            vi, vk = vectors[i], vectors[k]
            vectors[i] = vi.scale(c) + vk.scale(s)
            vectors[k] = vi.scale(s) + vk.scale(c)
        else:
            c, s = _rotation_params(rng)
            vi, vk = vectors[i], vectors[k]
            vectors[i] = vi.scale(c) - vk.scale(s)
            vectors[k] = vi.scale(s) + vk.scale(c)
    return OrthonormalBasis(tuple(vectors), base.signs)


# ---------------------------------------------------------------------------
# basis reports


@dataclass(frozen=True)
class ProjectionReport:
    det_p: Scalar
    ok: bool


def projection_nondegeneracy_check(basis: OrthonormalBasis) -> ProjectionReport:
    """Determinant of P = [eta_l(e_k)] over the positive half of the basis.

    Writing the positive-sign basis elements as Q_l = e_l + eta_l, the
    matrix P is invertible with (det P)^2 >= 1; the report carries the
    exact determinant and that inequality as a boolean.
    """
    dim_v = basis.dim_v
    p = tuple(tuple(sum(basis.vectors[l].cov[m] * basis.vectors[k].vec[m]
                        for m in range(dim_v))
                    for k in range(dim_v)) for l in range(dim_v))
    d = xm.det(p)
    return ProjectionReport(d, d * d >= 1)


@dataclass(frozen=True)
class Dim2OrientationReport:
    a: Mat
    orthogonal: bool
    transition_det: Scalar
    orientation: int


def dim2_basis_orientation(basis: OrthonormalBasis) -> Dim2OrientationReport:
    """Orientation data of an orthonormal basis when dim V = 2.

    With Q_i = e_i + eta_i and signs (+, +, -, -), the vector parts
    satisfy e_3 = a_11 e_1 + a_12 e_2, e_4 = a_21 e_1 + a_22 e_2 for an
    orthogonal matrix A, and the transition determinant from the basis
    {e_1, e_2, alpha_1, alpha_2} (alpha dual to e) equals 4 det A.
    """
    if basis.dim_v != 2:
        raise DimensionMismatchError("this report is specific to dim V = 2")
    e = [v.vec for v in basis.vectors]
    eta = [v.cov for v in basis.vectors]
    e12 = xm.mat([e[0], e[1]])  # rows e1, e2
    if xm.det(e12) == 0:
        raise DegenerateInputError("inconsistent basis: vector parts e_1, e_2 are dependent")
    # row k of A solves e_{2+k} = a_k1 e1 + a_k2 e2
    a = xm.mat([xm.solve(xm.transpose(e12), e[2 + k]) for k in range(2)])
    orthogonal = xm.mat_mul(a, xm.transpose(a)) == xm.identity(2)
    cols = []
    for i in range(4):
        vcoef = xm.solve(xm.transpose(e12), e[i])
        ccoef = tuple(sum(eta[i][m] * e[k][m] for m in range(2)) for k in range(2))
        cols.append(tuple(vcoef) + ccoef)
    trans = xm.transpose(xm.mat(cols))
    d = xm.det(trans)
    det_a = xm.det(a)
    return Dim2OrientationReport(a, orthogonal, d, 1 if det_a > 0 else -1)


# ---------------------------------------------------------------------------
# constructors


def from_complex(k: Mat) -> GCStructure:
    """Structure induced by a complex structure K on V: K on V, -K* on V*."""
    k = xm.mat(k)
    dim_v = len(k)
    if xm.mat_mul(k, k) != xm.mat_scale(Fraction(-1), xm.identity(dim_v)):
        raise InvariantError("K^2 is not -Id")
    return GCStructure(endo_from_blocks(k, xm.zeros(dim_v, dim_v),
                                        xm.zeros(dim_v, dim_v),
                                        xm.mat_neg(xm.transpose(k))))


def from_symplectic(omega: Mat) -> GCStructure:
    """Structure induced by a symplectic form: X -> i_X omega, alpha -> -omega^{-1} alpha.

    The result squares to -Id and is pairing skew for any nondegenerate
    skew omega; it induces the canonical orientation exactly when half
    the dimension of V is even.
    """
    omega = xm.mat(omega)
    dim_v = len(omega)
    if xm.transpose(omega) != xm.mat_neg(omega):
        raise InvariantError("omega is not skew")
    iso = xm.transpose(omega)  # X -> omega(X, .) in coordinates
    try:
        inv = xm.inverse(iso)
    except xm.SingularMatrixError:
        raise DegenerateInputError("omega is degenerate") from None
    return GCStructure(endo_from_blocks(xm.zeros(dim_v, dim_v), xm.mat_neg(inv),
                                        iso, xm.zeros(dim_v, dim_v)))


def commute_check(a: GCStructure, b: GCStructure) -> bool:
    if a.j.dim != b.j.dim:
        raise DimensionMismatchError("structures live on different spaces")
    return a.j.compose(b.j) == b.j.compose(a.j)


def direct_sum(a: GCStructure, b: GCStructure) -> GCStructure:
    """Block sum respecting the (V1 + V2) + (V1* + V2*) coordinate order."""
    da, db = a.dim_v, b.dim_v
    dim_v = da + db
    rows = [[F0] * (2 * dim_v) for _ in range(2 * dim_v)]

    def embed(offset_v: int, source: Endo, dv: int) -> None:
        def new_index(i: int) -> int:
            return (offset_v + i) if i < dv else (dim_v + offset_v + (i - dv))
        for i in range(2 * dv):
            for k in range(2 * dv):
                rows[new_index(i)][new_index(k)] = source.rows[i][k]

    embed(0, a.j, da)
    embed(da, b.j, db)
    return GCStructure(Endo(2 * dim_v, xm.mat(rows)))


def exp_two_form(b: Mat) -> Endo:
    """The orthogonal map e^B : X + xi -> X + xi + i_X B for a skew 2-form B."""
    b = xm.mat(b)
    dim_v = len(b)
    if xm.transpose(b) != xm.mat_neg(b):
        raise InvariantError("B is not skew")
    return endo_from_blocks(xm.identity(dim_v), xm.zeros(dim_v, dim_v),
                            xm.transpose(b), xm.identity(dim_v))


def exp_two_vector(beta: Mat) -> Endo:
    """The orthogonal map e^beta : X + xi -> X + i_xi beta + xi for a skew 2-vector."""
    beta = xm.mat(beta)
    dim_v = len(beta)
    if xm.transpose(beta) != xm.mat_neg(beta):
        raise InvariantError("beta is not skew")
    return endo_from_blocks(xm.identity(dim_v), xm.transpose(beta),
                            xm.zeros(dim_v, dim_v), xm.identity(dim_v))


def b_transform(j: GCStructure, b: Mat) -> GCStructure:
    """Conjugate by e^B; an isometry of the pairing, so the result is again a structure."""
    e = exp_two_form(b)
    e_inv = exp_two_form(xm.mat_neg(xm.mat(b)))
    if not is_pairing_orthogonal(e):
        raise InvariantError("e^B failed the isometry check")
    return GCStructure(e.compose(j.j).compose(e_inv))


def beta_transform(j: GCStructure, beta: Mat) -> GCStructure:
    """Conjugate by e^beta, the two-vector mirror of the B-transform."""
    e = exp_two_vector(beta)
    e_inv = exp_two_vector(xm.mat_neg(xm.mat(beta)))
    if not is_pairing_orthogonal(e):
        raise InvariantError("e^beta failed the isometry check")
    return GCStructure(e.compose(j.j).compose(e_inv))


def gl_endo(g: Mat) -> Endo:
    """GL(V) acting on V + V* by g on V and (g alpha)(X) = alpha(g^{-1} X) on V*."""
    g = xm.mat(g)
    dim_v = len(g)
    try:
        ginv = xm.inverse(g)
    except xm.SingularMatrixError:
        raise DegenerateInputError("g is singular") from None
    return endo_from_blocks(g, xm.zeros(dim_v, dim_v),
                            xm.zeros(dim_v, dim_v), xm.transpose(ginv))


def gl_action(g: Mat, j: GCStructure) -> GCStructure:
    u = gl_endo(g)
    u_inv = gl_endo(xm.inverse(xm.mat(g)))
    return GCStructure(u.compose(j.j).compose(u_inv))


# ---------------------------------------------------------------------------
# skew generators of an orthonormal basis and the fibre geometry


@dataclass(frozen=True)
class SkewGenerators:
    """The generators S_ij Q_k = eps_k (delta_ik Q_j - delta_kj Q_i) of a basis."""

    basis: OrthonormalBasis
    _matrices: tuple[tuple[Endo, ...], ...]

    def generator(self, i: int, k: int) -> Endo:
        """S_ik for zero-based indices; antisymmetric in (i, k)."""
        return self._matrices[i][k]

    def pairs(self) -> list[tuple[int, int]]:
        n4 = len(self.basis.vectors)
        return [(i, k) for i in range(n4) for k in range(i + 1, n4)]


def skew_generators(basis: OrthonormalBasis) -> SkewGenerators:
    n4 = len(basis.vectors)
    bmat = basis.matrix()
    binv = xm.inverse(bmat)
    grid: list[list[Endo]] = [[None] * n4 for _ in range(n4)]  # type: ignore[list-item]
    for i in range(n4):
        for k in range(n4):
            cols = [[F0] * n4 for _ in range(n4)]
            if i != k:
                # column i carries eps_i Q_k, column k carries -eps_k Q_i
                cols[i][k] = Fraction(basis.signs[i])
                cols[k][i] = -Fraction(basis.signs[k])
            m_in_basis = xm.transpose(xm.mat(cols))
            grid[i][k] = Endo(n4, xm.mat_mul(xm.mat_mul(bmat, m_in_basis), binv))
    return SkewGenerators(basis, tuple(tuple(row) for row in grid))


@dataclass(frozen=True)
class SkewFrames:
    """Two anticommuting triples spanning the skew endomorphisms of neutral 4-space.

    The `left` triple (L1, L2, L3) satisfies L1^2 = -Id, L2^2 = L3^2 = Id
    and pairwise anticommutation, likewise `right`; members of different
    triples commute.  Compatible complex structures are exactly the
    combinations x . left with x1^2 - x2^2 - x3^2 = 1 (or the mirror
    statement for `right`).
    """

    left: tuple[Endo, Endo, Endo]
    right: tuple[Endo, Endo, Endo]

    def all(self) -> list[Endo]:
        return list(self.left) + list(self.right)


def skew_frames(basis: OrthonormalBasis) -> SkewFrames:
    if len(basis.vectors) != 4:
        raise DimensionMismatchError("skew frames are specific to neutral 4-space")
    g = skew_generators(basis)
    s = g.generator
    left = (s(0, 1) - s(2, 3), s(0, 2) - s(1, 3), s(0, 3) + s(1, 2))
    right = (s(0, 1) + s(2, 3), s(0, 2) + s(1, 3), s(0, 3) - s(1, 2))
    return SkewFrames(left, right)


_FRAME_NORMS = (Fraction(2), Fraction(-2), Fraction(-2))


@dataclass(frozen=True)
class SkewDecomposition:
    left: tuple[Scalar, Scalar, Scalar]
    right: tuple[Scalar, Scalar, Scalar]
    compatible_complex: bool
    family: str | None  # "left", "right" or None


def skew_decompose(k: Endo, basis: OrthonormalBasis) -> SkewDecomposition:
    """Coefficients of a skew endomorphism of neutral 4-space in the two frames.

    The frames are orthogonal for the trace pairing with known norms, so
    the coefficients come from exact pairings, no linear solve.  The
    classification records whether the coefficients describe a
    compatible complex structure (one family on its unit hyperboloid,
    the other zero).
    """
    if k.dim != 4:
        raise DimensionMismatchError("decomposition is specific to neutral 4-space")
    if not is_pairing_skew(k):
        raise InvariantError("input is not skew for the pairing")
    frames = skew_frames(basis)
    x = tuple(fib_pairing(k, frames.left[r]) / _FRAME_NORMS[r] for r in range(3))
    y = tuple(fib_pairing(k, frames.right[r]) / _FRAME_NORMS[r] for r in range(3))
    recon = zero_endo(4)
    for c, m in zip(x + y, frames.all()):
        recon = recon + m.scale(c)
    if recon != k:
        raise InvariantError("skew frame decomposition failed to reconstruct the input")
    on_left = (x[0] ** 2 - x[1] ** 2 - x[2] ** 2 == 1) and all(c == 0 for c in y)
    on_right = (y[0] ** 2 - y[1] ** 2 - y[2] ** 2 == 1) and all(c == 0 for c in x)
    family = "left" if on_left else ("right" if on_right else None)
    return SkewDecomposition(x, y, on_left or on_right, family)


def hyperboloid_chart(u: Scalar, v: Scalar, sheet: int) -> tuple[Scalar, Scalar, Scalar]:
    """Rational chart of the hyperboloid x1^2 - x2^2 - x3^2 = 1.

    x1 = sheet (1 + u^2 + v^2) / (1 - u^2 - v^2), x2 = 2u / (...),
    x3 = 2v / (...); the circle u^2 + v^2 = 1 is excluded.
    """
    u, v = fr(u), fr(v)
    if sheet not in (1, -1):
        raise ValueError("sheet must be +1 or -1")
    den = 1 - u * u - v * v
    if den == 0:
        raise DegenerateInputError("chart singularity u^2 + v^2 = 1")
    return (Fraction(sheet) * (1 + u * u + v * v) / den, 2 * u / den, 2 * v / den)


def hyperboloid_point(u: Scalar, v: Scalar, sheet: int, basis: OrthonormalBasis) -> GCStructure:
    """A compatible complex structure on neutral 4-space from the rational chart.

    The point x = (x1, x2, x3) satisfies x1^2 - x2^2 - x3^2 = 1 exactly,
    so x . left squares to -Id; for a positively oriented basis the
    result induces the canonical orientation.
    """
    x1, x2, x3 = hyperboloid_chart(u, v, sheet)
    frames = skew_frames(basis)
    k = frames.left[0].scale(x1) + frames.left[1].scale(x2) + frames.left[2].scale(x3)
    structure = GCStructure(k)
    if structure.orientation() != 1:
        raise InvariantError("hyperboloid point does not induce the canonical orientation; "
                             "was the supplied basis positively oriented?")
    return structure


def adapted_structure(basis: OrthonormalBasis) -> GCStructure:
    """The structure with j Q_{2l-1} = Q_{2l} for an orthonormal basis."""
    n4 = len(basis.vectors)
    cols = [[F0] * n4 for _ in range(n4)]
    for l in range(n4 // 2):
        cols[2 * l][2 * l + 1] = F1
        cols[2 * l + 1][2 * l] = -F1
    m_in_basis = xm.transpose(xm.mat(cols))
    bmat = basis.matrix()
    j = Endo(n4, xm.mat_mul(xm.mat_mul(bmat, m_in_basis), xm.inverse(bmat)))
    return GCStructure(j)


def is_vertical(q: Endo, j: Endo) -> bool:
    """True iff q is pairing skew and anticommutes with j."""
    return is_pairing_skew(q) and (q.compose(j) + j.compose(q)).is_zero()


def vertical_complex_action(j: GCStructure, q: Endo) -> Endo:
    """The fibre complex structure Q -> j o Q on tangents to the space of structures."""
    if not is_vertical(q, j.j):
        raise InvariantError("Q is not tangent to the fibre at j")
    return j.j.compose(q)


def vertical_space_basis(j: GCStructure) -> list[Endo]:
    """A basis of the skew endomorphisms anticommuting with j.

    Uses the projection a -> a + j a j, which maps skew endomorphisms
    onto the anticommuting ones (it doubles those already vertical), and
    filters a maximal independent family from the projected generators
    of the reference basis.
    """
    n = j.dim_v // 2
    gens = skew_generators(reference_basis(n))
    candidates = []
    for (i, k) in gens.pairs():
        s = gens.generator(i, k)
        candidates.append(s + j.j.compose(s).compose(j.j))
    basis: list[Endo] = []
    span = xm.RowReducer()
    for c in candidates:
        if c.is_zero():
            continue
        if span.add([x for row in c.rows for x in row]):
            basis.append(c)
    expected = 4 * n * n - 2 * n
    if len(basis) != expected:
        raise InvariantError(f"vertical space has rank {len(basis)}, expected {expected}")
    return basis


@dataclass(frozen=True)
class FiberKahlerStructure:
    """The symplectic-type structure of the vertical space at a point j.

    Built from the two-form Omega(U, W) = <j o U, W> (trace pairing) on a
    supplied basis of the vertical space, via the same recipe as
    `from_symplectic`; the matrix acts on vertical coordinates followed
    by dual coordinates and squares to -Id.
    """

    basis: tuple[Endo, ...]
    omega: Mat
    matrix: Mat


def fiber_kahler_structure(j: GCStructure, basis: Sequence[Endo]) -> FiberKahlerStructure:
    d = len(basis)
    for u in basis:
        if not is_vertical(u, j.j):
            raise InvariantError("supplied basis element is not vertical at j")
    omega = tuple(tuple(fib_pairing(j.j.compose(basis[a]), basis[b]) for b in range(d))
                  for a in range(d))
    if xm.transpose(omega) != xm.mat_neg(omega):
        raise InvariantError("fibre two-form is not skew")
    iso = xm.transpose(omega)
    try:
        inv = xm.inverse(iso)
    except xm.SingularMatrixError:
        raise DegenerateInputError("fibre two-form is degenerate on the supplied basis") from None
    s = endo_from_blocks(xm.zeros(d, d), xm.mat_neg(inv), iso, xm.zeros(d, d))
    if s.compose(s) != (-identity_endo(2 * d)):
        raise InvariantError("fibre structure does not square to -Id")
    return FiberKahlerStructure(tuple(basis), omega, s.rows)
