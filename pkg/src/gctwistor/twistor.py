"""The twistor bundle of generalized complex structures over an affine chart.

A point of the bundle is a base chart point together with a pairing
compatible complex structure on T_pM + T*_pM inducing the canonical
orientation.  A linear connection splits the tangent space of the bundle
into horizontal and vertical parts; this module implements that
splitting, the two twistor structures (alpha = 1, 2), the closed-form
Nijenhuis tensor case by case, and the curvature-form machinery used by
the integrability verdicts.

Convention notes, fixed here and relied on everywhere:
  * curvature sign: R(X, Y) = nabla_{[X,Y]} - [nabla_X, nabla_Y], i.e.
    the negative of the more common convention;
  * the extension of R(X, Y) to TM + T*M is diag(R, -R^T) and its action
    on an endomorphism a is the commutator [diag(R, -R^T), a].
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from dataclasses import field as dataclasses_field
from fractions import Fraction
from typing import Mapping, Sequence

from . import exactmat as xm
from .exactmat import F0, F1, Mat, Vec, fr
from .courant import ChartPoint, chart_point
from .gclinalg import (
    DegenerateInputError,
    DimensionMismatchError,
    Endo,
    GCStructure,
    GElement,
    InvariantError,
    OrthonormalBasis,
    SkewGenerators,
    adapted_structure,
    b_transform,
    basis_covector,
    basis_vector,
    beta_transform,
    commutator,
    endo_from_blocks,
    fib_pairing,
    fiber_kahler_structure,
    from_complex,
    from_symplectic,
    gl_action,
    is_vertical,
    neutral_pairing,
    random_orthonormal_basis,
    skew_generators,
    vertical_space_basis,
    zero_element,
    zero_endo,
)
from .poly import Poly, poly_from_json, poly_to_json


class NotVerticalError(ValueError):
    """A tangent argument that must be vertical fails the anticommutation test."""


# ---------------------------------------------------------------------------
# connections and curvature


@dataclass(frozen=True)
class Connection:
    """Torsion-free Christoffel data with polynomial entries on a 2n-chart."""

    n: int
    entries: tuple[tuple[tuple[int, int, int], Poly], ...]  # (k, i, j) -> Gamma^k_ij
    _curvature_cache: dict = dataclasses_field(default_factory=dict, compare=False, repr=False)
    _action_cache: dict = dataclasses_field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        dim = 2 * self.n
        seen: dict[tuple[int, int, int], Poly] = {}
        for (k, i, j), p in self.entries:
            if not (0 <= k < dim and 0 <= i < dim and 0 <= j < dim):
                raise DimensionMismatchError("Christoffel index out of range")
            if p.nvars != dim:
                raise DimensionMismatchError("Christoffel entry arity does not match the chart")
            seen[(k, i, j)] = p
        for (k, i, j), p in seen.items():
            mirror = seen.get((k, j, i), Poly.constant(dim, 0))
            if not (p - mirror).is_zero():
                raise InvariantError(f"connection has torsion at Gamma^{k}_{i}{j}")

    @property
    def dim(self) -> int:
        return 2 * self.n

    def gamma(self, k: int, i: int, j: int) -> Poly:
        for key, p in self.entries:
            if key == (k, i, j):
                return p
        return Poly.constant(self.dim, 0)

    def christoffel_at(self, p: ChartPoint):
        """Values Gamma[k][i][j] at the point."""
        dim = self.dim
        g = [[[F0] * dim for _ in range(dim)] for _ in range(dim)]
        for (k, i, j), poly in self.entries:
            g[k][i][j] = poly.evaluate(p.coords)
        return g

    def christoffel_partials_at(self, p: ChartPoint):
        """Partials dGamma[a][k][i][j] at the point."""
        dim = self.dim
        d = [[[[F0] * dim for _ in range(dim)] for _ in range(dim)] for _ in range(dim)]
        for (k, i, j), poly in self.entries:
            for a in range(dim):
                d[a][k][i][j] = poly.partial(a).evaluate(p.coords)
        return d

    def curvature_basis_at(self, p: ChartPoint) -> dict[tuple[int, int], Mat]:
        """R(d/dx_a, d/dx_b) for a < b at the point, memoized per point."""
        cached = self._curvature_cache.get(p.coords)
        if cached is not None:
            return cached
        dim = self.dim
        g = self.christoffel_at(p)
        dg = self.christoffel_partials_at(p)
        table = {}
        for a in range(dim):
            for b in range(a + 1, dim):
                rows = []
                for k in range(dim):
                    row = []
                    for l in range(dim):
                        std = dg[a][k][b][l] - dg[b][k][a][l]
                        std += sum(g[k][a][m] * g[m][b][l] - g[k][b][m] * g[m][a][l]
                                   for m in range(dim))
                        row.append(-std)
                    rows.append(tuple(row))
                table[(a, b)] = xm.mat(rows)
        self._curvature_cache[p.coords] = table
        return table


def connection(n: int, gamma: Mapping[tuple[int, int, int], Poly]) -> Connection:
    """Build a connection, filling in the symmetric mirror of each entry."""
    full: dict[tuple[int, int, int], Poly] = {}
    for (k, i, j), p in gamma.items():
        full[(k, i, j)] = p
        mirror = (k, j, i)
        if mirror not in gamma:
            full[mirror] = p
    return Connection(n, tuple(sorted(full.items())))


def flat_connection(n: int) -> Connection:
    return Connection(n, ())


def connection_to_json(conn: Connection) -> dict:
    """Sparse map "k,i,j" (1-based) -> polynomial, mirrors omitted."""
    out = {}
    for (k, i, j), p in conn.entries:
        if i <= j:
            out[f"{k + 1},{i + 1},{j + 1}"] = poly_to_json(p)
    return out


def connection_from_json(n: int, data: Mapping) -> Connection:
    gamma = {}
    for key, terms in data.items():
        k, i, j = (int(s) - 1 for s in key.split(","))
        gamma[(k, i, j)] = poly_from_json(2 * n, terms)
    return connection(n, gamma)


def connection_matrix(conn: Connection, x: Vec, p: ChartPoint) -> Endo:
    """The connection form on TM + T*M in direction x: diag(G(x), -G(x)^T)."""
    dim = conn.dim
    g = conn.christoffel_at(p)
    gx = tuple(tuple(sum(x[a] * g[k][a][j] for a in range(dim)) for j in range(dim))
               for k in range(dim))
    return endo_from_blocks(gx, xm.zeros(dim, dim), xm.zeros(dim, dim),
                            xm.mat_neg(xm.transpose(gx)))


@dataclass(frozen=True)
class CurvatureValue:
    """R(X, Y) at a point, as an endomorphism of T_pM."""

    n: int
    endo_tm: Mat

    def extended(self) -> Endo:
        """Action on T_pM + T*_pM: R on vectors, eta -> -eta o R on covectors."""
        dim = 2 * self.n
        return endo_from_blocks(self.endo_tm, xm.zeros(dim, dim), xm.zeros(dim, dim),
                                xm.mat_neg(xm.transpose(self.endo_tm)))

    def act_on(self, a: Endo) -> Endo:
        """Curvature of the induced connection on endomorphisms: [R^, a]."""
        return commutator(self.extended(), a)

    def apply_vector(self, z: Vec) -> Vec:
        return xm.mat_vec(self.endo_tm, z)

    def is_zero(self) -> bool:
        return xm.is_zero(self.endo_tm)


def curvature(conn: Connection, x: Vec, y: Vec, p: ChartPoint) -> CurvatureValue:
    """R(X, Y) = nabla_{[X,Y]} - [nabla_X, nabla_Y] for constant X, Y at p.

    Contracted from the memoized coordinate values, so repeated
    evaluation at one point costs a bilinear combination only.
    """
    dim = conn.dim
    table = conn.curvature_basis_at(p)
    total = [[F0] * dim for _ in range(dim)]
    for (a, b), r_ab in table.items():
        coeff = x[a] * y[b] - x[b] * y[a]
        if coeff == 0:
            continue
        for k in range(dim):
            row = r_ab[k]
            trow = total[k]
            for l in range(dim):
                if row[l]:
                    trow[l] += coeff * row[l]
    return CurvatureValue(conn.n, xm.mat(total))


# ---------------------------------------------------------------------------
# twistor points and tangents


@dataclass(frozen=True)
class TwistorPoint:
    """A base point together with a fibre structure of canonical orientation."""

    point: ChartPoint
    structure: GCStructure

    def __post_init__(self):
        if self.point.dim != self.structure.dim_v:
            raise DimensionMismatchError("base point and fibre structure disagree on dim M")
        if self.structure.orientation() != 1:
            raise InvariantError("fibre structure does not induce the canonical orientation")

    @property
    def n(self) -> int:
        return self.point.dim // 2


@dataclass(frozen=True)
class TwistorTangent:
    """An element of (H + H*) + (V + V*) at a twistor point.

    The horizontal summand H + H* is identified with T_pM + T*_pM and
    stored as a single GElement.  A vertical covector is stored through
    its trace-pairing representer: the unique vertical endomorphism Phi
    with phi(W) = <Phi, W>.
    """

    horizontal: GElement
    vertical: Endo
    vertical_coform: Endo

    def __add__(self, other: "TwistorTangent") -> "TwistorTangent":
        return TwistorTangent(self.horizontal + other.horizontal,
                              self.vertical + other.vertical,
                              self.vertical_coform + other.vertical_coform)

    def __sub__(self, other: "TwistorTangent") -> "TwistorTangent":
        return self + other.scale(-1)

    def scale(self, c) -> "TwistorTangent":
        return TwistorTangent(self.horizontal.scale(c), self.vertical.scale(c),
                              self.vertical_coform.scale(c))

    def is_zero(self) -> bool:
        return self.horizontal.is_zero() and self.vertical.is_zero() \
            and self.vertical_coform.is_zero()


def zero_tangent(n: int) -> TwistorTangent:
    return TwistorTangent(zero_element(2 * n), zero_endo(4 * n), zero_endo(4 * n))


def tangent_from_parts(n: int, horizontal: GElement | None = None,
                       vertical: Endo | None = None,
                       vertical_coform: Endo | None = None) -> TwistorTangent:
    return TwistorTangent(horizontal if horizontal is not None else zero_element(2 * n),
                          vertical if vertical is not None else zero_endo(4 * n),
                          vertical_coform if vertical_coform is not None else zero_endo(4 * n))


def validate_tangent(t: TwistorTangent, at: TwistorPoint) -> None:
    j = at.structure.j
    if not t.vertical.is_zero() and not is_vertical(t.vertical, j):
        raise NotVerticalError("vertical part does not anticommute with j")
    if not t.vertical_coform.is_zero() and not is_vertical(t.vertical_coform, j):
        raise NotVerticalError("vertical coform representer does not anticommute with j")


def twistor_pairing(t1: TwistorTangent, t2: TwistorTangent) -> Fraction:
    """The neutral pairing of the twistor space in the splitting frame."""
    vertical = Fraction(1, 2) * (fib_pairing(t1.vertical_coform, t2.vertical)
                                 + fib_pairing(t2.vertical_coform, t1.vertical))
    return neutral_pairing(t1.horizontal, t2.horizontal) + vertical


def twistor_J(alpha: int, t: TwistorTangent, at: TwistorPoint) -> TwistorTangent:
    """The twistor structure: the fibre complex structure with an alpha sign
    on vertical data, the lift of j on horizontal data."""
    if alpha not in (1, 2):
        raise ValueError("alpha must be 1 or 2")
    validate_tangent(t, at)
    j = at.structure.j
    sign = 1 if alpha == 1 else -1  # (-1)^(alpha+1)
    return TwistorTangent(j.apply(t.horizontal),
                          j.compose(t.vertical).scale(sign),
                          t.vertical_coform.compose(j).scale(-sign))


# ---------------------------------------------------------------------------
# horizontal lifts


def horizontal_lift(conn: Connection, x: Vec, at: TwistorPoint) -> TwistorTangent:
    """Lift of a base vector: base part x, vertical part -[omega(x), j].

    In the fibre coordinates attached to a frame that is parallel at the
    base point the vertical part vanishes; for the constant coordinate
    frames used here it is the commutator with the connection form.
    """
    omega = connection_matrix(conn, x, at.point)
    vertical = -commutator(omega, at.structure.j)
    n = at.n
    return tangent_from_parts(n, horizontal=GElement(2 * n, xm.vec(x), (F0,) * (2 * n)),
                              vertical=vertical)


def vertical_y_coordinates(a: Endo, gens: SkewGenerators) -> dict[tuple[int, int], Fraction]:
    """Fibre coordinates y_ij(a) = eps_i eps_j <a, S_ij> of a skew endomorphism."""
    signs = gens.basis.signs
    return {(i, k): Fraction(signs[i] * signs[k]) * fib_pairing(a, gens.generator(i, k))
            for (i, k) in gens.pairs()}


def vertical_from_y(y: Mapping[tuple[int, int], Fraction], gens: SkewGenerators) -> Endo:
    dim = len(gens.basis.vectors)
    out = zero_endo(dim)
    for (i, k), c in y.items():
        out = out + gens.generator(i, k).scale(c)
    return out


# ---------------------------------------------------------------------------
# the closed-form Nijenhuis tensor, case by case


def _gram_solve_representer(basis: Sequence[Endo], values: Sequence[Fraction]) -> Endo:
    d = len(basis)
    gram = tuple(tuple(fib_pairing(basis[a], basis[b]) for b in range(d)) for a in range(d))
    try:
        coeffs = xm.solve(gram, values)
    except xm.SingularMatrixError:
        raise DegenerateInputError("trace pairing is degenerate on the vertical space") from None
    out = zero_endo(basis[0].dim)
    for c, u in zip(coeffs, basis):
        out = out + u.scale(c)
    return out


def coform_representer(at: TwistorPoint, functional, basis: Sequence[Endo] | None = None) -> Endo:
    """The vertical endomorphism Phi with <Phi, W> = functional(W) on the fibre."""
    if basis is None:
        basis = vertical_space_basis(at.structure)
    return _gram_solve_representer(basis, [functional(u) for u in basis])


def pair_coform(phi: Endo, w: Endo) -> Fraction:
    """Evaluate a vertical coform (by representer) on a vertical vector."""
    return fib_pairing(phi, w)


def curvature_action_on_structure(conn: Connection, at: TwistorPoint) -> dict:
    """For each coordinate pair a < b: the vertical endomorphisms
    [R^(d_a, d_b), j] and j o [R^(d_a, d_b), j], memoized.

    Every curvature term of the closed-form Nijenhuis tensor is a
    bilinear combination of these, so computing them once per point
    reduces each evaluation to scalar contractions.
    """
    key = (at.point.coords, at.structure.j.rows)
    cached = conn._action_cache.get(key)
    if cached is not None:
        return cached
    j = at.structure.j
    out = {}
    for (a, b), r_ab in conn.curvature_basis_at(at.point).items():
        if xm.is_zero(r_ab):
            continue
        v = CurvatureValue(conn.n, r_ab).act_on(j)
        out[(a, b)] = (v, j.compose(v))
    conn._action_cache[key] = out
    return out


def _pair_coeff(x: Vec, y: Vec, a: int, b: int) -> Fraction:
    return x[a] * y[b] - x[b] * y[a]


def nijenhuis_horizontal(alpha: int, conn: Connection, at: TwistorPoint,
                         a: GElement, b: GElement,
                         vertical_basis: Sequence[Endo] | None = None) -> TwistorTangent:
    """N_alpha on two horizontal lifts: four curvature terms acting on j,
    plus (alpha = 2 only) a vertical coform built from the pairing of the
    arguments; the horizontal part vanishes identically."""
    if alpha not in (1, 2):
        raise ValueError("alpha must be 1 or 2")
    j = at.structure.j
    ja = j.apply(a)
    jb = j.apply(b)
    sign = Fraction((-1) ** alpha)
    vertical = zero_endo(j.dim)
    for (ia, ib), (v, jv) in curvature_action_on_structure(conn, at).items():
        c_direct = _pair_coeff(ja.vec, jb.vec, ia, ib) - _pair_coeff(a.vec, b.vec, ia, ib)
        c_twisted = sign * (_pair_coeff(a.vec, jb.vec, ia, ib)
                            + _pair_coeff(ja.vec, b.vec, ia, ib))
        if c_direct:
            vertical = vertical + v.scale(c_direct)
        if c_twisted:
            vertical = vertical + jv.scale(c_twisted)
    coef = -Fraction(1, 2) * (1 + sign)
    n = at.n
    if coef == 0:
        return tangent_from_parts(n, vertical=vertical)

    def omega_ab(w: Endo) -> Fraction:
        wa = w.apply(a)
        wb = w.apply(b)
        return (sum(x * y for x, y in zip(ja.cov, wb.vec))
                + sum(x * y for x, y in zip(wb.cov, ja.vec))
                - sum(x * y for x, y in zip(jb.cov, wa.vec))
                - sum(x * y for x, y in zip(wa.cov, jb.vec)))

    if vertical_basis is None:
        vertical_basis = vertical_space_basis(at.structure)
    phi = _gram_solve_representer(vertical_basis, [coef * omega_ab(u) for u in vertical_basis])
    return tangent_from_parts(n, vertical=vertical, vertical_coform=phi)


def nijenhuis_mixed(alpha: int, at: TwistorPoint, a: GElement, v: Endo,
                    validate: bool = True) -> TwistorTangent:
    """N_alpha of a horizontal lift against a vertical vector:
    [1 + (-1)^alpha] ((j o V) A)^h, so zero for alpha = 1."""
    if alpha not in (1, 2):
        raise ValueError("alpha must be 1 or 2")
    n = at.n
    if v.is_zero():
        return zero_tangent(n)
    if validate and not is_vertical(v, at.structure.j):
        raise NotVerticalError("V is not a vertical vector at j")
    coef = 1 + (-1) ** alpha
    if coef == 0:
        return zero_tangent(n)
    value = at.structure.j.compose(v).apply(a).scale(coef)
    return tangent_from_parts(n, horizontal=value)


def nijenhuis_coform(alpha: int, conn: Connection, at: TwistorPoint,
                     a: GElement, phi: Endo, validate: bool = True) -> TwistorTangent:
    """N_alpha of a horizontal lift against a vertical coform.

    The value lies in H + H* and is recovered from its pairings against
    every B: <N, B> = -phi(N_1(A^h, B^h))/2, with an extra curvature
    insertion term for alpha = 2.  The neutral pairing against the
    coordinate probes inverts trivially: pairing against a_k reads off
    vector components, pairing against e_k covector components.
    """
    if alpha not in (1, 2):
        raise ValueError("alpha must be 1 or 2")
    n = at.n
    if phi.is_zero():
        return zero_tangent(n)
    j = at.structure.j
    if validate and not is_vertical(phi, j):
        raise NotVerticalError("coform representer is not vertical at j")
    ja = j.apply(a)
    action = curvature_action_on_structure(conn, at)
    scalars = {key: (fib_pairing(phi, v), fib_pairing(phi, jv))
               for key, (v, jv) in action.items()}
    if not scalars or all(s_v == 0 and s_jv == 0 for s_v, s_jv in scalars.values()):
        return zero_tangent(n)

    def rhs(b: GElement) -> Fraction:
        jb = j.apply(b)
        total = F0
        for (ia, ib), (s_v, s_jv) in scalars.items():
            c_direct = _pair_coeff(ja.vec, jb.vec, ia, ib) - _pair_coeff(a.vec, b.vec, ia, ib)
            c_twisted = (_pair_coeff(a.vec, jb.vec, ia, ib)
                         + _pair_coeff(ja.vec, b.vec, ia, ib))
            # phi of the alpha = 1 vertical part, with the twisted sign -1
            total -= Fraction(1, 2) * (c_direct * s_v - c_twisted * s_jv)
            if alpha == 2:
                total -= c_twisted * s_jv
        return total

    dim_v = 2 * n
    vec = tuple(2 * rhs(basis_covector(dim_v, k)) for k in range(dim_v))
    cov = tuple(2 * rhs(basis_vector(dim_v, k)) for k in range(dim_v))
    return tangent_from_parts(n, horizontal=GElement(dim_v, vec, cov))


def nijenhuis_vertical(alpha: int, at: TwistorPoint, v: Endo, phi: Endo,
                       w: Endo, psi: Endo) -> TwistorTangent:
    """N_alpha of two purely vertical arguments: identically zero, because the
    structure restricted to a fibre is induced by a complex structure."""
    if alpha not in (1, 2):
        raise ValueError("alpha must be 1 or 2")
    j = at.structure.j
    for part in (v, phi, w, psi):
        if not part.is_zero() and not is_vertical(part, j):
            raise NotVerticalError("argument is not vertical at j")
    return zero_tangent(at.n)


def nijenhuis_closed_form(alpha: int, conn: Connection, at: TwistorPoint,
                          e: TwistorTangent, f: TwistorTangent,
                          vertical_basis: Sequence[Endo] | None = None,
                          validate: bool = True) -> TwistorTangent:
    """The full closed-form Nijenhuis value, assembled by bilinearity from the
    horizontal-horizontal, mixed, coform and vertical-vertical cases.

    Scans over many probe pairs can validate the probes once and pass
    validate=False here.
    """
    if validate:
        validate_tangent(e, at)
        validate_tangent(f, at)
    if vertical_basis is None:
        vertical_basis = vertical_space_basis(at.structure)
    terms = [
        (nijenhuis_horizontal(alpha, conn, at, e.horizontal, f.horizontal, vertical_basis), 1),
        (nijenhuis_mixed(alpha, at, e.horizontal, f.vertical, validate), 1),
        (nijenhuis_mixed(alpha, at, f.horizontal, e.vertical, validate), -1),
        (nijenhuis_coform(alpha, conn, at, e.horizontal, f.vertical_coform, validate), 1),
        (nijenhuis_coform(alpha, conn, at, f.horizontal, e.vertical_coform, validate), -1),
    ]
    out = None
    for term, sign in terms:
        if term.is_zero():
            continue
        if sign < 0:
            term = term.scale(-1)
        out = term if out is None else out + term
    return out if out is not None else zero_tangent(at.n)


# ---------------------------------------------------------------------------
# the curvature form argument


@dataclass(frozen=True)
class MuForm:
    """A bilinear form on T_pM x T_pM."""

    matrix: Mat

    def __call__(self, x: Vec, y: Vec) -> Fraction:
        return sum(x[i] * self.matrix[i][j] * y[j]
                   for i in range(len(self.matrix)) for j in range(len(self.matrix)))


def curvature_from_mu(mu: MuForm, x: Vec, y: Vec, z: Vec) -> Vec:
    """R(X,Y)Z = mu(X,Y)Z - mu(Y,X)Z + mu(X,Z)Y - mu(Y,Z)X."""
    cxy = mu(x, y) - mu(y, x)
    cxz = mu(x, z)
    cyz = mu(y, z)
    return tuple(cxy * z[i] + cxz * y[i] - cyz * x[i] for i in range(len(x)))


def interchanging_structure(n: int, perm: Sequence[int] | None = None) -> GCStructure:
    """The structure sending the (permuted) coordinate basis of V to its dual:
    J E_{2k-1} = eta_{2k}, J E_{2k} = -eta_{2k-1} in one-based pair notation.

    Used by the curvature-form argument; it lies in the canonical
    component exactly when n is even.
    """
    dim_v = 2 * n
    sigma = tuple(perm) if perm is not None else tuple(range(dim_v))
    if sorted(sigma) != list(range(dim_v)):
        raise ValueError("perm must be a permutation of the basis positions")
    cols: dict[int, tuple[int, Fraction]] = {}
    for m in range(n):
        a, b = sigma[2 * m], sigma[2 * m + 1]
        cols[a] = (dim_v + b, F1)        # J e_a = alpha_b
        cols[b] = (dim_v + a, -F1)       # J e_b = -alpha_a
        cols[dim_v + b] = (a, -F1)       # J alpha_b = -e_a
        cols[dim_v + a] = (b, F1)        # J alpha_a = e_b
    rows = [[F0] * (2 * dim_v) for _ in range(2 * dim_v)]
    for col, (row, val) in cols.items():
        rows[row][col] = val
    return GCStructure(Endo(2 * dim_v, xm.mat(rows)))


def interchanging_structure_odd(n: int) -> GCStructure:
    """The odd-n variant: interchanging pairs on the first 2n - 2 coordinates,
    a complex-structure pair on the last two (and on their duals)."""
    if n % 2 == 0:
        raise ValueError("this constructor is the odd-n variant")
    dim_v = 2 * n
    rows = [[F0] * (2 * dim_v) for _ in range(2 * dim_v)]
    for m in range(n - 1):
        a, b = 2 * m, 2 * m + 1
        rows[dim_v + b][a] = F1
        rows[dim_v + a][b] = -F1
        rows[a][dim_v + b] = -F1
        rows[b][dim_v + a] = F1
    a, b = dim_v - 2, dim_v - 1
    rows[b][a] = F1                      # J e_a = e_b
    rows[a][b] = -F1
    rows[dim_v + b][dim_v + a] = F1      # J alpha_a = alpha_b
    rows[dim_v + a][dim_v + b] = -F1
    return GCStructure(Endo(2 * dim_v, xm.mat(rows)))


@dataclass(frozen=True)
class MuSystemReport:
    n: int
    unknowns: int
    rank: int
    kernel_dim: int
    single_structure_kernel_dim: int


def mu_forced_zero_check(n: int = 2, perms: Sequence[Sequence[int]] | None = None) -> MuSystemReport:
    """Rank of the linear system on mu forced by R_mu(X, Y) j = 0 over the
    family of interchanging structures on permuted bases.

    For n = 2 the family of the identity permutation together with the
    middle swap forces mu = 0 (kernel dimension 0), while a single
    structure leaves a nontrivial kernel.
    """
    if n != 2:
        raise DimensionMismatchError("the curvature-form system is implemented at desk scale n = 2")
    dim_v = 2 * n
    if perms is None:
        perms = [tuple(range(dim_v)), (0, 2, 1, 3)]
    unknowns = dim_v * dim_v

    def constraint_rows(structure: GCStructure) -> list[Vec]:
        rows = []
        basis = [tuple(F1 if t == s else F0 for t in range(dim_v)) for s in range(dim_v)]
        for a in range(dim_v):
            for b in range(a + 1, dim_v):
                columns = []
                for idx in range(unknowns):
                    mu = MuForm(tuple(tuple(F1 if i * dim_v + j == idx else F0
                                            for j in range(dim_v)) for i in range(dim_v)))
                    r_tm = tuple(curvature_from_mu(mu, basis[a], basis[b], basis[l])
                                 for l in range(dim_v))
                    # columns of R as an endomorphism: R e_l
                    r_mat = xm.transpose(xm.mat(r_tm))
                    value = CurvatureValue(n, r_mat).act_on(structure.j)
                    columns.append([x for row in value.rows for x in row])
                rows.extend(tuple(col[t] for col in columns) for t in range(len(columns[0])))
        return rows

    all_rows: list[Vec] = []
    single_rank = None
    for perm in perms:
        structure = interchanging_structure(n, perm)
        rows = constraint_rows(structure)
        if single_rank is None:
            single_rank = xm.rank(xm.mat(rows))
        all_rows.extend(rows)
    total_rank = xm.rank(xm.mat(all_rows))
    return MuSystemReport(n, unknowns, total_rank, unknowns - total_rank,
                          unknowns - (single_rank or 0))


def ahs_identity_check(conn: Connection, k: Mat, x: Vec, y: Vec, p: ChartPoint) -> Mat:
    """Residual of the four-term curvature identity of a complex structure K
    on T_pM, with R(.,.)K the commutator action; zero for flat connections
    and whenever the first twistor structure is integrable."""
    dim = conn.dim
    k = xm.mat(k)
    if xm.mat_mul(k, k) != xm.mat_scale(Fraction(-1), xm.identity(dim)):
        raise InvariantError("K^2 is not -Id")
    kx = xm.mat_vec(k, x)
    ky = xm.mat_vec(k, y)

    def r(u: Vec, v: Vec) -> Mat:
        return curvature(conn, u, v, p).endo_tm

    def bracket(m: Mat) -> Mat:
        return xm.mat_sub(xm.mat_mul(m, k), xm.mat_mul(k, m))

    res = bracket(r(x, y))
    res = xm.mat_add(res, xm.mat_mul(k, bracket(r(x, ky))))
    res = xm.mat_add(res, xm.mat_mul(k, bracket(r(kx, y))))
    res = xm.mat_sub(res, bracket(r(kx, ky)))
    return res


def hybrid_nijenhuis_horizontal(alpha: int, conn: Connection, at: TwistorPoint,
                                a: GElement, v: Endo) -> GElement:
    """H + H* part of the mixed Nijenhuis term for the hybrid structures that
    use the fibre symplectic-type structure on vertical data.

    Computed through the horizontal-vertical bracket mechanism, whose
    only surviving term is (j o V) A -- with coefficient one for both
    alphas, unlike the pure twistor structures where the second bracket
    doubles or cancels it.  Requires the fibre two-form to be
    nondegenerate at the point, since the hybrid structure is only
    defined there.
    """
    if alpha not in (1, 2):
        raise ValueError("alpha must be 1 or 2")
    basis = vertical_space_basis(at.structure)
    fiber_kahler_structure(at.structure, basis)  # availability check at this point
    if v.is_zero():
        return zero_element(2 * at.n)
    if not is_vertical(v, at.structure.j):
        raise NotVerticalError("V is not a vertical vector at j")
    return at.structure.j.compose(v).apply(a)


# ---------------------------------------------------------------------------
# sampling helpers (exact, seeded)


def random_skew_matrix(dim: int, rng: random.Random) -> Mat:
    rows = [[F0] * dim for _ in range(dim)]
    for i in range(dim):
        for j in range(i + 1, dim):
            c = Fraction(rng.randint(-2, 2), rng.randint(1, 3))
            rows[i][j] = c
            rows[j][i] = -c
    return xm.mat(rows)


def random_invertible_matrix(dim: int, rng: random.Random, words: int = 6) -> Mat:
    m = xm.identity(dim)
    for _ in range(words):
        i, j = rng.sample(range(dim), 2)
        c = Fraction(rng.randint(-2, 2), rng.randint(1, 3))
        shear = [list(row) for row in xm.identity(dim)]
        shear[i][j] = c
        m = xm.mat_mul(m, xm.mat(shear))
    return m


def standard_complex_matrix(n: int) -> Mat:
    dim_v = 2 * n
    rows = [[F0] * dim_v for _ in range(dim_v)]
    for m in range(n):
        rows[2 * m + 1][2 * m] = F1
        rows[2 * m][2 * m + 1] = -F1
    return xm.mat(rows)


def standard_symplectic_matrix(n: int) -> Mat:
    dim_v = 2 * n
    rows = [[F0] * dim_v for _ in range(dim_v)]
    for m in range(n):
        rows[2 * m][2 * m + 1] = F1
        rows[2 * m + 1][2 * m] = -F1
    return xm.mat(rows)


def sample_fibre_structure(n: int, rng: random.Random, words: int = 3) -> GCStructure:
    """A fibre point generated by a transform word applied to a standard seed.

    Seeds are the complex-type structure (any n) or the symplectic-type
    one (even n, to stay in the canonical component); every move is an
    exact isometry of the pairing, so invariants survive by construction.
    """
    if n % 2 == 0 and rng.random() < Fraction(1, 2):
        structure = from_symplectic(standard_symplectic_matrix(n))
    else:
        structure = from_complex(standard_complex_matrix(n))
    dim_v = 2 * n
    for _ in range(words):
        move = rng.choice(("b", "beta", "gl"))
        if move == "b":
            structure = b_transform(structure, random_skew_matrix(dim_v, rng))
        elif move == "beta":
            structure = beta_transform(structure, random_skew_matrix(dim_v, rng))
        else:
            structure = gl_action(random_invertible_matrix(dim_v, rng), structure)
    return structure


def random_chart_point(dim: int, rng: random.Random) -> ChartPoint:
    return chart_point([Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(dim)])


@dataclass(frozen=True)
class AdaptedSample:
    """A twistor point whose structure is adapted to a sampled orthonormal basis."""

    at: TwistorPoint
    basis: OrthonormalBasis
    generators: SkewGenerators


def sample_adapted_point(n: int, rng: random.Random) -> AdaptedSample:
    basis = random_orthonormal_basis(n, rng)
    structure = adapted_structure(basis)
    at = TwistorPoint(random_chart_point(2 * n, rng), structure)
    return AdaptedSample(at, basis, skew_generators(basis))
