"""Direct verification of the closed-form Nijenhuis tensor on the dim-2 base.

For a two-dimensional base the twistor bundle carries a global rational
chart: base coordinates (x1, x2) and fibre coordinates (u, v) running
over the unit-hyperboloid parametrisation of the fibre.  On that
four-dimensional chart the twistor structures become honest structure
fields with rational entries, so their Nijenhuis tensor can be computed
directly from Courant brackets of coordinate sections -- no part of the
closed-form machinery enters.  Comparing the two values pairwise, in
exact arithmetic, is the strongest end-to-end check in the package.

All field evaluation here runs in forward-mode jet arithmetic over
rationals: every quantity carries its value and chart gradient, which is
exactly the first-order data the bracket formulas consume.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from . import exactmat as xm
from .exactmat import F0, F1, Mat, Vec, fr
from .courant import (
    ChartPoint,
    FieldJet,
    GACField,
    Jet1,
    JetSection,
    chart_point,
    coordinate_sections,
    lie_bracket,
    nijenhuis,
)
from .gclinalg import (
    DegenerateInputError,
    Endo,
    GCStructure,
    GElement,
    InvariantError,
    fib_pairing,
    is_pairing_skew,
    reference_basis,
    skew_frames,
)
from .poly import Poly
from .twistor import (
    Connection,
    TwistorPoint,
    TwistorTangent,
    connection_matrix,
    curvature,
    nijenhuis_closed_form,
)


# ---------------------------------------------------------------------------
# forward-mode jets over exact rationals


@dataclass(frozen=True)
class JetScalar:
    """A value together with its gradient in the chart variables."""

    value: Fraction
    grad: Vec

    def __add__(self, other: "JetScalar") -> "JetScalar":
        return JetScalar(self.value + other.value,
                         tuple(a + b for a, b in zip(self.grad, other.grad)))

    def __sub__(self, other: "JetScalar") -> "JetScalar":
        return JetScalar(self.value - other.value,
                         tuple(a - b for a, b in zip(self.grad, other.grad)))

    def __neg__(self) -> "JetScalar":
        return JetScalar(-self.value, tuple(-a for a in self.grad))

    def __mul__(self, other: "JetScalar") -> "JetScalar":
        return JetScalar(self.value * other.value,
                         tuple(self.value * b + a * other.value
                               for a, b in zip(self.grad, other.grad)))

    def __truediv__(self, other: "JetScalar") -> "JetScalar":
        if other.value == 0:
            raise ZeroDivisionError("jet division by a vanishing value")
        w2 = other.value * other.value
        return JetScalar(self.value / other.value,
                         tuple((a * other.value - self.value * b) / w2
                               for a, b in zip(self.grad, other.grad)))

    def scale(self, c: Fraction) -> "JetScalar":
        return JetScalar(c * self.value, tuple(c * a for a in self.grad))


def jet_const(c, nvars: int) -> JetScalar:
    return JetScalar(fr(c), (F0,) * nvars)


def jet_var(i: int, point: Vec) -> JetScalar:
    return JetScalar(point[i], tuple(F1 if k == i else F0 for k in range(len(point))))


def jet_of_poly(p: Poly, point: Vec) -> JetScalar:
    value, grad = p.jet(point)
    return JetScalar(value, grad)


JetMat = list[list[JetScalar]]


def jmat_const(m: Mat, nvars: int) -> JetMat:
    return [[jet_const(x, nvars) for x in row] for row in m]


def jmat_mul(a: JetMat, b: JetMat) -> JetMat:
    size = len(a)
    out = []
    for i in range(size):
        row = []
        for j in range(size):
            acc = a[i][0] * b[0][j]
            for k in range(1, size):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def jmat_comb(mats: Sequence[Mat], coeffs: Sequence[JetScalar], nvars: int) -> JetMat:
    size = len(mats[0])
    out = [[jet_const(0, nvars) for _ in range(size)] for _ in range(size)]
    for m, c in zip(mats, coeffs):
        for i in range(size):
            for j in range(size):
                if m[i][j]:
                    out[i][j] = out[i][j] + c.scale(m[i][j])
    return out


def jmat_commutator(a: JetMat, b: JetMat) -> JetMat:
    ab = jmat_mul(a, b)
    ba = jmat_mul(b, a)
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(ab, ba)]


def jmat_trace_product_const(a: JetMat, m: Mat) -> JetScalar:
    """trace(a m) for a constant second factor."""
    size = len(m)
    acc = None
    for i in range(size):
        for j in range(size):
            if m[j][i]:
                term = a[i][j].scale(m[j][i])
                acc = term if acc is None else acc + term
    return acc if acc is not None else jet_const(0, len(a[0][0].grad))


# ---------------------------------------------------------------------------
# the twistor chart over a dim-2 base


_FRAME_NORMS = (Fraction(2), Fraction(-2), Fraction(-2))


class TwistorChart:
    """The rational twistor chart (x1, x2, u, v) over a dim-2 base.

    The fibre structure at (u, v) is x1(u,v) L1 + x2(u,v) L2 + x3(u,v) L3
    in the anticommuting frame of the constant reference basis, with the
    unit-hyperboloid chart x1 = sheet (1+u^2+v^2)/(1-u^2-v^2),
    x2 = 2u/(1-u^2-v^2), x3 = 2v/(1-u^2-v^2); the circle u^2+v^2 = 1 is
    excluded.  All per-point data (structure, splitting, the two twistor
    structure fields) is computed in jet arithmetic and memoized.
    """

    NVARS = 4

    def __init__(self, conn: Connection, sheet: int):
        if conn.n != 1:
            raise DegenerateInputError("the twistor chart needs a dim-2 base")
        if sheet not in (1, -1):
            raise ValueError("sheet must be +1 or -1")
        self.conn = conn
        self.sheet = sheet
        frames = skew_frames(reference_basis(1))
        self.frame = [f.rows for f in frames.left]
        # Christoffel polynomials lifted from (x1, x2) to (x1, x2, u, v)
        self.gamma4: dict[tuple[int, int, int], Poly] = {}
        for (k, i, j), p in conn.entries:
            lifted = {exps + (0, 0): c for exps, c in p.terms}
            self.gamma4[(k, i, j)] = Poly.from_dict(self.NVARS, lifted)
        self._contexts: dict[Vec, dict] = {}
        self._fields: dict[int, GACField] = {}

    # -- chart functions in jet arithmetic --------------------------------

    def _chart_jets(self, point: Vec) -> tuple[list[JetScalar], list[list[JetScalar]]]:
        """x_r and their first partials d x_r / d(u, v), all as jets.

        The partials are entered through their own closed forms so that
        jet arithmetic yields their gradients exactly.
        """
        u = jet_var(2, point)
        v = jet_var(3, point)
        one = jet_const(1, self.NVARS)
        two = jet_const(2, self.NVARS)
        four = jet_const(4, self.NVARS)
        uu, vv, uv = u * u, v * v, u * v
        den = one - uu - vv
        if den.value == 0:
            raise DegenerateInputError("chart singularity u^2 + v^2 = 1")
        den2 = den * den
        s = Fraction(self.sheet)
        x = [((one + uu + vv) / den).scale(s), (two * u) / den, (two * v) / den]
        dx = [
            [((four * u) / den2).scale(s), ((four * v) / den2).scale(s)],
            [(two * (one + uu - vv)) / den2, (four * uv) / den2],
            [(four * uv) / den2, (two * (one + vv - uu)) / den2],
        ]
        return x, dx

    def _coords_of(self, m: JetMat) -> list[JetScalar]:
        """Coefficients of a skew jet matrix in the anticommuting frame."""
        return [jmat_trace_product_const(m, self.frame[r]).scale(-Fraction(1, 2) / _FRAME_NORMS[r])
                for r in range(3)]

    def _solve_uv(self, coords: Sequence[JetScalar], dx: list[list[JetScalar]],
                  check: bool = True) -> tuple[JetScalar, JetScalar]:
        """Solve coords = c_u dx/du + c_v dx/dv for a fibre-tangent vector.

        Rows 2 and 3 of the chart Jacobian are always independent (their
        determinant is 4(1+u^2+v^2)/(1-u^2-v^2)^3); the first row is an
        exact consistency check of tangency.
        """
        det = dx[1][0] * dx[2][1] - dx[1][1] * dx[2][0]
        c_u = (coords[1] * dx[2][1] - coords[2] * dx[1][1]) / det
        c_v = (dx[1][0] * coords[2] - dx[2][0] * coords[1]) / det
        if check:
            probe = dx[0][0] * c_u + dx[0][1] * c_v
            if probe.value != coords[0].value or probe.grad != coords[0].grad:
                raise InvariantError("vector is not tangent to the fibre chart")
        return c_u, c_v

    # -- the per-point context ---------------------------------------------

    def context(self, q: ChartPoint) -> dict:
        cached = self._contexts.get(q.coords)
        if cached is not None:
            return cached
        point = q.coords
        nv = self.NVARS
        x, dx = self._chart_jets(point)
        j_base = jmat_comb(self.frame, x, nv)

        # connection forms in the two base directions, as jets
        omega = []
        for a in range(2):
            gx = [[jet_const(0, nv) for _ in range(2)] for _ in range(2)]
            for (k, i, j), poly in self.gamma4.items():
                if i == a:
                    gx[k][j] = gx[k][j] + jet_of_poly(poly, point)
            w = [[jet_const(0, nv) for _ in range(4)] for _ in range(4)]
            for r in range(2):
                for c in range(2):
                    w[r][c] = gx[r][c]
                    w[2 + r][2 + c] = -gx[c][r]
            omega.append(w)

        # horizontal lift coefficients: vertical part of the lift of d/dx_a
        gammas = []
        for a in range(2):
            w_a = jmat_commutator(j_base, omega[a])  # = -[omega, J]
            gammas.append(self._solve_uv(self._coords_of(w_a), dx))

        # the fibre complex structure in (u, v) coordinates
        kappa = []
        for w in range(2):
            column = [dx[r][w] for r in range(3)]
            jv = jmat_mul(j_base, jmat_comb(self.frame, column, nv))
            kappa.append(self._solve_uv(self._coords_of(jv), dx))

        ctx = {"x": x, "dx": dx, "j_base": j_base, "gammas": gammas, "kappa": kappa}
        self._contexts[q.coords] = ctx
        return ctx

    # -- numeric views of the context --------------------------------------

    def structure_at(self, q: ChartPoint) -> GCStructure:
        ctx = self.context(q)
        return GCStructure(Endo(4, xm.mat([[e.value for e in row] for row in ctx["j_base"]])))

    def twistor_point(self, q: ChartPoint) -> TwistorPoint:
        return TwistorPoint(chart_point(q.coords[:2]), self.structure_at(q))

    def vertical_chart_basis(self, q: ChartPoint) -> tuple[Endo, Endo]:
        """The endomorphisms dJ/du and dJ/dv at the point."""
        ctx = self.context(q)
        out = []
        for w in range(2):
            m = xm.zeros(4, 4)
            for r in range(3):
                m = xm.mat_add(m, xm.mat_scale(ctx["dx"][r][w].value, self.frame[r]))
            out.append(Endo(4, m))
        return out[0], out[1]

    def gamma_values(self, q: ChartPoint) -> Mat:
        """gamma[a][w]: the (u, v) components of the lift of d/dx_a."""
        ctx = self.context(q)
        return xm.mat([[ctx["gammas"][a][w].value for w in range(2)] for a in range(2)])

    def uv_coordinates(self, vertical: Endo, q: ChartPoint) -> tuple[Fraction, Fraction]:
        """Chart coordinates of a vertical endomorphism at the point."""
        ctx = self.context(q)
        nv = self.NVARS
        coords = [jet_const(fib_pairing(vertical, Endo(4, self.frame[r])) / _FRAME_NORMS[r], nv)
                  for r in range(3)]
        dx_vals = [[jet_const(ctx["dx"][r][w].value, nv) for w in range(2)] for r in range(3)]
        c_u, c_v = self._solve_uv(coords, dx_vals)
        return c_u.value, c_v.value

    def endo_from_uv(self, c_u: Fraction, c_v: Fraction, q: ChartPoint) -> Endo:
        b_u, b_v = self.vertical_chart_basis(q)
        return b_u.scale(c_u) + b_v.scale(c_v)

    # -- the structure fields ----------------------------------------------

    def field(self, alpha: int) -> GACField:
        if alpha not in (1, 2):
            raise ValueError("alpha must be 1 or 2")
        cached = self._fields.get(alpha)
        if cached is not None:
            return cached

        def evaluate(q: ChartPoint) -> FieldJet:
            entries = self._field_matrix(alpha, q)
            value = tuple(tuple(e.value for e in row) for row in entries)
            partials = tuple(
                tuple(tuple(entries[i][j].grad[k] for j in range(8)) for i in range(8))
                for k in range(self.NVARS))
            return FieldJet(value, partials)

        field = GACField(self.NVARS, evaluate)
        self._fields[alpha] = field
        return field

    def _field_matrix(self, alpha: int, q: ChartPoint) -> JetMat:
        """The twistor structure at q in the coordinate frame, with gradients.

        Assembled in the splitting frame (lifts h_a, fibre directions,
        pulled-back dx_a, coforms vanishing on the horizontal space) and
        conjugated by the frame change, all in jet arithmetic.
        """
        ctx = self.context(q)
        nv = self.NVARS
        zero = jet_const(0, nv)
        one = jet_const(1, nv)
        j_base = ctx["j_base"]
        gammas = ctx["gammas"]
        kappa = ctx["kappa"]
        sign = 1 if alpha == 1 else -1   # (-1)^(alpha+1)

        split = [[zero for _ in range(8)] for _ in range(8)]
        # order: h1, h2, du, dv | dx1, dx2, thu, thv
        for a in range(2):
            for b in range(2):
                split[a][b] = j_base[a][b]              # V -> V block on lifts
                split[4 + a][b] = j_base[2 + a][b]      # V -> V* block
                split[a][4 + b] = j_base[a][2 + b]      # V* -> V block
                split[4 + a][4 + b] = j_base[2 + a][2 + b]
        for w in range(2):
            for w2 in range(2):
                # fibre block: column d/dw goes to sum kappa[w][w2] d/dw2
                split[2 + w2][2 + w] = kappa[w][w2].scale(Fraction(sign))
                # coform block: the transpose with the opposite sign
                split[6 + w2][6 + w] = kappa[w2][w].scale(Fraction(-sign))

        # frame change: columns of P are the splitting frame in coordinates
        p = [[zero for _ in range(8)] for _ in range(8)]
        p_inv = [[zero for _ in range(8)] for _ in range(8)]
        for i in range(8):
            p[i][i] = one
            p_inv[i][i] = one
        for a in range(2):
            for w in range(2):
                p[2 + w][a] = gammas[a][w]
                p_inv[2 + w][a] = -gammas[a][w]
                p[4 + a][6 + w] = -gammas[a][w]
                p_inv[4 + a][6 + w] = gammas[a][w]
        return jmat_mul(jmat_mul(p, split), p_inv)

    # -- sections on the chart ----------------------------------------------

    def lift_section(self, x_components: Sequence[Poly]) -> JetSection:
        """The horizontal lift of a polynomial base vector field."""
        if len(x_components) != 2:
            raise DegenerateInputError("a base vector field has two components")
        comps4 = [Poly.from_dict(self.NVARS, {e + (0, 0): c for e, c in p.terms})
                  if p.nvars == 2 else p for p in x_components]

        def evaluate(q: ChartPoint) -> Jet1:
            ctx = self.context(q)
            xjets = [jet_of_poly(p, q.coords) for p in comps4]
            vals = [xjets[0], xjets[1]]
            for w in range(2):
                acc = xjets[0] * ctx["gammas"][0][w] + xjets[1] * ctx["gammas"][1][w]
                vals.append(acc)
            zero = jet_const(0, self.NVARS)
            vals += [zero] * 4
            return Jet1(tuple(j.value for j in vals), tuple(j.grad for j in vals))

        return JetSection(self.NVARS, evaluate)

    def tilde_section(self, entries: Sequence[Sequence[Poly]]) -> JetSection:
        """The vertical field J' -> a + J' a J' of a skew section a of the
        endomorphism bundle with polynomial base entries."""
        lifted = [[Poly.from_dict(self.NVARS, {e + (0, 0): c for e, c in p.terms})
                   if p.nvars == 2 else p for p in row] for row in entries]

        def evaluate(q: ChartPoint) -> Jet1:
            ctx = self.context(q)
            a_mat = [[jet_of_poly(p, q.coords) for p in row] for row in lifted]
            jaj = jmat_mul(jmat_mul(ctx["j_base"], a_mat), ctx["j_base"])
            tilde = [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a_mat, jaj)]
            c_u, c_v = self._solve_uv(self._coords_of(tilde), ctx["dx"])
            zero = jet_const(0, self.NVARS)
            vals = [zero, zero, c_u, c_v] + [zero] * 4
            return Jet1(tuple(j.value for j in vals), tuple(j.grad for j in vals))

        return JetSection(self.NVARS, evaluate)

    # -- conversions between chart values and splitting data -----------------

    def decompose(self, value: GElement, q: ChartPoint) -> TwistorTangent:
        """Split a chart tangent-plus-cotangent value at q into horizontal,
        vertical and vertical-coform data for the closed-form evaluator."""
        if value.dim_v != 4:
            raise DegenerateInputError("chart values have four vector components")
        g = self.gamma_values(q)
        b_u, b_v = self.vertical_chart_basis(q)
        x = value.vec
        theta = value.cov
        horizontal = GElement(
            2, (x[0], x[1]),
            (theta[0] + theta[2] * g[0][0] + theta[3] * g[0][1],
             theta[1] + theta[2] * g[1][0] + theta[3] * g[1][1]))
        vert_u = x[2] - x[0] * g[0][0] - x[1] * g[1][0]
        vert_v = x[3] - x[0] * g[0][1] - x[1] * g[1][1]
        vertical = b_u.scale(vert_u) + b_v.scale(vert_v)
        # representer of theta_u thu + theta_v thv on the chart fibre basis
        gram = ((fib_pairing(b_u, b_u), fib_pairing(b_u, b_v)),
                (fib_pairing(b_v, b_u), fib_pairing(b_v, b_v)))
        lam = xm.solve(gram, (theta[2], theta[3]))
        coform = b_u.scale(lam[0]) + b_v.scale(lam[1])
        return TwistorTangent(horizontal, vertical, coform)

    def compose(self, t: TwistorTangent, q: ChartPoint) -> GElement:
        """Inverse of decompose: express splitting data in chart coordinates."""
        g = self.gamma_values(q)
        b_u, b_v = self.vertical_chart_basis(q)
        c_u, c_v = (F0, F0)
        if not t.vertical.is_zero():
            c_u, c_v = self.uv_coordinates(t.vertical, q)
        phi_u = fib_pairing(t.vertical_coform, b_u)
        phi_v = fib_pairing(t.vertical_coform, b_v)
        h = t.horizontal
        vec = (h.vec[0], h.vec[1],
               h.vec[0] * g[0][0] + h.vec[1] * g[1][0] + c_u,
               h.vec[0] * g[0][1] + h.vec[1] * g[1][1] + c_v)
        cov = (h.cov[0] - phi_u * g[0][0] - phi_v * g[0][1],
               h.cov[1] - phi_u * g[1][0] - phi_v * g[1][1],
               phi_u, phi_v)
        return GElement(4, vec, cov)


# ---------------------------------------------------------------------------
# checks on the chart


def chart_bracket_curvature_check(chart: TwistorChart, x_components: Sequence[Poly],
                                  y_components: Sequence[Poly], q: ChartPoint) -> Vec:
    """Residual of [X^h, Y^h] = [X, Y]^h + R(X, Y) J on the twistor chart."""
    fx = chart.lift_section(x_components)
    fy = chart.lift_section(y_components)
    lhs = lie_bracket(fx, fy, q)
    # base Lie bracket of the polynomial fields
    xy = []
    for i in range(2):
        acc = Poly.constant(2, 0)
        for j in range(2):
            acc = acc + x_components[j] * y_components[i].partial(j)
            acc = acc - y_components[j] * x_components[i].partial(j)
        xy.append(acc)
    rhs = list(chart.lift_section(xy).at(q).value[:4])
    base_q = chart_point(q.coords[:2])
    xv = tuple(p.evaluate(base_q.coords) for p in x_components)
    yv = tuple(p.evaluate(base_q.coords) for p in y_components)
    r = curvature(chart.conn, xv, yv, base_q)
    r_vert = r.act_on(chart.structure_at(q).j)
    if not r_vert.is_zero():
        c_u, c_v = chart.uv_coordinates(r_vert, q)
        rhs[2] += c_u
        rhs[3] += c_v
    return tuple(a - b for a, b in zip(lhs, rhs))


def chart_vertical_bracket_check(chart: TwistorChart, x_components: Sequence[Poly],
                                 a_entries: Sequence[Sequence[Poly]], q: ChartPoint) -> Vec:
    """Residual of [X^h, a~] = (nabla_X a)~ at a chart point.

    Here a~ is the vertical field J -> a + J a J attached to a skew
    section a of the endomorphism bundle, and nabla is the induced
    connection, so nabla_X a = X(a) + [omega(X), a] in the constant frame.
    """
    a_mat = [[Poly.from_dict(2, dict(p.terms)) for p in row] for row in a_entries]
    lhs = lie_bracket(chart.lift_section(x_components), chart.tilde_section(a_entries), q)
    base_q = chart_point(q.coords[:2])
    xv = tuple(p.evaluate(base_q.coords) for p in x_components)
    a_val = Endo(4, tuple(tuple(p.evaluate(base_q.coords) for p in row) for row in a_mat))
    if not is_pairing_skew(a_val):
        raise InvariantError("the section a must be skew for the pairing")
    # directional derivative of the entries plus the connection commutator
    da = [[sum((xv[k] * p.partial(k).evaluate(base_q.coords) for k in range(2)), F0)
           for p in row] for row in a_mat]
    omega = connection_matrix(chart.conn, xv, base_q)
    nabla = Endo(4, xm.mat(da)) + (omega.compose(a_val) - a_val.compose(omega))
    j = chart.structure_at(q).j
    tilde = nabla + j.compose(nabla).compose(j)
    c_u, c_v = chart.uv_coordinates(tilde, q) if not tilde.is_zero() else (F0, F0)
    rhs = (F0, F0, c_u, c_v)
    return tuple(a - b for a, b in zip(lhs, rhs))


def lift_bracket_curvature_check(conn: Connection, x_components: Sequence[Poly],
                                 y_components: Sequence[Poly], at: TwistorPoint) -> Vec:
    """Residual of [X^h, Y^h]_a = [X, Y]^h_a + R(X, Y) a on the endomorphism
    bundle, whose fibre is a vector space and therefore carries a global
    chart: base coordinates followed by all matrix entries of a.

    The lift fields are realized as polynomial sections on that chart and
    differentiated directly; the residual is exact and zero for every
    torsion-free connection.  Practical at n = 1 and n = 2.
    """
    if conn.n > 2:
        raise DegenerateInputError("the bundle-chart check is sized for n at most 2")
    dim = conn.dim
    fibre = (2 * dim) ** 2
    nvars = dim + fibre

    def lift4(p: Poly) -> Poly:
        return Poly.from_dict(nvars, {e + (0,) * fibre: c for e, c in p.terms})

    a_var = [[Poly.variable(nvars, dim + (2 * dim) * i + j) for j in range(2 * dim)]
             for i in range(2 * dim)]

    def lift_field(comps: Sequence[Poly]) -> JetSection:
        base = [lift4(p) for p in comps]
        # connection form in direction X, as a matrix of polynomials on the chart
        gx = [[Poly.constant(nvars, 0) for _ in range(dim)] for _ in range(dim)]
        for (k, i, j), poly in conn.entries:
            gx[k][j] = gx[k][j] + lift4(poly * comps[i])
        omega = [[Poly.constant(nvars, 0) for _ in range(2 * dim)] for _ in range(2 * dim)]
        for r in range(dim):
            for c in range(dim):
                omega[r][c] = gx[r][c]
                omega[dim + r][dim + c] = -gx[c][r]
        vertical = []
        for i in range(2 * dim):
            for j in range(2 * dim):
                acc = Poly.constant(nvars, 0)
                for k in range(2 * dim):
                    acc = acc - omega[i][k] * a_var[k][j] + a_var[i][k] * omega[k][j]
                vertical.append(acc)
        comps_all = base + vertical + [Poly.constant(nvars, 0)] * nvars
        from .courant import section_from_coefficients
        return section_from_coefficients(nvars, comps_all)

    point = chart_point(tuple(at.point.coords)
                        + tuple(x for row in at.structure.j.rows for x in row))
    lhs = lie_bracket(lift_field(x_components), lift_field(y_components), point)
    xy = []
    for i in range(dim):
        acc = Poly.constant(dim, 0)
        for j in range(dim):
            acc = acc + x_components[j] * y_components[i].partial(j)
            acc = acc - y_components[j] * x_components[i].partial(j)
        xy.append(acc)
    rhs = list(lift_field(xy).at(point).value[:nvars])
    xv = tuple(p.evaluate(at.point.coords) for p in x_components)
    yv = tuple(p.evaluate(at.point.coords) for p in y_components)
    r_vert = curvature(conn, xv, yv, at.point).act_on(at.structure.j)
    flat_r = [x for row in r_vert.rows for x in row]
    for idx, val in enumerate(flat_r):
        rhs[dim + idx] += val
    return tuple(a - b for a, b in zip(lhs, rhs))


# ---------------------------------------------------------------------------
# the oracle comparison


@dataclass(frozen=True)
class OracleSample:
    base: tuple[Fraction, Fraction]
    fibre: tuple[Fraction, Fraction]
    sheet: int

    def chart_point(self) -> ChartPoint:
        return chart_point(self.base + self.fibre)


@dataclass(frozen=True)
class OracleSampleResult:
    sample: OracleSample
    alpha: int
    pairs: int
    direct_all_zero: bool
    all_equal: bool
    mismatch: tuple[int, int] | None
    lift_bracket_ok: bool
    vertical_bracket_ok: bool


@dataclass(frozen=True)
class OracleReport:
    results: tuple[OracleSampleResult, ...]

    @property
    def all_equal(self) -> bool:
        return all(r.all_equal and r.lift_bracket_ok and r.vertical_bracket_ok
                   for r in self.results)


def seeded_oracle_samples(count: int, seed: int) -> list[OracleSample]:
    """Seeded chart samples away from the fibre-chart circle, on both sheets."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        base = (Fraction(rng.randint(-3, 3), rng.randint(1, 3)),
                Fraction(rng.randint(-3, 3), rng.randint(1, 3)))
        fibre = (Fraction(rng.randint(-2, 2), rng.randint(2, 4)),
                 Fraction(rng.randint(-2, 2), rng.randint(2, 4)))
        if fibre[0] ** 2 + fibre[1] ** 2 == 1:
            continue
        out.append(OracleSample(base, fibre, 1 if len(out) % 2 == 0 else -1))
    return out


def oracle_compare_nijenhuis(conn: Connection, samples: Sequence[OracleSample],
                             alphas: Sequence[int] = (1, 2),
                             perturb: Callable[[GElement], GElement] | None = None,
                             ) -> OracleReport:
    """Compare the direct Courant-bracket Nijenhuis tensor of the twistor
    structure fields against the closed-form evaluator, sample by sample.

    The direct side works purely on the chart: coordinate-section probes,
    Courant brackets, the structure field applied pointwise.  The closed
    side never sees the chart except through the decomposition of the
    probe values at the point.  Exact equality is required pair by pair.
    The perturb hook, applied to the closed-form value, exists so tests
    can confirm that a deliberately wrong term is detected.
    """
    charts: dict[int, TwistorChart] = {}
    results = []
    for sample in samples:
        chart = charts.get(sample.sheet)
        if chart is None:
            chart = TwistorChart(conn, sample.sheet)
            charts[sample.sheet] = chart
        q = sample.chart_point()
        probes = coordinate_sections(4)
        at = chart.twistor_point(q)
        vertical_basis = list(chart.vertical_chart_basis(q))
        decomposed = [chart.decompose(p.value_at(q), q) for p in probes]
        for alpha in alphas:
            field = chart.field(alpha)
            field.validate_at(q)
            pairs = 0
            direct_zero = True
            equal = True
            mismatch = None
            for i in range(len(probes)):
                for k in range(i + 1, len(probes)):
                    pairs += 1
                    direct = nijenhuis(field, probes[i], probes[k], q)
                    closed = nijenhuis_closed_form(alpha, conn, at, decomposed[i],
                                                   decomposed[k], vertical_basis)
                    composed = chart.compose(closed, q)
                    if perturb is not None:
                        composed = perturb(composed)
                    if not direct.is_zero():
                        direct_zero = False
                    if direct != composed:
                        equal = False
                        if mismatch is None:
                            mismatch = (i, k)
            one = Poly.constant(2, 1)
            zero = Poly.constant(2, 0)
            x1p = Poly.variable(2, 0)
            eq_res = chart_bracket_curvature_check(chart, [one, zero], [zero, x1p + one], q)
            a_entries = [[zero, zero, zero, x1p],
                         [zero, zero, -x1p, zero],
                         [zero, zero, zero, zero],
                         [zero, zero, zero, zero]]
            hv_res = chart_vertical_bracket_check(chart, [one, x1p], a_entries, q)
            results.append(OracleSampleResult(
                sample, alpha, pairs, direct_zero, equal, mismatch,
                all(r == 0 for r in eq_res), all(r == 0 for r in hv_res)))
    return OracleReport(tuple(results))
