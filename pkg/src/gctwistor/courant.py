"""Sections of TM + T*M over a chart, their Courant bracket and Nijenhuis tensor.

A section is represented by its evaluator only: at a chart point it
returns a 1-jet (value and first partials), and every operation in this
module consumes nothing beyond that jet.  That first-order completeness
is an API contract: the Lie derivative and exterior-derivative pieces of
the Courant bracket are expanded in coordinates so no second derivative
ever appears.

Chart dimension m is arbitrary here; a section has m vector and m
covector components.  Exact evaluators (polynomial or rational
coefficients) return exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import exactmat as xm
from .exactmat import F0, F1, Mat, Vec, fr
from .gclinalg import (
    Endo,
    GElement,
    from_coords,
    identity_endo,
    is_pairing_skew,
    structure_orientation,
)
from .poly import Coefficient, Poly, RationalFn, as_rational


class ChartMismatchError(ValueError):
    """Point, section or field disagree about the chart dimension."""


class FieldInvariantError(ValueError):
    """A structure field violated its defining identities at a sampled point."""


class ProbeSpanError(ValueError):
    """A probe set fails to span TM + T*M at a sampled point."""


@dataclass(frozen=True)
class ChartPoint:
    coords: Vec

    @property
    def dim(self) -> int:
        return len(self.coords)


def chart_point(coords: Iterable) -> ChartPoint:
    return ChartPoint(xm.vec(coords))


@dataclass(frozen=True)
class Jet1:
    """Value and first partials of a section at a point."""

    value: Vec                 # 2m components: m vector then m covector
    jacobian: Mat              # 2m rows, m columns (column k is the d/dx_k partial)

    def __post_init__(self):
        if len(self.jacobian) != len(self.value):
            raise ChartMismatchError("jacobian rows must match the value length")


@dataclass(frozen=True)
class JetSection:
    """A section of TM + T*M given by a deterministic 1-jet evaluator."""

    chart_dim: int
    evaluate: Callable[[ChartPoint], Jet1]
    components: tuple[RationalFn, ...] | None = None  # closed form, when available

    def at(self, p: ChartPoint) -> Jet1:
        if p.dim != self.chart_dim:
            raise ChartMismatchError("point does not belong to this chart")
        return self.evaluate(p)

    def value_at(self, p: ChartPoint) -> GElement:
        return from_coords(self.at(p).value)


def section_from_coefficients(chart_dim: int, comps: Sequence[Coefficient]) -> JetSection:
    """Closed-form section: 2m polynomial or rational components."""
    if len(comps) != 2 * chart_dim:
        raise ChartMismatchError("a section needs m vector and m covector components")
    rationals = tuple(as_rational(c) for c in comps)
    if any(r.nvars != chart_dim for r in rationals):
        raise ChartMismatchError("component arity does not match the chart")

    def evaluate(p: ChartPoint) -> Jet1:
        jets = [r.jet(p.coords) for r in rationals]
        return Jet1(tuple(v for v, _ in jets), tuple(g for _, g in jets))

    return JetSection(chart_dim, evaluate, rationals)


def constant_section(chart_dim: int, values: Sequence) -> JetSection:
    vals = xm.vec(values)
    if len(vals) != 2 * chart_dim:
        raise ChartMismatchError("a section needs 2m components")
    zero_jac = xm.zeros(2 * chart_dim, chart_dim)

    def evaluate(p: ChartPoint) -> Jet1:
        return Jet1(vals, zero_jac)

    return JetSection(chart_dim, evaluate)


def coordinate_sections(chart_dim: int) -> list[JetSection]:
    """The constant frame d/dx_1, ..., d/dx_m, dx_1, ..., dx_m."""
    out = []
    for i in range(2 * chart_dim):
        values = [F1 if k == i else F0 for k in range(2 * chart_dim)]
        out.append(constant_section(chart_dim, values))
    return out


def section_sum(a: JetSection, b: JetSection) -> JetSection:
    if a.chart_dim != b.chart_dim:
        raise ChartMismatchError("sections live on different charts")

    def evaluate(p: ChartPoint) -> Jet1:
        ja, jb = a.at(p), b.at(p)
        return Jet1(tuple(x + y for x, y in zip(ja.value, jb.value)),
                    xm.mat_add(ja.jacobian, jb.jacobian))

    return JetSection(a.chart_dim, evaluate)


def section_scale(c, a: JetSection) -> JetSection:
    c = fr(c)

    def evaluate(p: ChartPoint) -> Jet1:
        ja = a.at(p)
        return Jet1(tuple(c * x for x in ja.value), xm.mat_scale(c, ja.jacobian))

    return JetSection(a.chart_dim, evaluate)


# ---------------------------------------------------------------------------
# structure fields


@dataclass(frozen=True)
class FieldJet:
    value: Mat                 # 2m x 2m
    partials: tuple[Mat, ...]  # m matrices, d/dx_k of every entry


@dataclass(frozen=True)
class GACField:
    """A generalized almost complex structure field on a chart.

    The evaluator returns the 2m x 2m matrix value together with all
    first partials.  `validate_at` checks the pointwise identities
    (square -Id, pairing skewness) exactly and is invoked by every
    consumer that needs a valid structure.
    """

    chart_dim: int
    evaluate: Callable[[ChartPoint], FieldJet]
    entries: tuple[tuple[RationalFn, ...], ...] | None = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def jet_at(self, p: ChartPoint) -> FieldJet:
        if p.dim != self.chart_dim:
            raise ChartMismatchError("point does not belong to this chart")
        cached = self._cache.get(p.coords)
        if cached is None:
            cached = self.evaluate(p)
            self._cache[p.coords] = cached
        return cached

    def endo_at(self, p: ChartPoint) -> Endo:
        return Endo(2 * self.chart_dim, self.jet_at(p).value)

    def validate_at(self, p: ChartPoint, require_orientation: bool = False) -> None:
        m = self.endo_at(p)
        if m.compose(m) != (-identity_endo(m.dim)):
            raise FieldInvariantError(f"structure field does not square to -Id at {p.coords}")
        if not is_pairing_skew(m):
            raise FieldInvariantError(f"structure field is not pairing skew at {p.coords}")
        if require_orientation and structure_orientation(m) != 1:
            raise FieldInvariantError(f"structure field orientation is not +1 at {p.coords}")


def field_from_coefficients(chart_dim: int, entries: Sequence[Sequence[Coefficient]]) -> GACField:
    size = 2 * chart_dim
    if len(entries) != size or any(len(row) != size for row in entries):
        raise ChartMismatchError("a structure field is a 2m x 2m matrix of coefficients")
    rationals = tuple(tuple(as_rational(c) for c in row) for row in entries)

    def evaluate(p: ChartPoint) -> FieldJet:
        coords = p.coords
        value_rows = []
        grads: list[list[tuple[Fraction, ...]]] = []
        for row in rationals:
            vrow = []
            grow = []
            for r in row:
                v, g = r.jet(coords)
                vrow.append(v)
                grow.append(g)
            value_rows.append(tuple(vrow))
            grads.append(grow)
        partials = tuple(
            tuple(tuple(grads[i][j][k] for j in range(size)) for i in range(size))
            for k in range(chart_dim))
        return FieldJet(tuple(value_rows), partials)

    return GACField(chart_dim, evaluate, rationals)


def constant_field(j: Endo) -> GACField:
    chart_dim = j.dim // 2
    zero = tuple(xm.zeros(j.dim, j.dim) for _ in range(chart_dim))

    def evaluate(p: ChartPoint) -> FieldJet:
        return FieldJet(j.rows, zero)

    return GACField(chart_dim, evaluate)


def apply_field(f: GACField, a: JetSection) -> JetSection:
    """The section p -> J(p) a(p), with the product-rule jet."""
    if f.chart_dim != a.chart_dim:
        raise ChartMismatchError("field and section live on different charts")

    def evaluate(p: ChartPoint) -> Jet1:
        fj = f.jet_at(p)
        aj = a.at(p)
        value = xm.mat_vec(fj.value, aj.value)
        jac_cols = []
        for k in range(f.chart_dim):
            da = tuple(row[k] for row in aj.jacobian)
            col = tuple(x + y for x, y in zip(xm.mat_vec(fj.partials[k], aj.value),
                                              xm.mat_vec(fj.value, da)))
            jac_cols.append(col)
        return Jet1(value, xm.transpose(xm.mat(jac_cols)))

    return JetSection(f.chart_dim, evaluate)


# ---------------------------------------------------------------------------
# brackets


def _split_jet(j: Jet1, m: int):
    x = j.value[:m]
    xi = j.value[m:]
    dx = j.jacobian[:m]
    dxi = j.jacobian[m:]
    return x, xi, dx, dxi


def lie_bracket(xs: JetSection, ys: JetSection, p: ChartPoint) -> Vec:
    """Lie bracket of two purely vector sections, from their 1-jets."""
    m = p.dim
    jx, jy = xs.at(p), ys.at(p)
    for j in (jx, jy):
        if any(v != 0 for v in j.value[m:]) or not xm.is_zero(j.jacobian[m:]):
            raise ChartMismatchError("lie_bracket expects purely vector sections")
    x, _, dx, _ = _split_jet(jx, m)
    y, _, dy, _ = _split_jet(jy, m)
    return tuple(sum(x[j] * dy[i][j] - y[j] * dx[i][j] for j in range(m)) for i in range(m))


def courant_bracket(a: JetSection, b: JetSection, p: ChartPoint) -> GElement:
    """[X + xi, Y + eta] = [X, Y] + L_X eta - L_Y xi - d(i_X eta - i_Y xi)/2."""
    m = p.dim
    if a.chart_dim != m or b.chart_dim != m:
        raise ChartMismatchError("sections do not match the chart point")
    x, xi, dx, dxi = _split_jet(a.at(p), m)
    y, eta, dy, deta = _split_jet(b.at(p), m)
    vec = tuple(sum(x[j] * dy[i][j] - y[j] * dx[i][j] for j in range(m)) for i in range(m))
    half = Fraction(1, 2)
    cov = []
    for i in range(m):
        total = F0
        for j in range(m):
            total += x[j] * deta[i][j] - y[j] * dxi[i][j]
            total += half * (eta[j] * dx[j][i] - xi[j] * dy[j][i])
            total -= half * (x[j] * deta[j][i] - y[j] * dxi[j][i])
        cov.append(total)
    return GElement(m, vec, tuple(cov))


def nijenhuis(jf: GACField, a: JetSection, b: JetSection, p: ChartPoint) -> GElement:
    """N(A, B) = -[A, B] - J[A, JB] - J[JA, B] + [JA, JB] with Courant brackets."""
    jf.validate_at(p)
    j_at_p = jf.endo_at(p)
    ja = apply_field(jf, a)
    jb = apply_field(jf, b)
    t1 = courant_bracket(a, b, p)
    t2 = courant_bracket(a, jb, p)
    t3 = courant_bracket(ja, b, p)
    t4 = courant_bracket(ja, jb, p)
    return (-t1) - j_at_p.apply(t2) - j_at_p.apply(t3) + t4


# ---------------------------------------------------------------------------
# two-form fields and the bracket automorphism test


@dataclass(frozen=True)
class TwoFormField:
    """A pointwise skew two-form with closed-form entries."""

    chart_dim: int
    entries: tuple[tuple[RationalFn, ...], ...]

    def __post_init__(self):
        m = self.chart_dim
        if len(self.entries) != m or any(len(row) != m for row in self.entries):
            raise ChartMismatchError("a two-form on an m-chart is an m x m matrix")
        for i in range(m):
            for j in range(i, m):
                if not (self.entries[i][j] + self.entries[j][i]).is_zero():
                    raise FieldInvariantError("two-form entries are not skew")

    def value_at(self, p: ChartPoint) -> Mat:
        return tuple(tuple(e.evaluate(p.coords) for e in row) for row in self.entries)

    def exterior_derivative(self, p: ChartPoint, i: int, j: int, k: int) -> Fraction:
        """dB(d/dx_i, d/dx_j, d/dx_k) = d_i B_jk + d_j B_ki + d_k B_ij."""
        def partial(a: int, b: int, c: int) -> Fraction:
            r = self.entries[b][c]
            nv, ng = r.num.jet(p.coords)
            dv, dg = r.den.jet(p.coords)
            return (ng[a] * dv - nv * dg[a]) / (dv * dv)
        return partial(i, j, k) + partial(j, k, i) + partial(k, i, j)


def two_form_field(chart_dim: int, entries: Sequence[Sequence[Coefficient]]) -> TwoFormField:
    return TwoFormField(chart_dim, tuple(tuple(as_rational(e) for e in row) for row in entries))


def _exp_b_value(bmat: Mat, g: GElement) -> GElement:
    extra = xm.mat_vec(xm.transpose(bmat), g.vec)
    return GElement(g.dim_v, g.vec, tuple(c + e for c, e in zip(g.cov, extra)))


def exp_b_section(bf: TwoFormField, a: JetSection) -> JetSection:
    """The section p -> e^{B(p)} a(p) = a(p) + i_{X(p)} B(p)."""
    m = bf.chart_dim
    if a.chart_dim != m:
        raise ChartMismatchError("section and two-form live on different charts")

    def evaluate(p: ChartPoint) -> Jet1:
        aj = a.at(p)
        x = aj.value[:m]
        jets = [[bf.entries[i][j].jet(p.coords) for j in range(m)] for i in range(m)]
        value = list(aj.value)
        jac = [list(row) for row in aj.jacobian]
        for j in range(m):
            # (i_X B)_j = sum_i B_ij X^i, with the product-rule jet
            value[m + j] += sum(jets[i][j][0] * x[i] for i in range(m))
            for k in range(m):
                jac[m + j][k] += sum(jets[i][j][1][k] * x[i]
                                     + jets[i][j][0] * aj.jacobian[i][k]
                                     for i in range(m))
        return Jet1(tuple(value), xm.mat(jac))

    return JetSection(m, evaluate)


def b_automorphism_defect(bf: TwoFormField, a: JetSection, c: JetSection,
                          p: ChartPoint) -> GElement:
    """e^B [A, C] - [e^B A, e^B C] at p; zero everywhere iff dB = 0."""
    lhs = _exp_b_value(bf.value_at(p), courant_bracket(a, c, p))
    rhs = courant_bracket(exp_b_section(bf, a), exp_b_section(bf, c), p)
    return lhs - rhs


# ---------------------------------------------------------------------------
# scanning


def default_probes(chart_dim: int, perturbed: bool = False) -> list[JetSection]:
    """Coordinate sections, plus polynomial-perturbed copies when requested."""
    probes = coordinate_sections(chart_dim)
    if perturbed:
        for i, base in enumerate(coordinate_sections(chart_dim)):
            factor = Poly.constant(chart_dim, 1) + Poly.variable(chart_dim, i % chart_dim)
            comps = [Poly.constant(chart_dim, 0)] * (2 * chart_dim)
            comps[i] = factor
            probes.append(section_from_coefficients(chart_dim, comps))
    return probes


def check_spanning(probes: Sequence[JetSection], p: ChartPoint) -> None:
    rows = [probe.at(p).value for probe in probes]
    if xm.rank(xm.mat(rows)) != 2 * p.dim:
        raise ProbeSpanError(f"probe set does not span TM + T*M at {p.coords}")


@dataclass(frozen=True)
class PointScan:
    point: ChartPoint
    all_zero: bool
    max_abs: float
    witness: tuple[int, int] | None  # probe indices of the first nonzero residual


@dataclass(frozen=True)
class ScanReport:
    mode: str
    points: tuple[PointScan, ...]

    @property
    def empty(self) -> bool:
        return not self.points

    @property
    def all_zero(self) -> bool:
        return bool(self.points) and all(s.all_zero for s in self.points)

    def first_witness(self) -> tuple[ChartPoint, tuple[int, int]] | None:
        for s in self.points:
            if s.witness is not None:
                return s.point, s.witness
        return None


def scan_report_to_json(report: ScanReport) -> dict:
    """Per-point residual entries as plain JSON data."""
    from .poly import scalar_to_str
    return {
        "mode": report.mode,
        "points": [
            {"point": [scalar_to_str(c) for c in s.point.coords],
             "all_zero": s.all_zero,
             "max_abs": s.max_abs,
             "witness": list(s.witness) if s.witness else None}
            for s in report.points
        ],
    }


def integrability_scan(jf: GACField, points: Sequence[ChartPoint],
                       probes: Sequence[JetSection], mode: str = "exact") -> ScanReport:
    """Nijenhuis residuals of a structure field over points x probe pairs.

    Exact mode records is-zero flags; float mode records residual
    magnitudes.  An empty point list yields an empty report, which is
    distinct from an all-zero one.
    """
    if mode not in ("exact", "float"):
        raise ValueError("mode must be 'exact' or 'float'")
    results = []
    for p in points:
        check_spanning(probes, p)
        zero = True
        biggest = 0.0
        witness = None
        for i in range(len(probes)):
            for k in range(i + 1, len(probes)):
                value = nijenhuis(jf, probes[i], probes[k], p)
                if not value.is_zero():
                    zero = False
                    if witness is None:
                        witness = (i, k)
                    if mode == "float":
                        biggest = max(biggest, max(abs(float(c)) for c in value.coords))
        results.append(PointScan(p, zero, biggest, witness))
    return ScanReport(mode, tuple(results))
