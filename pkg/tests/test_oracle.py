import random
from fractions import Fraction as F

import pytest

from gctwistor.courant import chart_point, coordinate_sections, nijenhuis
from gctwistor.gclinalg import (
    DegenerateInputError,
    GElement,
    gelem,
    hyperboloid_point,
    is_vertical,
    reference_basis,
)
from gctwistor.oracle import (
    OracleSample,
    TwistorChart,
    chart_bracket_curvature_check,
    chart_vertical_bracket_check,
    jet_const,
    jet_var,
    lift_bracket_curvature_check,
    oracle_compare_nijenhuis,
    seeded_oracle_samples,
)
from gctwistor.poly import Poly
from gctwistor.twistor import (
    TwistorPoint,
    connection,
    flat_connection,
    random_chart_point,
    sample_fibre_structure,
)

CONN = connection(1, {(0, 1, 1): Poly.variable(2, 0)})
ONE = Poly.constant(2, 1)
ZERO = Poly.constant(2, 0)
X1 = Poly.variable(2, 0)
X2 = Poly.variable(2, 1)


def q_at(x1=F(1, 2), x2=F(1, 3), u=F(1, 4), v=F(1, 5)):
    return chart_point([x1, x2, u, v])


# ---------------------------------------------------------------------------
# jet arithmetic


def test_jet_scalar_rules():
    point = (F(2), F(3))
    x = jet_var(0, point)
    y = jet_var(1, point)
    p = x * x * y  # value 12, gradient (12, 4)
    assert p.value == 12
    assert p.grad == (F(12), F(4))
    q = p / (x + jet_const(1, 2))
    assert q.value == 4
    # quotient rule at (2, 3): d/dx [x^2 y / (x+1)] = (2xy(x+1) - x^2 y)/(x+1)^2
    assert q.grad[0] == (F(36) - F(12)) / 9
    assert q.grad[1] == F(4, 3)
    with pytest.raises(ZeroDivisionError):
        p / jet_const(0, 2)


# ---------------------------------------------------------------------------
# the chart


def test_chart_structure_matches_constructor():
    chart = TwistorChart(CONN, 1)
    q = q_at()
    expected = hyperboloid_point(F(1, 4), F(1, 5), 1, reference_basis(1))
    assert chart.structure_at(q).j == expected.j
    negative = TwistorChart(CONN, -1)
    expected_neg = hyperboloid_point(F(1, 4), F(1, 5), -1, reference_basis(1))
    assert negative.structure_at(q).j == expected_neg.j


def test_chart_rejects_singular_fibre():
    chart = TwistorChart(CONN, 1)
    with pytest.raises(DegenerateInputError):
        chart.structure_at(chart_point([F(0), F(0), F(3, 5), F(4, 5)]))


def test_fields_are_valid_structures():
    chart = TwistorChart(CONN, 1)
    for alpha in (1, 2):
        field = chart.field(alpha)
        for q in (q_at(), q_at(u=F(2), v=F(0)), q_at(x1=F(-3))):
            field.validate_at(q)


def test_vertical_chart_basis_is_vertical():
    chart = TwistorChart(CONN, 1)
    q = q_at()
    j = chart.structure_at(q).j
    b_u, b_v = chart.vertical_chart_basis(q)
    assert is_vertical(b_u, j) and is_vertical(b_v, j)
    # uv coordinates invert the basis construction
    assert chart.uv_coordinates(b_u, q) == (1, 0)
    assert chart.uv_coordinates(b_v.scale(F(3, 2)), q) == (0, F(3, 2))


def test_lift_section_matches_closed_form_lift():
    from gctwistor.twistor import horizontal_lift
    chart = TwistorChart(CONN, 1)
    q = q_at()
    lift = chart.lift_section([ONE, ZERO]).at(q)
    assert lift.value[:2] == (1, 0)
    at = chart.twistor_point(q)
    closed = horizontal_lift(CONN, (F(1), F(0)), at)
    assert chart.uv_coordinates(closed.vertical, q) == (lift.value[2], lift.value[3])


def test_decompose_compose_roundtrip():
    chart = TwistorChart(CONN, 1)
    q = q_at(u=F(1, 3), v=F(0))
    rng = random.Random(5)
    for _ in range(6):
        value = gelem([F(rng.randint(-3, 3), 2) for _ in range(4)],
                      [F(rng.randint(-3, 3), 3) for _ in range(4)])
        t = chart.decompose(value, q)
        assert chart.compose(t, q) == value


def test_decompose_splits_lift_directions():
    chart = TwistorChart(CONN, 1)
    q = q_at()
    lift = chart.lift_section([ONE, ZERO]).at(q).value
    t = chart.decompose(GElement(4, lift[:4], lift[4:]), q)
    # a lift decomposes into a purely horizontal tangent
    assert t.vertical.is_zero() and t.vertical_coform.is_zero()
    assert t.horizontal == gelem([1, 0], [0, 0])


# ---------------------------------------------------------------------------
# bracket identities on the chart


def test_bracket_curvature_identity_on_chart():
    chart = TwistorChart(CONN, 1)
    for q in (q_at(), q_at(u=F(1, 2), v=F(1, 2)), q_at(x1=F(2), u=F(0), v=F(2))):
        res = chart_bracket_curvature_check(chart, [ONE, ZERO], [ZERO, ONE], q)
        assert all(r == 0 for r in res)
        res = chart_bracket_curvature_check(chart, [X2, X1], [X1 * X1, ONE + X2], q)
        assert all(r == 0 for r in res)


def test_bracket_curvature_identity_flat():
    chart = TwistorChart(flat_connection(1), 1)
    res = chart_bracket_curvature_check(chart, [ONE, ZERO], [ZERO, ONE], q_at())
    assert all(r == 0 for r in res)


def test_vertical_bracket_identity_on_chart():
    chart = TwistorChart(CONN, 1)
    a_entries = [[ZERO, ZERO, ZERO, X1],
                 [ZERO, ZERO, -X1, ZERO],
                 [ZERO, ZERO, ZERO, ZERO],
                 [ZERO, ZERO, ZERO, ZERO]]
    for q in (q_at(), q_at(u=F(2), v=F(1, 2))):
        res = chart_vertical_bracket_check(chart, [ONE, X2], a_entries, q)
        assert all(r == 0 for r in res)


def test_bundle_chart_identity_n1_n2():
    basis = reference_basis(1)
    at = TwistorPoint(chart_point([F(1), F(2)]),
                      hyperboloid_point(F(1, 3), F(1, 7), 1, basis))
    res = lift_bracket_curvature_check(CONN, [ONE, X1], [X1, ONE + X1 * X1], at)
    assert all(r == 0 for r in res)
    # the curvature term is load-bearing here, the two sides differ without it
    from gctwistor.twistor import curvature
    r_val = curvature(CONN, (F(1), F(1)), (F(1), F(1) + F(1)), at.point)
    assert not r_val.act_on(at.structure.j).is_zero()
    conn2 = connection(2, {(0, 1, 1): Poly.variable(4, 0)})
    rng = random.Random(3)
    at2 = TwistorPoint(random_chart_point(4, rng), sample_fibre_structure(2, rng))
    one4 = Poly.constant(4, 1)
    zero4 = Poly.constant(4, 0)
    x14 = Poly.variable(4, 0)
    res2 = lift_bracket_curvature_check(conn2, [one4, zero4, x14, zero4],
                                        [zero4, one4, zero4, x14 * x14], at2)
    assert all(r == 0 for r in res2)


# ---------------------------------------------------------------------------
# the oracle


def test_oracle_equality_both_alphas():
    samples = seeded_oracle_samples(2, 42)
    report = oracle_compare_nijenhuis(CONN, samples)
    assert report.all_equal
    for r in report.results:
        assert r.pairs == 28
        assert r.lift_bracket_ok and r.vertical_bracket_ok
        if r.alpha == 1:
            assert r.direct_all_zero
        else:
            assert not r.direct_all_zero


def test_oracle_flat_connection():
    samples = [OracleSample((F(0), F(0)), (F(1, 3), F(1, 4)), 1)]
    report = oracle_compare_nijenhuis(flat_connection(1), samples, alphas=(1,))
    assert report.all_equal
    assert report.results[0].direct_all_zero


def test_oracle_detects_perturbed_closed_form():
    samples = [OracleSample((F(1), F(0)), (F(1, 2), F(0)), 1)]

    def tamper(g):
        return GElement(g.dim_v, g.vec, tuple(c + 1 for c in g.cov))

    report = oracle_compare_nijenhuis(CONN, samples, alphas=(2,), perturb=tamper)
    assert not report.all_equal
    assert report.results[0].mismatch is not None


def test_oracle_mixed_probe_nonzero_for_alpha2():
    # a mixed horizontal and vertical probe pair where both sides agree and
    # the common value is nonzero
    chart = TwistorChart(CONN, 1)
    q = q_at(u=F(1, 2), v=F(0))
    probes = coordinate_sections(4)
    field = chart.field(2)
    direct = nijenhuis(field, probes[0], probes[2], q)  # d/dx1 against d/du
    assert not direct.is_zero()


def test_seeded_samples_avoid_singularity():
    for s in seeded_oracle_samples(20, 3):
        assert s.fibre[0] ** 2 + s.fibre[1] ** 2 != 1
        assert s.sheet in (1, -1)


def test_scan_of_noninteg_structure_field_on_chart():
    # the second twistor structure realized on the chart is never
    # integrable: the generic scan machinery finds a witness
    from gctwistor.courant import default_probes, integrability_scan
    chart = TwistorChart(CONN, 1)
    field = chart.field(2)
    points = [q_at(), q_at(u=F(1, 2), v=F(0))]
    report = integrability_scan(field, points, default_probes(4))
    assert not report.all_zero
    assert report.first_witness() is not None
    # while the first structure scans all-zero on the same points
    report1 = integrability_scan(chart.field(1), points, default_probes(4))
    assert report1.all_zero


def test_endo_serialization_roundtrip():
    from gctwistor.gclinalg import endo_from_json, endo_to_json
    chart = TwistorChart(CONN, 1)
    j = chart.structure_at(q_at()).j
    data = endo_to_json(j)
    assert endo_from_json(data) == j


def test_direct_nijenhuis_is_tensorial():
    # the Nijenhuis value depends only on the pointwise values of its
    # arguments: rescaling a probe by a function equal to one at the point
    # (changing its jet, not its value) must not change the output
    from gctwistor.courant import section_from_coefficients
    chart = TwistorChart(CONN, 1)
    q = q_at(u=F(1, 3), v=F(1, 2))
    field = chart.field(2)
    probes = coordinate_sections(4)
    m = 4
    for idx_a, idx_b in ((0, 2), (1, 6), (3, 5)):
        base = probes[idx_a].at(q).value
        comps = []
        for i, val in enumerate(base):
            # (val) * (1 + (x_i - x_i(q))) as a polynomial: value unchanged at
            # q, jacobian shifted by val in direction i mod m
            factor = Poly.constant(m, 1) + Poly.variable(m, i % m) \
                - Poly.constant(m, q.coords[i % m])
            comps.append(Poly.constant(m, val) * factor)
        perturbed = section_from_coefficients(m, comps)
        assert perturbed.at(q).value == base
        assert perturbed.at(q).jacobian != probes[idx_a].at(q).jacobian
        direct = nijenhuis(field, probes[idx_a], probes[idx_b], q)
        assert nijenhuis(field, perturbed, probes[idx_b], q) == direct


def test_oracle_with_generic_polynomial_connection():
    # several interacting Christoffel entries of mixed degree
    x1 = Poly.variable(2, 0)
    x2 = Poly.variable(2, 1)
    conn = connection(1, {
        (0, 1, 1): x1,
        (1, 0, 1): x2 * x2,
        (0, 0, 0): x1 * x2,
    })
    samples = [OracleSample((F(1, 2), F(-1, 3)), (F(1, 5), F(1, 2)), 1),
               OracleSample((F(2), F(1)), (F(0), F(1, 3)), -1)]
    report = oracle_compare_nijenhuis(conn, samples)
    assert report.all_equal
    assert all(r.lift_bracket_ok and r.vertical_bracket_ok for r in report.results)
    assert all(r.direct_all_zero for r in report.results if r.alpha == 1)
