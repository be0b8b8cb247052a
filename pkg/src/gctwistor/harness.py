"""Scenario-driven verification suites with machine-readable reports.

A scenario bundles a chart dimension, a torsion-free connection, a seed,
sample counts and a list of named checks.  Every check runs in exact
arithmetic (float mode only changes how residuals are *reported*), and a
report is a deterministic function of (scenario, seed): two runs emit
byte-identical JSON.  Wall-clock timings appear in the text rendering
only, precisely so the JSON stays reproducible.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from . import exactmat as xm
from .courant import (
    chart_point,
    constant_field,
    courant_bracket,
    default_probes,
    integrability_scan,
    lie_bracket,
    nijenhuis,
    section_from_coefficients,
    two_form_field,
)
from .gclinalg import (
    Endo,
    GElement,
    b_transform,
    basis_covector,
    basis_vector,
    beta_transform,
    coordinate_elements,
    dim2_basis_orientation,
    exp_two_form,
    exp_two_vector,
    from_complex,
    from_symplectic,
    gelem,
    gl_action,
    gl_endo,
    hyperboloid_chart,
    hyperboloid_point,
    is_pairing_orthogonal,
    neutral_pairing,
    projection_nondegeneracy_check,
    random_orthonormal_basis,
    reference_basis,
    skew_decompose,
    skew_frames,
    vertical_space_basis,
)
from .oracle import (
    lift_bracket_curvature_check,
    oracle_compare_nijenhuis,
    seeded_oracle_samples,
)
from .poly import Poly, scalar_to_str
from .twistor import (
    Connection,
    TwistorPoint,
    connection_from_json,
    flat_connection,
    hybrid_nijenhuis_horizontal,
    mu_forced_zero_check,
    nijenhuis_closed_form,
    nijenhuis_horizontal,
    nijenhuis_mixed,
    random_chart_point,
    random_invertible_matrix,
    random_skew_matrix,
    sample_adapted_point,
    sample_fibre_structure,
    standard_complex_matrix,
    standard_symplectic_matrix,
    tangent_from_parts,
    validate_tangent,
)


class ScenarioError(ValueError):
    """The scenario is malformed: unknown check, bad connection, bad mode."""


@dataclass(frozen=True)
class Scenario:
    name: str
    n: int
    conn: Connection
    mode: str
    seed: int
    samples: Mapping[str, object]
    checks: tuple[str, ...]

    def count(self, key: str, default: int) -> int:
        return int(self.samples.get(key, default))


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str                 # "pass" | "fail" | "finding"
    residual: str | None
    witness: dict | None

    @property
    def ok(self) -> bool:
        return self.status in ("pass", "finding")


@dataclass(frozen=True)
class Report:
    scenario: str
    seed: int
    mode: str
    results: tuple[CheckResult, ...]
    timings: tuple[tuple[str, float], ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def to_json_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "mode": self.mode,
            "ok": self.ok,
            "results": [
                {"name": r.name, "status": r.status, "residual": r.residual,
                 "witness": r.witness}
                for r in self.results
            ],
        }


def _zero_residual(mode: str) -> str:
    return "0" if mode == "exact" else "0.0"


def _ok(name: str, scenario: Scenario, witness: dict | None = None,
        finding: bool = False) -> CheckResult:
    return CheckResult(name, "finding" if finding else "pass",
                       _zero_residual(scenario.mode), witness)


def _fail(name: str, scenario: Scenario, residual, witness: dict | None = None) -> CheckResult:
    if isinstance(residual, Fraction):
        text = scalar_to_str(residual) if scenario.mode == "exact" else repr(float(residual))
    else:
        text = str(residual)
    return CheckResult(name, "fail", text, witness)


def _element_witness(g: GElement) -> dict:
    return {"vec": [scalar_to_str(c) for c in g.vec],
            "cov": [scalar_to_str(c) for c in g.cov]}


def _first_nonzero(g: GElement) -> Fraction:
    return next((c for c in g.coords if c != 0), Fraction(0))


# ---------------------------------------------------------------------------
# linear-algebra suite


def _check_pairing_examples(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "linalg/pairing-examples"
    e1 = basis_vector(2, 0)
    e2 = basis_vector(2, 1)
    a1 = basis_covector(2, 0)
    if neutral_pairing(e1, a1) != Fraction(1, 2):
        return _fail(name, scenario, neutral_pairing(e1, a1), {"case": "<e1, a1>"})
    if neutral_pairing(e1, e2) != 0:
        return _fail(name, scenario, neutral_pairing(e1, e2), {"case": "<e1, e2>"})
    if neutral_pairing(e1 + a1, e1 + a1) != 1:
        return _fail(name, scenario, neutral_pairing(e1 + a1, e1 + a1), {"case": "<e1+a1, e1+a1>"})
    return _ok(name, scenario)


def _check_projection(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "linalg/projection-nondegeneracy"
    rng = random.Random(scenario.seed)
    for n in (1, 2):
        for trial in range(scenario.count("base_points", 25)):
            basis = random_orthonormal_basis(n, rng)
            report = projection_nondegeneracy_check(basis)
            if not report.ok or report.det_p == 0:
                return _fail(name, scenario, report.det_p, {"n": n, "trial": trial})
    return _ok(name, scenario)


def _check_dim2_orientation(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "linalg/dim2-orientation"
    rng = random.Random(scenario.seed + 1)
    for trial in range(scenario.count("base_points", 100)):
        basis = random_orthonormal_basis(1, rng)
        report = dim2_basis_orientation(basis)
        if not report.orthogonal:
            return _fail(name, scenario, "A not orthogonal", {"trial": trial})
        if report.transition_det != 4 * xm.det(report.a):
            return _fail(name, scenario, report.transition_det, {"trial": trial})
    return _ok(name, scenario)


def _check_orientation_parity(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "linalg/orientation-parity"
    for n in range(1, 5):
        if from_complex(standard_complex_matrix(n)).orientation() != 1:
            return _fail(name, scenario, "complex-type orientation", {"n": n})
        expected = 1 if n % 2 == 0 else -1
        if from_symplectic(standard_symplectic_matrix(n)).orientation() != expected:
            return _fail(name, scenario, "symplectic-type orientation", {"n": n})
    return _ok(name, scenario)


def _frame_relation_table(frames) -> list[tuple[str, Endo, Endo]]:
    left, right = frames.left, frames.right
    ident = Endo(4, xm.identity(4))
    rel: list[tuple[str, Endo, Endo]] = []
    for label, triple in (("left", left), ("right", right)):
        squares = (ident.scale(-1), ident, ident)
        for r in range(3):
            rel.append((f"{label}{r + 1}^2", triple[r].compose(triple[r]), squares[r]))
        for r in range(3):
            for s in range(r + 1, 3):
                rel.append((f"{label}{r + 1}{label}{s + 1} anticommute",
                            triple[r].compose(triple[s]) + triple[s].compose(triple[r]),
                            Endo(4, xm.zeros(4, 4))))
    for r in range(3):
        for s in range(3):
            rel.append((f"left{r + 1} right{s + 1} commute",
                        left[r].compose(right[s]), right[s].compose(left[r])))
    return rel


def _check_skew_frame_relations(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "linalg/skew-frame-relations"
    rng = random.Random(scenario.seed + 2)
    tamper = hooks.get("tamper_frames")
    for trial in range(10):
        basis = random_orthonormal_basis(1, rng)
        frames = skew_frames(basis)
        if tamper is not None:
            frames = tamper(frames)
        relations = _frame_relation_table(frames)
        if len(relations) != 21:
            return _fail(name, scenario, len(relations), {"reason": "relation count"})
        for label, got, expected in relations:
            if got != expected:
                return _fail(name, scenario, "relation violated",
                             {"trial": trial, "relation": label})
    return _ok(name, scenario)


def _check_frame_roundtrip(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "linalg/frame-decomposition-roundtrip"
    rng = random.Random(scenario.seed + 3)
    for trial in range(10):
        basis = random_orthonormal_basis(1, rng)
        frames = skew_frames(basis)
        coeffs = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(6)]
        k = Endo(4, xm.zeros(4, 4))
        for c, m in zip(coeffs, frames.all()):
            k = k + m.scale(c)
        decomposition = skew_decompose(k, basis)
        if list(decomposition.left) + list(decomposition.right) != coeffs:
            return _fail(name, scenario, "coefficients differ", {"trial": trial})
    return _ok(name, scenario)


def _check_transform_isometries(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "linalg/transform-isometries"
    rng = random.Random(scenario.seed + 4)
    probes = coordinate_elements(2)
    j = from_complex(standard_complex_matrix(1))
    for trial in range(10):
        b = random_skew_matrix(2, rng)
        beta = random_skew_matrix(2, rng)
        g = random_invertible_matrix(2, rng)
        for label, m in (("e^B", exp_two_form(b)), ("e^beta", exp_two_vector(beta)),
                         ("gl", gl_endo(g))):
            if not is_pairing_orthogonal(m):
                return _fail(name, scenario, "pairing not preserved", {"map": label})
        for label, jt in (("b", b_transform(j, b)), ("beta", beta_transform(j, beta)),
                          ("gl", gl_action(g, j))):
            if jt.orientation() != j.orientation():
                return _fail(name, scenario, "orientation flipped", {"map": label})
    return _ok(name, scenario)


def _check_hyperboloid_chart(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "linalg/hyperboloid-chart"
    rng = random.Random(scenario.seed + 5)
    basis = reference_basis(1)
    minus_id = Endo(4, xm.mat_scale(Fraction(-1), xm.identity(4)))
    for trial in range(10):
        u = Fraction(rng.randint(-3, 3), rng.randint(2, 5))
        v = Fraction(rng.randint(-3, 3), rng.randint(2, 5))
        if u * u + v * v == 1:
            continue
        sheet = 1 if trial % 2 == 0 else -1
        x1, x2, x3 = hyperboloid_chart(u, v, sheet)
        if x1 * x1 - x2 * x2 - x3 * x3 != 1:
            return _fail(name, scenario, "chart identity", {"u": scalar_to_str(u)})
        structure = hyperboloid_point(u, v, sheet, basis)
        if structure.j.compose(structure.j) != minus_id:
            return _fail(name, scenario, "square", {"u": scalar_to_str(u)})
    return _ok(name, scenario)


# ---------------------------------------------------------------------------
# courant suite


def _check_bracket_examples(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "courant/bracket-examples"
    m = 2
    x1 = Poly.variable(m, 0)
    x2 = Poly.variable(m, 1)
    one = Poly.constant(m, 1)
    zero = Poly.constant(m, 0)
    p = chart_point([Fraction(1, 3), Fraction(2, 7)])
    xs = section_from_coefficients(m, [x2, zero, zero, zero])
    ys = section_from_coefficients(m, [zero, one, zero, zero])
    if lie_bracket(xs, ys, p) != (Fraction(-1), Fraction(0)):
        return _fail(name, scenario, "lie", {"case": "[x2 d1, d2]"})
    a = section_from_coefficients(m, [zero, zero, zero, x1])
    b = section_from_coefficients(m, [one, zero, zero, zero])
    got = courant_bracket(a, b, p)
    if got != gelem([0, 0], [0, -1]):
        return _fail(name, scenario, "courant", {"case": "(0, x1 dx2) with (d1, 0)"})
    if not courant_bracket(a, a, p).is_zero():
        return _fail(name, scenario, "courant", {"case": "[A, A]"})
    return _ok(name, scenario)


def _check_nijenhuis_antisymmetry(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "courant/nijenhuis-antisymmetry"
    rng = random.Random(scenario.seed + 6)
    m = 2
    field = constant_field(from_complex(standard_complex_matrix(1)).j)

    def rand_poly():
        return Poly.from_dict(m, {(rng.randint(0, 2), rng.randint(0, 2)):
                                  Fraction(rng.randint(-3, 3)) for _ in range(2)})

    for trial in range(5):
        a = section_from_coefficients(m, [rand_poly() for _ in range(4)])
        b = section_from_coefficients(m, [rand_poly() for _ in range(4)])
        p = chart_point([Fraction(rng.randint(-3, 3), 2), Fraction(rng.randint(-3, 3), 3)])
        if not (nijenhuis(field, a, b, p) + nijenhuis(field, b, a, p)).is_zero():
            return _fail(name, scenario, "antisymmetry", {"trial": trial})
    return _ok(name, scenario)


def _check_constant_structure(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "courant/constant-structure-integrable"
    rng = random.Random(scenario.seed + 7)
    field = constant_field(from_complex(standard_complex_matrix(1)).j)
    points = [chart_point([Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(2)])
              for _ in range(5)]
    report = integrability_scan(field, points, default_probes(2, perturbed=True),
                                mode=scenario.mode)
    if not report.all_zero:
        w = report.first_witness()
        return _fail(name, scenario, "nonzero residual",
                     {"point": [scalar_to_str(c) for c in w[0].coords]} if w else None)
    return _ok(name, scenario)


def _check_b_automorphism(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "courant/b-transform-automorphism"
    rng = random.Random(scenario.seed + 8)
    m = 4
    zero = Poly.constant(m, 0)
    one = Poly.constant(m, 1)
    x1 = Poly.variable(m, 0)
    x2 = Poly.variable(m, 1)

    def skew_entries(fill):
        entries = [[zero] * m for _ in range(m)]
        for (i, j), val in fill.items():
            entries[i][j] = val
            entries[j][i] = -val
        return entries

    def rand_section():
        comps = []
        for _ in range(2 * m):
            comps.append(Poly.from_dict(m, {tuple(rng.randint(0, 1) for _ in range(m)):
                                            Fraction(rng.randint(-3, 3)) for _ in range(2)}))
        return section_from_coefficients(m, comps)

    points = [chart_point([Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(m)])
              for _ in range(10)]
    closed_fields = [two_form_field(m, skew_entries({(0, 1): one})),
                     two_form_field(m, skew_entries({(0, 1): x1}))]
    a, c = rand_section(), rand_section()
    from .courant import b_automorphism_defect
    for idx, bf in enumerate(closed_fields):
        for p in points:
            defect = b_automorphism_defect(bf, a, c, p)
            if not defect.is_zero():
                return _fail(name, scenario, _first_nonzero(defect),
                             {"field": idx, "point": [scalar_to_str(x) for x in p.coords]})
    open_field = two_form_field(m, skew_entries({(0, 2): x2}))
    for p in points:
        for _ in range(4):
            a2, c2 = rand_section(), rand_section()
            defect = b_automorphism_defect(open_field, a2, c2, p)
            if not defect.is_zero():
                witness = {"point": [scalar_to_str(x) for x in p.coords],
                           "defect": _element_witness(defect)}
                return _ok(name, scenario, witness, finding=True)
    return _fail(name, scenario, "no witness", {"reason": "non-closed form gave zero defect"})


# ---------------------------------------------------------------------------
# integrability suite


def _probe_set(n: int, basis: Sequence[Endo], spec: str):
    """'full': horizontal, vertical and coform probes; 'horizontal': the
    coordinate elements only (they already span H + H*)."""
    probes = [tangent_from_parts(n, horizontal=h) for h in coordinate_elements(2 * n)]
    if spec == "full":
        probes += [tangent_from_parts(n, vertical=u) for u in basis]
        probes += [tangent_from_parts(n, vertical_coform=u) for u in basis]
    elif spec != "horizontal":
        raise ScenarioError(f"unknown probe_spec {spec!r}")
    return probes


def _scan_closed_form(alpha: int, conn: Connection, at: TwistorPoint,
                      spec: str = "full"):
    """Yield (probe pair, value) over the probe set at one twistor point."""
    basis = vertical_space_basis(at.structure)
    probes = _probe_set(at.n, basis, spec)
    for tangent in probes:
        validate_tangent(tangent, at)
    for i in range(len(probes)):
        for k in range(i + 1, len(probes)):
            yield (i, k), nijenhuis_closed_form(alpha, conn, at, probes[i], probes[k],
                                                basis, validate=False)


def _n1_twistor_points(scenario: Scenario, rng: random.Random, count: int):
    basis = reference_basis(1)
    made = 0
    while made < count:
        u = Fraction(rng.randint(-3, 3), rng.randint(2, 5))
        v = Fraction(rng.randint(-3, 3), rng.randint(2, 5))
        if u * u + v * v == 1:
            continue
        sheet = 1 if made % 2 == 0 else -1
        structure = hyperboloid_point(u, v, sheet, basis)
        yield TwistorPoint(random_chart_point(2, rng), structure), (u, v, sheet)
        made += 1


def _check_n1_vanishing(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "integrability/n1-structure1-vanishes"
    if scenario.n != 1:
        return _fail(name, scenario, "scenario has n != 1", None)
    rng = random.Random(scenario.seed + 9)
    count = scenario.count("base_points", 50)
    spec = str(scenario.samples.get("probe_spec", "full"))
    for at, (u, v, sheet) in _n1_twistor_points(scenario, rng, count):
        for (i, k), value in _scan_closed_form(1, scenario.conn, at, spec):
            if not value.is_zero():
                witness = {"fibre": [scalar_to_str(u), scalar_to_str(v)], "sheet": sheet,
                           "probe_pair": [i, k]}
                return _fail(name, scenario, "nonzero", witness)
    return _ok(name, scenario, {"points": count, "sheets": "both"})


def _check_n2_flat_vanishing(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "integrability/n2-flat-structure1-vanishes"
    if scenario.n != 2:
        return _fail(name, scenario, "scenario has n != 2", None)
    if scenario.conn.entries:
        return _fail(name, scenario, "connection is not flat", None)
    rng = random.Random(scenario.seed + 10)
    count = scenario.count("fibre_params", 20)
    spec = str(scenario.samples.get("probe_spec", "full"))
    for trial in range(count):
        structure = sample_fibre_structure(2, rng)
        at = TwistorPoint(random_chart_point(4, rng), structure)
        for (i, k), value in _scan_closed_form(1, scenario.conn, at, spec):
            if not value.is_zero():
                return _fail(name, scenario, "nonzero", {"trial": trial, "probe_pair": [i, k]})
    return _ok(name, scenario, {"fibre_samples": count})


def _check_n2_curved_witness(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "integrability/n2-curved-witness"
    if scenario.n != 2 or not scenario.conn.entries:
        return _fail(name, scenario, "scenario needs n = 2 and a curved connection", None)
    rng = random.Random(scenario.seed + 11)
    count = scenario.count("fibre_params", 20)
    horizontals = coordinate_elements(4)
    for trial in range(count):
        structure = sample_fibre_structure(2, rng)
        at = TwistorPoint(random_chart_point(4, rng), structure)
        for i in range(len(horizontals)):
            for k in range(i + 1, len(horizontals)):
                value = nijenhuis_horizontal(1, scenario.conn, at,
                                             horizontals[i], horizontals[k])
                if not value.vertical.is_zero():
                    witness = {"trial": trial, "probe_pair": [i, k],
                               "point": [scalar_to_str(c) for c in at.point.coords]}
                    return _ok(name, scenario, witness, finding=True)
    return _fail(name, scenario, "no witness", {"trials": count})


def _check_mu_kernel(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "integrability/curvature-form-kernel"
    report = mu_forced_zero_check(2)
    if report.kernel_dim != 0:
        return _fail(name, scenario, report.kernel_dim, {"rank": report.rank})
    return _ok(name, scenario, {"rank": report.rank, "unknowns": report.unknowns,
                                "single_structure_kernel": report.single_structure_kernel_dim})


def _check_mixed_witness(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "integrability/mixed-witness"
    rng = random.Random(scenario.seed + 12)
    count = scenario.count("adapted_points", 10)
    for trial in range(count):
        sample = sample_adapted_point(scenario.n, rng)
        v = sample.generators.generator(0, 2) - sample.generators.generator(1, 3)
        q1 = sample.basis.vectors[0]
        q4 = sample.basis.vectors[3]
        got = nijenhuis_mixed(2, sample.at, q1, v)
        if got.horizontal != q4.scale(2) or got.horizontal.is_zero():
            return _fail(name, scenario, "value differs from 2 Q4", {"trial": trial})
        if not nijenhuis_mixed(1, sample.at, q1, v).is_zero():
            return _fail(name, scenario, "alpha=1 value nonzero", {"trial": trial})
    return _ok(name, scenario, {"adapted_points": count}, finding=True)


def _check_hybrid_witness(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "integrability/hybrid-witness"
    rng = random.Random(scenario.seed + 13)
    count = scenario.count("adapted_points", 10)
    for trial in range(count):
        sample = sample_adapted_point(scenario.n, rng)
        v = sample.generators.generator(0, 2) - sample.generators.generator(1, 3)
        q1 = sample.basis.vectors[0]
        q4 = sample.basis.vectors[3]
        for alpha in (1, 2):
            got = hybrid_nijenhuis_horizontal(alpha, scenario.conn, sample.at, q1, v)
            if got != q4 or got.is_zero():
                return _fail(name, scenario, "value differs from Q4",
                             {"trial": trial, "alpha": alpha})
    return _ok(name, scenario, {"adapted_points": count}, finding=True)


# ---------------------------------------------------------------------------
# oracle suite


def _oracle_cached(scenario: Scenario, hooks: dict):
    report = hooks.get("_oracle_cache")
    if report is None:
        samples = seeded_oracle_samples(scenario.count("fibre_params", 10),
                                        scenario.seed + 14)
        report = oracle_compare_nijenhuis(scenario.conn, samples,
                                          perturb=hooks.get("perturb_closed_form"))
        hooks["_oracle_cache"] = report
    return report


def _check_oracle_equality(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "oracle/closed-form-equality"
    if scenario.n != 1:
        return _fail(name, scenario, "oracle needs n = 1", None)
    report = _oracle_cached(scenario, hooks)
    for r in report.results:
        if not r.all_equal:
            witness = {"fibre": [scalar_to_str(c) for c in r.sample.fibre],
                       "sheet": r.sample.sheet, "alpha": r.alpha,
                       "probe_pair": list(r.mismatch) if r.mismatch else None}
            return _fail(name, scenario, "mismatch", witness)
    pairs = sum(r.pairs for r in report.results)
    return _ok(name, scenario, {"samples": len(report.results) // 2, "pairs": pairs})


def _check_oracle_direct_zero(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "oracle/structure1-direct-zero"
    report = _oracle_cached(scenario, hooks)
    for r in report.results:
        if r.alpha == 1 and not r.direct_all_zero:
            return _fail(name, scenario, "nonzero", {"sheet": r.sample.sheet})
        if r.alpha == 2 and r.direct_all_zero:
            return _fail(name, scenario, "alpha=2 unexpectedly zero",
                         {"sheet": r.sample.sheet})
    return _ok(name, scenario)


def _check_oracle_lift_bracket(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "oracle/lift-bracket-identity"
    report = _oracle_cached(scenario, hooks)
    for r in report.results:
        if not r.lift_bracket_ok:
            return _fail(name, scenario, "nonzero residual", {"sheet": r.sample.sheet})
    # the same identity on the endomorphism-bundle chart, sized by n
    rng = random.Random(scenario.seed + 15)
    basis = reference_basis(1)
    structure = hyperboloid_point(Fraction(1, 3), Fraction(1, 5), 1, basis)
    at = TwistorPoint(random_chart_point(2, rng), structure)
    one = Poly.constant(2, 1)
    x1 = Poly.variable(2, 0)
    residual = lift_bracket_curvature_check(scenario.conn, [one, x1],
                                            [x1, one + x1 * x1], at)
    if any(c != 0 for c in residual):
        return _fail(name, scenario, "bundle chart residual", None)
    return _ok(name, scenario)


def _check_oracle_vertical_bracket(scenario: Scenario, hooks: Mapping) -> CheckResult:
    name = "oracle/vertical-bracket-identity"
    report = _oracle_cached(scenario, hooks)
    for r in report.results:
        if not r.vertical_bracket_ok:
            return _fail(name, scenario, "nonzero residual", {"sheet": r.sample.sheet})
    return _ok(name, scenario)


CHECKS: dict[str, Callable[[Scenario, dict], CheckResult]] = {
    "linalg/pairing-examples": _check_pairing_examples,
    "linalg/projection-nondegeneracy": _check_projection,
    "linalg/dim2-orientation": _check_dim2_orientation,
    "linalg/orientation-parity": _check_orientation_parity,
    "linalg/skew-frame-relations": _check_skew_frame_relations,
    "linalg/frame-decomposition-roundtrip": _check_frame_roundtrip,
    "linalg/transform-isometries": _check_transform_isometries,
    "linalg/hyperboloid-chart": _check_hyperboloid_chart,
    "courant/bracket-examples": _check_bracket_examples,
    "courant/nijenhuis-antisymmetry": _check_nijenhuis_antisymmetry,
    "courant/constant-structure-integrable": _check_constant_structure,
    "courant/b-transform-automorphism": _check_b_automorphism,
    "integrability/n1-structure1-vanishes": _check_n1_vanishing,
    "integrability/n2-flat-structure1-vanishes": _check_n2_flat_vanishing,
    "integrability/n2-curved-witness": _check_n2_curved_witness,
    "integrability/curvature-form-kernel": _check_mu_kernel,
    "integrability/mixed-witness": _check_mixed_witness,
    "integrability/hybrid-witness": _check_hybrid_witness,
    "oracle/closed-form-equality": _check_oracle_equality,
    "oracle/structure1-direct-zero": _check_oracle_direct_zero,
    "oracle/lift-bracket-identity": _check_oracle_lift_bracket,
    "oracle/vertical-bracket-identity": _check_oracle_vertical_bracket,
}


# ---------------------------------------------------------------------------
# scenarios, presets, runners


def _gamma_x1_json(n: int) -> dict:
    exps = [0] * (2 * n)
    exps[0] = 1
    return {"1,2,2": [{"exponents": exps, "coeff": "1"}]}


PRESETS: dict[str, dict] = {
    "linalg-all": {
        "n": 1, "connection": {"gamma": {}}, "mode": "exact", "seed": 1201,
        "samples": {"base_points": 100},
        "checks": ["linalg/pairing-examples", "linalg/projection-nondegeneracy",
                   "linalg/dim2-orientation", "linalg/orientation-parity",
                   "linalg/skew-frame-relations", "linalg/frame-decomposition-roundtrip",
                   "linalg/transform-isometries", "linalg/hyperboloid-chart"],
    },
    "examples-courant": {
        "n": 1, "connection": {"gamma": {}}, "mode": "exact", "seed": 1202,
        "samples": {},
        "checks": ["courant/bracket-examples", "courant/nijenhuis-antisymmetry",
                   "courant/constant-structure-integrable",
                   "courant/b-transform-automorphism"],
    },
    "thm1-n1": {
        "n": 1, "connection": {"gamma": _gamma_x1_json(1)}, "mode": "exact", "seed": 1203,
        "samples": {"base_points": 50, "adapted_points": 10},
        "checks": ["integrability/n1-structure1-vanishes", "integrability/mixed-witness",
                   "integrability/hybrid-witness"],
    },
    "thm1-n2-flat": {
        "n": 2, "connection": {"gamma": {}}, "mode": "exact", "seed": 1204,
        "samples": {"fibre_params": 20, "adapted_points": 5},
        "checks": ["integrability/n2-flat-structure1-vanishes", "integrability/mixed-witness"],
    },
    "thm1-n2-curved": {
        "n": 2, "connection": {"gamma": _gamma_x1_json(2)}, "mode": "exact", "seed": 1205,
        "samples": {"fibre_params": 20, "adapted_points": 5},
        "checks": ["integrability/n2-curved-witness", "integrability/curvature-form-kernel",
                   "integrability/mixed-witness"],
    },
    "oracle-n1": {
        "n": 1, "connection": {"gamma": _gamma_x1_json(1)}, "mode": "exact", "seed": 1206,
        "samples": {"fibre_params": 10},
        "checks": ["oracle/closed-form-equality", "oracle/structure1-direct-zero",
                   "oracle/lift-bracket-identity", "oracle/vertical-bracket-identity"],
    },
}


def load_scenario(source: str | Mapping, name: str | None = None,
                  mode: str | None = None, seed: int | None = None) -> Scenario:
    """Build a scenario from a preset name, a JSON file path, or a mapping."""
    if isinstance(source, str):
        if source in PRESETS:
            data = PRESETS[source]
            name = name or source
        else:
            try:
                with open(source, "r", encoding="utf-8") as fh:
                    data = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ScenarioError(f"cannot load scenario {source!r}: {exc}") from exc
            name = name or source
    else:
        data = dict(source)
        name = name or data.get("name", "scenario")
    try:
        n = int(data["n"])
        gamma = data.get("connection", {}).get("gamma", {})
        conn = connection_from_json(n, gamma) if gamma else flat_connection(n)
        effective_mode = mode or data.get("mode", "exact")
        effective_seed = seed if seed is not None else int(data.get("seed", 0))
        samples = dict(data.get("samples", {}))
        checks = tuple(data.get("checks", ()))
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"malformed scenario: {exc}") from exc
    if effective_mode not in ("exact", "float"):
        raise ScenarioError(f"unknown mode {effective_mode!r}")
    unknown = [c for c in checks if c not in CHECKS]
    if unknown:
        raise ScenarioError(f"unknown checks: {unknown}")
    if not checks:
        pass  # an empty suite is allowed and yields an empty report
    return Scenario(name, n, conn, effective_mode, effective_seed, samples, checks)


def run_scenario(scenario: Scenario, hooks: Mapping | None = None) -> Report:
    """Run every scheduled check once, in order, returning the report."""
    hook_state = dict(hooks or {})
    results = []
    timings = []
    for check_name in scenario.checks:
        started = time.perf_counter()
        results.append(CHECKS[check_name](scenario, hook_state))
        timings.append((check_name, time.perf_counter() - started))
    return Report(scenario.name, scenario.seed, scenario.mode,
                  tuple(results), tuple(timings))


def run_linalg_suite(seed: int, tamper=None) -> Report:
    """All linear-algebra identity checks at the given seed."""
    scenario = load_scenario("linalg-all", seed=seed)
    return run_scenario(scenario, {"tamper_frames": tamper} if tamper else None)


def run_courant_examples(seed: int) -> Report:
    scenario = load_scenario("examples-courant", seed=seed)
    return run_scenario(scenario)


def run_integrability_suite(scenario: Scenario) -> Report:
    """The integrability verdict checks scheduled by the scenario."""
    return run_scenario(scenario)


def run_oracle(scenario: Scenario, perturb=None) -> Report:
    """The direct-versus-closed-form comparison suite."""
    return run_scenario(scenario, {"perturb_closed_form": perturb} if perturb else None)


def emit_report(report: Report, fmt: str = "json", path: str | None = None) -> str:
    """Render a report; JSON is canonical (sorted keys) and timing-free."""
    if fmt == "json":
        text = json.dumps(report.to_json_dict(), sort_keys=True, indent=2) + "\n"
    elif fmt == "text":
        lines = [f"scenario {report.scenario}  seed {report.seed}  mode {report.mode}"]
        timing = dict(report.timings)
        for r in report.results:
            mark = {"pass": "PASS", "finding": "FIND", "fail": "FAIL"}[r.status]
            extra = f"  residual {r.residual}" if r.residual is not None else ""
            lines.append(f"[{mark}] {r.name}{extra}  ({timing.get(r.name, 0.0):.2f}s)")
            if r.witness:
                lines.append(f"       witness: {json.dumps(r.witness, sort_keys=True)}")
        good = sum(1 for r in report.results if r.ok)
        lines.append(f"{good}/{len(report.results)} checks satisfied; "
                     + ("OK" if report.ok else "FAILED"))
        text = "\n".join(lines) + "\n"
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
