"""Automorphism group, fixed lines, orbits, and the exact concurrency
certificates for tangents and hyperosculating conics along grid lines."""

import random

import pytest

from fermatosc.arrangements import build
from fermatosc.errors import CertificationFailure, FewerPoints, NoFixedLine
from fermatosc.fermat import (FermatCurve, inflection_points,
                              sextactic_points, tangent_line)
from fermatosc.hompoly import BinaryForm, HomPoly, ProjPoint, disc2, \
    restrict_to_line
from fermatosc.symmetry import (Automorphism, conic_common_points, fixed_line,
                                generator_panel, group_elements, identity,
                                orbit, pencil_degenerate, phi, psi, rho,
                                tangent_concurrency,
                                verify_invariant_intersection, y_scaling,
                                z_scaling)
from fermatosc.tower import tower_field


@pytest.mark.parametrize("d", (3, 4, 5))
def test_group_order_and_invariance(d):
    C = FermatCurve(d)
    G = group_elements(d)
    assert len(G) == 6 * d * d
    rng = random.Random(d)
    for g in rng.sample(G, 8):
        assert g.pullback(C.poly).proportional(C.poly)


def test_group_closure_and_inverse():
    d = 4
    G = group_elements(d)
    Gset = set(G)
    rng = random.Random(5)
    for _ in range(30):
        a, b = rng.choice(G), rng.choice(G)
        assert a.compose(b) in Gset
        assert a.inverse() in Gset
        assert a.compose(a.inverse()).is_identity()


def test_fixed_line_examples():
    fld = tower_field(4)
    x, y, z = HomPoly.variables(fld)
    assert fixed_line(rho(fld)) == x
    assert fixed_line(phi(fld)) == (x - y).canonical_line()
    assert fixed_line(psi(fld)) == (x - z).canonical_line()
    assert fixed_line(y_scaling(fld)) == y
    assert fixed_line(z_scaling(fld)) == z
    assert fixed_line(rho(fld).compose(phi(fld))) is None
    assert fixed_line(identity(fld)) is None


def test_fixed_line_transposition_condition():
    fld = tower_field(4)
    # swap x, y composed with a scaling that breaks the eigenvalue match
    g = Automorphism(fld, ((0, fld.zeta, 0), (1, 0, 0), (0, 0, 1)))
    assert fixed_line(g) is None
    # and one that preserves it: entries b, c with bc = 1
    g = Automorphism(fld, ((0, fld.zeta, 0), (fld.zeta_pow(-1), 0, 0),
                           (0, 0, 1)))
    L = fixed_line(g)
    assert L is not None
    p = ProjPoint(fld, [fld.one, fld.zeta_pow(1), fld.from_rational(2)])
    # points of L are fixed: check with two explicit points on L
    from fermatosc.hompoly import line_parametrization
    v1, v2 = line_parametrization(L)
    for vec in (v1, v2):
        q = ProjPoint(fld, vec)
        assert g.apply_point(q) == q


def test_orbits():
    d = 5
    C = FermatCurve(d)
    fld = C.field
    s = sextactic_points(C)[2]
    orb = orbit(s.point, rho(fld))
    assert len(orb) == d
    p = ProjPoint(fld, [fld.u_pow(1), fld.one, fld.zero])
    assert len(orbit(p, rho(fld))) == d
    fixed = ProjPoint(fld, [fld.zero, fld.one, fld.from_rational(3)])
    assert orbit(fixed, rho(fld)) == [fixed]


def test_invariant_intersection_tangent_example():
    d = 4
    C = FermatCurve(d)
    fld = C.field
    k = 3
    px = ProjPoint(fld, [fld.zero, fld.u_pow(k), fld.one])
    py = ProjPoint(fld, [fld.u_pow(k), fld.zero, fld.one])
    g = phi(fld)
    assert orbit(px, g) in ([px, py], [py, px])
    assert verify_invariant_intersection(C, g, px, 1)
    meet = ProjPoint(fld, [fld.one, fld.one, fld.u_pow(-k)])
    for p in (px, py):
        assert tangent_line(C, p).evaluate(meet).is_zero()


def test_invariant_intersection_conics_and_orbit_of_one():
    d = 4
    C = FermatCurve(d)
    fld = C.field
    s = sextactic_points(C)[1]
    g = z_scaling(fld)
    assert verify_invariant_intersection(C, g, s.point, 2)
    # a sextactic point fixed by an automorphism: orbit of size one
    fixed_pt = ProjPoint(fld, [fld.zero, fld.one, fld.monomial(-1, 1)])
    if C.poly.evaluate(fixed_pt).is_zero():
        assert verify_invariant_intersection(C, rho(fld), fixed_pt, 1)


def test_invariant_intersection_requires_fixed_line():
    d = 4
    C = FermatCurve(d)
    fld = C.field
    g = rho(fld).compose(phi(fld))
    s = sextactic_points(C)[0]
    with pytest.raises(NoFixedLine):
        verify_invariant_intersection(C, g, s.point, 1)


@pytest.mark.parametrize("d", (3, 4, 5))
def test_invariant_suite_generators(d):
    C = FermatCurve(d)
    rng = random.Random(d)
    pts = rng.sample(sextactic_points(C), 4)
    for name, g in generator_panel(C.field):
        for s in pts:
            assert verify_invariant_intersection(C, g, s.point, 1), name
            assert verify_invariant_intersection(C, g, s.point, 2), name


def test_tangent_concurrency_b_line():
    d = 5
    C = FermatCurve(d)
    fld = C.field
    x, y, z = HomPoly.variables(fld)
    rep = tangent_concurrency(C, y - z)
    assert rep.count == 1
    assert rep.common_points[0] == ProjPoint(fld, [fld.zero, -fld.one, fld.one])
    assert rep.certificates["point_on_fixed_line"]
    assert rep.fixed_line == x


@pytest.mark.parametrize("d", (3, 4, 5, 6))
def test_tangent_concurrency_m_lines(d):
    # common point of the tangents along z - u^(-k) t y is
    # (0 : u^k 2^((d-1)/d) : 1); the tangent formula forces the plus sign
    C = FermatCurve(d)
    fld = C.field
    for idx, L in enumerate(build("Mx", d).lines):
        k = 2 * idx + 1
        rep = tangent_concurrency(C, L)
        expected = ProjPoint(fld, [fld.zero, fld.u_pow(k) * fld.t**(d - 1),
                                   fld.one])
        assert rep.common_points[0] == expected
        mirrored = ProjPoint(fld, [fld.zero, -fld.u_pow(k) * fld.t**(d - 1),
                                   fld.one])
        assert rep.common_points[0] != mirrored


def test_tangent_concurrency_bz_lines():
    d = 4
    C = FermatCurve(d)
    fld = C.field
    for j, L in enumerate(build("Bz", d).lines):
        rep = tangent_concurrency(C, L)
        expected = ProjPoint(fld, [fld.zeta_pow(j), -fld.one, fld.zero])
        assert rep.common_points[0] == expected


def test_tangent_concurrency_rejects_non_grid_line():
    d = 4
    C = FermatCurve(d)
    fld = C.field
    x, y, z = HomPoly.variables(fld)
    with pytest.raises(FewerPoints):
        tangent_concurrency(C, x + y + z)


def test_b_line_common_point_on_curve_iff_odd():
    for d in (3, 4, 5, 6):
        C = FermatCurve(d)
        fld = C.field
        p = ProjPoint(fld, [fld.zero, -fld.one, fld.one])
        on_curve = C.poly.evaluate(p).is_zero()
        assert on_curve == (d % 2 == 1)
        if on_curve:
            assert p in set(inflection_points(C))


@pytest.mark.parametrize("d", (4, 5, 6))
def test_conic_common_points_two(d):
    C = FermatCurve(d)
    for token in ("Bz", "Mx", "Ny"):
        L = build(token, d).lines[1]
        rep = conic_common_points(C, L)
        assert rep.count == 2, token
        assert rep.certificates["restrictions_pairwise_proportional"]
        assert not rep.certificates["disc2_is_zero"]
        excl = rep.certificates["off_line_exclusion"]
        assert excl.get("candidate_on_fixed_line") or "witness_value" in excl


def test_conic_common_points_d3_b_line():
    C = FermatCurve(3)
    fld = C.field
    for j, L in enumerate(build("Bz", 3).lines):
        rep = conic_common_points(C, L)
        assert rep.count == 1
        expected = ProjPoint(fld, [fld.one, fld.zeta_pow(-j), fld.zero])
        assert rep.common_points[0] == expected
    for L in build("Mx", 3).lines[:2]:
        rep = conic_common_points(C, L)
        assert rep.count == 2


def test_conic_restriction_discriminants():
    # restriction of the explicit conic to the fixed line, against the
    # closed-form discriminants 48(2d-1)(d-3)(d-1)^2 and 48d(2d-1)(d-1)^2
    for d in (3, 4, 5, 6):
        C = FermatCurve(d)
        fld = C.field
        repB = conic_common_points(C, build("Bz", d).lines[0])   # j = 0
        discB = disc2(restrict_to_line(
            _conic_at(C, "z", 0, 1), repB.fixed_line))
        assert discB == fld.from_rational(48 * (2 * d - 1) * (d - 3)
                                          * (d - 1)**2)
        repM = conic_common_points(C, build("Mx", d).lines[0])   # k = 1
        discM = disc2(restrict_to_line(
            _conic_at(C, "z", 0, 1), repM.fixed_line))
        expected = fld.from_rational(48 * d * (2 * d - 1) * (d - 1)**2) \
            * (fld.u_pow(1) * fld.t_inv)**2
        assert discM == expected


def _conic_at(C, cluster, j, k):
    from fermatosc.fermat import hyperosculating_conic
    s = [t for t in sextactic_points(C)
         if t.cluster == cluster and t.j == j and t.k == k][0]
    return hyperosculating_conic(C, s)


def test_pencil_degenerate():
    d = 4
    C = FermatCurve(d)
    fld = C.field
    ell, cert = pencil_degenerate(C, 0, 1, 3)
    assert cert["member_in_pencil"]
    assert cert["residual_points_distinct"]
    expected_z = -(fld.t_inv * ((d + 1) * (2 * d - 3))
                   * (fld.u_pow(1) + fld.u_pow(3)))
    assert ell.coeff((0, 0, 1)) == expected_z
    with pytest.raises(ValueError):
        pencil_degenerate(C, 0, 1, 1)
    with pytest.raises(ValueError):
        pencil_degenerate(C, 0, 2, 4)


@pytest.mark.parametrize("d", (3, 5))
def test_pencil_degenerate_all_pairs_sample(d):
    C = FermatCurve(d)
    ks = [2 * i + 1 for i in range(d)]
    for k2 in ks[1:]:
        ell, cert = pencil_degenerate(C, 1, ks[0], k2)
        assert cert["member_in_pencil"] and cert["residual_points_distinct"]


def test_concurrency_point_on_fixed_line_all_grids():
    d = 4
    C = FermatCurve(d)
    for token in ("Bz", "Bx", "By", "Mx", "My", "Mz", "Nx", "Ny", "Nz"):
        for L in build(token, d).lines[:2]:
            rep = tangent_concurrency(C, L)
            assert rep.count == 1
            assert rep.certificates["point_on_fixed_line"], token
