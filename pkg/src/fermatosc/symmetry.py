"""Automorphisms of the Fermat curve and exact concurrency certificates.

The monomial automorphism group of order 6d^2 is generated by coordinate
permutations and the scalings rho(x:y:z) = (zeta x : y : z).  Some elements
fix a line pointwise (a two-dimensional eigenspace); osculating curves at
points of one orbit then meet that line in the same points, which pins the
common intersections of tangent lines and hyperosculating conics along the
grid lines.

All certificates are statements about K_d coefficients: proportionality of
restricted binary forms, exact zero tests of discriminants, and evaluation
at explicitly constructed candidate points.  The two common points of a
conic family have coordinates outside K_d, so they are certified through
the restriction rather than solved for.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

from .errors import (CertificationFailure, FewerPoints, NoFixedLine)
from .fermat import (FermatCurve, SextacticPoint, hyperosculating_conic,
                     osculating_conic_closed, sextactic_points, tangent_line)
from .hompoly import (BinaryForm, HomPoly, ProjPoint, disc2,
                      line_parametrization, restrict_to_line)
from .tower import FieldElement, TowerField


def _entry_nonzero(v) -> bool:
    if isinstance(v, FieldElement):
        return not v.is_zero()
    return bool(v)


class Automorphism:
    """A monomial projective transformation, normalized so the nonzero
    entry of the last row is one."""

    __slots__ = ("field", "mat", "perm", "_hash")

    def __init__(self, field: TowerField, mat):
        rows = []
        perm = []
        for i in range(3):
            nz = [j for j in range(3) if _entry_nonzero(mat[i][j])]
            if len(nz) != 1:
                raise ValueError("matrix is not monomial")
            perm.append(nz[0])
        if sorted(perm) != [0, 1, 2]:
            raise ValueError("matrix is not monomial")
        unit = mat[2][perm[2]]
        if not isinstance(unit, FieldElement):
            unit = field.from_rational(unit)
        scale = field.invert(unit)
        for i in range(3):
            row = []
            for j in range(3):
                v = mat[i][j]
                if not isinstance(v, FieldElement):
                    v = field.from_rational(v)
                row.append(v * scale)
            rows.append(tuple(row))
        self.field = field
        self.mat = tuple(rows)
        self.perm = tuple(perm)
        self._hash = None

    # -- group structure -----------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, Automorphism) and self.field is other.field
                and self.mat == other.mat)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field.d,)
                              + tuple(c.coeffs for row in self.mat for c in row))
        return self._hash

    def compose(self, other: "Automorphism") -> "Automorphism":
        """Matrix product: (self . other)(p) = self(other(p))."""
        a, b = self.mat, other.mat
        prod = [[sum((a[i][k] * b[k][j] for k in range(3)), self.field.zero)
                 for j in range(3)] for i in range(3)]
        return Automorphism(self.field, prod)

    def inverse(self) -> "Automorphism":
        inv = [[self.field.zero] * 3 for _ in range(3)]
        for i in range(3):
            j = self.perm[i]
            inv[j][i] = self.field.invert(self.mat[i][j])
        return Automorphism(self.field, inv)

    def power(self, e: int) -> "Automorphism":
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        out = identity(self.field)
        while e:
            if e & 1:
                out = out.compose(base)
            base = base.compose(base)
            e >>= 1
        return out

    # -- actions ---------------------------------------------------------------

    def apply_point(self, p: ProjPoint) -> ProjPoint:
        coords = [sum((self.mat[i][j] * p.coords[j] for j in range(3)),
                      self.field.zero) for i in range(3)]
        return ProjPoint(self.field, coords)

    def pullback(self, f: HomPoly) -> HomPoly:
        """f composed with this map; vanishes on the preimage of V(f)."""
        return f.compose_matrix(self.mat)

    def pushforward(self, f: HomPoly) -> HomPoly:
        """Defining polynomial of the image of V(f)."""
        return f.compose_matrix(self.inverse().mat)

    def is_identity(self) -> bool:
        return self == identity(self.field)

    def to_json(self):
        return [[c.to_json_dict() for c in row] for row in self.mat]

    def __repr__(self):
        return f"Automorphism(perm={self.perm})"


def identity(field: TowerField) -> Automorphism:
    return Automorphism(field, ((1, 0, 0), (0, 1, 0), (0, 0, 1)))


def rho(field: TowerField) -> Automorphism:
    """(x : y : z) -> (zeta x : y : z); fixes V(x) pointwise."""
    return Automorphism(field, ((field.zeta, 0, 0), (0, 1, 0), (0, 0, 1)))


def phi(field: TowerField) -> Automorphism:
    """Swap x and y; fixes V(x - y) pointwise."""
    return Automorphism(field, ((0, 1, 0), (1, 0, 0), (0, 0, 1)))


def psi(field: TowerField) -> Automorphism:
    """Swap x and z; fixes V(x - z) pointwise."""
    return Automorphism(field, ((0, 0, 1), (0, 1, 0), (1, 0, 0)))


def y_scaling(field: TowerField) -> Automorphism:
    """phi . rho . phi: (x : y : z) -> (x : zeta y : z)."""
    return Automorphism(field, ((1, 0, 0), (0, field.zeta, 0), (0, 0, 1)))


def z_scaling(field: TowerField) -> Automorphism:
    """psi . rho . psi: (x : y : z) -> (x : y : zeta z)."""
    return Automorphism(field, ((1, 0, 0), (0, 1, 0), (0, 0, field.zeta)))


def generator_panel(field: TowerField):
    """The generator automorphisms with pointwise-fixed lines, plus the two
    conjugate scalings used for the other coordinate lines."""
    return (("rho", rho(field)), ("phi", phi(field)), ("psi", psi(field)),
            ("phi.rho.phi", y_scaling(field)),
            ("psi.rho.psi", z_scaling(field)))


def group_elements(d_or_curve) -> list:
    """All 6d^2 monomial automorphisms {permutation . diag(zeta^a, zeta^b, 1)}."""
    if isinstance(d_or_curve, FermatCurve):
        field = d_or_curve.field
        d = d_or_curve.d
    else:
        from .tower import tower_field
        d = d_or_curve
        field = tower_field(d)
    perms = ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))
    out = []
    seen = set()
    for pr in perms:
        for a in range(d):
            for b in range(d):
                diag = (field.zeta_pow(a), field.zeta_pow(b), field.one)
                mat = [[field.zero] * 3 for _ in range(3)]
                for i in range(3):
                    mat[i][pr[i]] = diag[pr[i]]
                g = Automorphism(field, mat)
                if g not in seen:
                    seen.add(g)
                    out.append(g)
    return out


def fixed_line(g: Automorphism) -> Optional[HomPoly]:
    """The line fixed pointwise by g (a 2-dimensional eigenspace), if any.

    The identity fixes every line and returns None, since no single line is
    distinguished.
    """
    field = g.field
    perm = g.perm
    if perm == (0, 1, 2):
        a = [g.mat[i][i] for i in range(3)]
        pairs = [(0, 1, 2), (0, 2, 1), (1, 2, 0)]
        for i, j, k in pairs:
            if (a[i] - a[j]).is_zero() and not (a[i] - a[k]).is_zero():
                exps = [0, 0, 0]
                exps[k] = 1
                return HomPoly.monomial(field, tuple(exps), 1)
        return None
    fixed = [i for i in range(3) if perm[i] == i]
    if len(fixed) == 1:
        k = fixed[0]
        i, j = [v for v in range(3) if v != k]
        b = g.mat[i][j]
        c = g.mat[j][i]
        e = g.mat[k][k]
        if (e * e - b * c).is_zero():
            # eigenspace span{e_k, v} with v_i = b, v_j = e; its annihilator
            # is the pointwise-fixed line e*x_i - b*x_j
            coefs = [field.zero] * 3
            coefs[i] = e
            coefs[j] = -b
            return HomPoly.line(field, *coefs).canonical_line()
        return None
    return None   # 3-cycles have three simple eigenvalues


def orbit(p: ProjPoint, g: Automorphism) -> list:
    out = [p]
    q = g.apply_point(p)
    guard = 0
    while q != p:
        out.append(q)
        q = g.apply_point(q)
        guard += 1
        if guard > 6 * g.field.d ** 2:
            raise RuntimeError("orbit iteration did not close")
    return out


# -- invariant intersections -------------------------------------------------


def verify_invariant_intersection(curve: FermatCurve, g: Automorphism,
                                  p: ProjPoint, n: int) -> bool:
    """Whether the degree-n osculating curves along the orbit of p cut the
    fixed line of g in one shared point set (with multiplicities)."""
    L = fixed_line(g)
    if L is None:
        raise NoFixedLine("automorphism has no pointwise-fixed line")
    if n not in (1, 2):
        raise ValueError("osculating degree must be 1 or 2")
    restrictions = []
    for q in orbit(p, g):
        if n == 1:
            gamma = tangent_line(curve, q)
        else:
            gamma = osculating_conic_closed(curve, q)
        restrictions.append(restrict_to_line(gamma, L))
    first = restrictions[0]
    if first.is_zero():
        return all(r.is_zero() for r in restrictions)
    return all(first.proportional(r) for r in restrictions[1:])


# -- concurrency reports --------------------------------------------------------


@dataclass
class ConcurrencyReport:
    kind: str                      # "tangent" or "conic"
    line: HomPoly
    points: list                   # the d sextactic points on the line
    fixed_line: Optional[HomPoly]
    count: int                     # certified number of common points
    common_points: list            # exact coordinates when they live in K_d
    certificates: dict = dc_field(default_factory=dict)

    def to_json_dict(self, precision_bits: int = 64):
        return {
            "kind": self.kind,
            "line": self.line.to_json_dict(),
            "points": [{"cluster": s.cluster, "j": s.j, "k": s.k,
                        "coords": s.point.to_json()} for s in self.points],
            "fixed_line": (self.fixed_line.to_json_dict()
                           if self.fixed_line is not None else None),
            "count": self.count,
            "common_points": [q.to_json() for q in self.common_points],
            "certificates": self.certificates,
        }


def points_on_line(curve: FermatCurve, line: HomPoly):
    return [s for s in sextactic_points(curve)
            if line.evaluate(s.point).is_zero()]


def orbit_automorphism_for_line(curve: FermatCurve, pts):
    """The coordinate scaling whose orbit sweeps the d points on a grid line."""
    field = curve.field
    point_set = {s.point for s in pts}
    for g in (rho(field), y_scaling(field), z_scaling(field)):
        orb = orbit(pts[0].point, g)
        if len(orb) == len(point_set) and set(orb) == point_set:
            return g
    raise CertificationFailure("no scaling automorphism sweeps the points")


def tangent_concurrency(curve: FermatCurve, grid_line: HomPoly) -> ConcurrencyReport:
    """Certify that the d tangents at the d sextactic points of a grid line
    meet in exactly one point, a d-fold point of their union."""
    d = curve.d
    pts = points_on_line(curve, grid_line)
    if len(pts) != d:
        raise FewerPoints(f"{len(pts)} sextactic points on the line, need {d}")
    tangents = [tangent_line(curve, s.point) for s in pts]
    for i in range(d):
        for j in range(i + 1, d):
            if tangents[i].proportional(tangents[j]):
                raise CertificationFailure("coincident tangents in the family")
    q = _crossing(tangents[0], tangents[1])
    vals = [t.evaluate(q) for t in tangents]
    if not all(v.is_zero() for v in vals):
        raise CertificationFailure("tangents are not concurrent",
                                   witness=[v.to_json_dict() for v in vals])
    g = orbit_automorphism_for_line(curve, pts)
    L = fixed_line(g)
    cert = {
        "tangents_pairwise_distinct": True,
        "all_tangents_vanish_at_point": True,
        "point_on_fixed_line": L.evaluate(q).is_zero(),
    }
    return ConcurrencyReport("tangent", grid_line, pts, L, 1, [q], cert)


def _crossing(L1: HomPoly, L2: HomPoly) -> ProjPoint:
    field = L1.field
    a1, b1, c1 = (L1.coeff(e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    a2, b2, c2 = (L2.coeff(e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    return ProjPoint(field, (b1 * c2 - c1 * b2, c1 * a2 - a1 * c2,
                             a1 * b2 - b1 * a2))


def _coordinate_index(L: HomPoly) -> Optional[int]:
    exps = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    nz = [i for i, e in enumerate(exps) if not L.coeff(e).is_zero()]
    return nz[0] if len(nz) == 1 else None


def _divide_coordinate(f: HomPoly, var: int) -> HomPoly:
    out = {}
    for e, c in f.terms.items():
        if e[var] == 0:
            raise ValueError("polynomial not divisible by the coordinate")
        ne = list(e)
        ne[var] -= 1
        out[tuple(ne)] = c
    return HomPoly(f.field, f.deg - 1, out)


def conic_common_points(curve: FermatCurve, grid_line: HomPoly) -> ConcurrencyReport:
    """Certify the exact number of common points of the d hyperosculating
    conics along a grid line: two when the restricted discriminant is
    nonzero, one (with the fixed line tangent to every conic) when it is
    zero.  Off-line candidates are excluded through degenerate pencil
    members divided by the fixed-line coordinate.
    """
    d = curve.d
    field = curve.field
    pts = points_on_line(curve, grid_line)
    if len(pts) != d:
        raise FewerPoints(f"{len(pts)} sextactic points on the line, need {d}")
    conics = [hyperosculating_conic(curve, s) for s in pts]
    g = orbit_automorphism_for_line(curve, pts)
    L = fixed_line(g)
    var = _coordinate_index(L)
    if var is None:
        raise CertificationFailure("fixed line is not a coordinate line")

    restrictions = [restrict_to_line(c, L) for c in conics]
    base = restrictions[0]
    if base.is_zero():
        raise CertificationFailure("conic contains the fixed line")
    if not all(base.proportional(r) for r in restrictions[1:]):
        raise CertificationFailure("restrictions to the fixed line disagree")
    disc = disc2(base)
    on_line = 1 if disc.is_zero() else 2

    common = []
    if on_line == 1:
        # double root of the restricted quadratic: (s0 : t0) = (-b : 2a),
        # or (1 : 0) when the quadratic degenerates to a multiple of t^2
        a, b = base.coeffs[2], base.coeffs[1]
        v1, v2 = line_parametrization(L)
        if a.is_zero():
            s0, t0 = field.one, field.zero
        else:
            s0, t0 = -b, 2 * a
        coords = [s0 * v1[i] + t0 * v2[i] for i in range(3)]
        common.append(ProjPoint(field, coords))

    excl = _exclude_off_line(conics, var, field)

    cert = {
        "restrictions_pairwise_proportional": True,
        "restriction_disc2": disc.to_json_dict(),
        "disc2_is_zero": disc.is_zero(),
        "off_line_exclusion": excl,
    }
    return ConcurrencyReport("conic", grid_line, pts, L, on_line, common, cert)


def _exclude_off_line(conics, var: int, field) -> dict:
    """Certify that no point off the coordinate line x_var = 0 lies on all
    conics, via the pencil members divisible by that coordinate."""
    n = len(conics)
    pairs = [(0, i) for i in range(1, n)] + [(1, i) for i in range(2, n)]
    chosen = None
    cofactors = []
    for (i, j) in pairs:
        ell = _pencil_cofactor(conics[i], conics[j], var, field)
        if ell is None or ell.is_zero():
            continue
        for prev in cofactors:
            if not prev.proportional(ell):
                chosen = (prev, ell)
                break
        if chosen:
            break
        cofactors.append(ell)
    if chosen is None:
        raise CertificationFailure(
            "could not find two independent pencil cofactors")
    q = _crossing(chosen[0], chosen[1])
    if q.coords[var].is_zero():
        return {"candidate_on_fixed_line": True}
    values = [c.evaluate(q) for c in conics]
    nonzero = [i for i, v in enumerate(values) if not v.is_zero()]
    if not nonzero:
        raise CertificationFailure(
            "family shares an extra point off the fixed line",
            witness=q.to_json())
    return {"candidate_on_fixed_line": False,
            "candidate": q.to_json(),
            "witness_conic_index": nonzero[0],
            "witness_value": values[nonzero[0]].to_json_dict()}


def _pencil_cofactor(c1: HomPoly, c2: HomPoly, var: int, field):
    """The linear cofactor ell with x_var * ell in the pencil of c1, c2."""
    span_exps = [e for e in c1.terms if e[var] == 0]
    span_exps += [e for e in c2.terms if e[var] == 0 and e not in span_exps]
    lam = mu = None
    for e in span_exps:
        a, b = c1.coeff(e), c2.coeff(e)
        if not a.is_zero() or not b.is_zero():
            lam, mu = b, -a
            break
    if lam is None:
        lam, mu = field.one, field.zero
    combo = c1.scale(lam) + c2.scale(mu)
    if combo.is_zero():
        return None
    for e, c in combo.terms.items():
        if e[var] == 0:
            # pencil member is not divisible by the coordinate: restrictions
            # of the two conics were not proportional after scaling
            raise CertificationFailure(
                "pencil member not divisible by the fixed-line coordinate")
    return _divide_coordinate(combo, var)


def pencil_degenerate(curve: FermatCurve, j: int, k1: int, k2: int):
    """The degenerate member z * ell of the pencil of O_{j,k1}, O_{j,k2}.

    Builds ell = 2d(d-2)(zeta^-j x + y) - 2^(-1/d)(d+1)(2d-3)(u^k1 + u^k2) z,
    certifies that z * ell lies in the span of the two conics (all 3x3
    minors of the stacked coefficient matrix vanish) and that the two
    residual intersection points on V(ell) are distinct.
    """
    if k1 == k2:
        raise ValueError("need two distinct k values")
    if k1 % 2 == 0 or k2 % 2 == 0:
        raise ValueError("k indices must be odd")
    d = curve.d
    field = curve.field
    pts = {s.k: s for s in sextactic_points(curve)
           if s.cluster == "z" and s.j == j % d}
    o1 = hyperosculating_conic(curve, pts[k1 % (2 * d)])
    o2 = hyperosculating_conic(curve, pts[k2 % (2 * d)])

    tinv = field.t_inv
    zcoef = -(tinv * ((d + 1) * (2 * d - 3))
              * (field.u_pow(k1) + field.u_pow(k2)))
    ell = HomPoly.line(field,
                       field.zeta_pow(-j) * (2 * d * (d - 2)),
                       field.from_rational(2 * d * (d - 2)),
                       zcoef)
    member = HomPoly.monomial(field, (0, 0, 1), 1) * ell

    monos = [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]
    rows = [[c.coeff(e) for e in monos] for c in (o1, o2, member)]
    minors_zero = True
    witness = None
    for a in range(6):
        for b in range(a + 1, 6):
            for c in range(b + 1, 6):
                det = _det3_elems(rows, (a, b, c), field)
                if not det.is_zero():
                    minors_zero = False
                    witness = (a, b, c, det)
                    break
            if not minors_zero:
                break
        if not minors_zero:
            break
    if not minors_zero:
        raise CertificationFailure(
            "z * ell is not in the pencil of the two conics",
            witness={"minor": witness[:3],
                     "value": witness[3].to_json_dict()})

    residual = restrict_to_line(o1, ell)
    rdisc = disc2(residual)
    certificate = {
        "member_in_pencil": True,
        "residual_disc2": rdisc.to_json_dict(),
        "residual_points_distinct": not rdisc.is_zero(),
    }
    return ell, certificate


def _det3_elems(rows, cols, field):
    a, b, c = cols
    m = [[rows[i][k] for k in (a, b, c)] for i in range(3)]
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
