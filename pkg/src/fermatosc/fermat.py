"""Fermat-curve geometry: special points and osculating conics.

The curve is x^d + y^d + z^d over K_d.  Inflection points carry maximal
tangents; sextactic points are cut out by the core of the 2-Hessian and are
organized in three clusters of d^2 points:

    cluster z: (zeta^j : 1 : u^(-k) t)
    cluster y: (1 : u^(-k) t : zeta^j)
    cluster x: (u^(-k) t : zeta^j : 1)

for j mod d and k odd in (0, 2d), with zeta = u^2 and t = 2^(1/d).

Osculating conics come from two independent pipelines: the evaluated
covariant combination 9H^3(p) D2F_p - (6H^2(p) DH_p + W(p) DF_p) DF_p with
W = -3*Omega*H + 4*Psi, and a six-term closed form in the coordinates of p.
At a sextactic point the conic specializes to the hyperosculating conic
O_{j,k} whose coefficients are explicit monomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import HessianVanishes, NotOnCurve
from .hompoly import HomPoly, ProjPoint, hessian
from .tower import FieldElement, TowerField, tower_field

CLUSTERS = ("z", "y", "x")


class FermatCurve:
    """The plane curve x^d + y^d + z^d = 0 over K_d."""

    def __init__(self, d: int):
        self.d = d
        self.field = tower_field(d)
        x, y, z = HomPoly.variables(self.field)
        self.poly = x**d + y**d + z**d

    @property
    def genus(self) -> int:
        return (self.d - 1) * (self.d - 2) // 2

    def contains(self, p: ProjPoint) -> bool:
        return self.poly.evaluate(p).is_zero()

    def gradient_at(self, p: ProjPoint):
        return tuple(self.poly.partial(i).evaluate(p) for i in range(3))

    def is_smooth_at(self, p: ProjPoint) -> bool:
        return not all(g.is_zero() for g in self.gradient_at(p))

    def __repr__(self):
        return f"FermatCurve(d={self.d})"


@dataclass(frozen=True)
class SextacticPoint:
    """A sextactic point with its cluster label and grid indices."""

    cluster: str            # which coordinate closes the cluster: z, y or x
    j: int                  # index mod d
    k: int                  # odd index in (0, 2d)
    point: ProjPoint
    raw_coords: tuple       # monomial coordinates before canonicalization

    def label(self) -> str:
        return f"s^{self.cluster}_{self.j},{self.k}"


def tangent_line(curve: FermatCurve, p: ProjPoint) -> HomPoly:
    """p_x^(d-1) x + p_y^(d-1) y + p_z^(d-1) z."""
    if not curve.contains(p):
        raise NotOnCurve("tangent line requested off the curve")
    d = curve.d
    cs = [c ** (d - 1) for c in p.coords]
    return HomPoly.line(curve.field, cs[0], cs[1], cs[2])


def inflection_points(curve: FermatCurve):
    """The 3d inflection points (0:1:u^k), (u^k:0:1), (1:u^k:0), k odd."""
    field = curve.field
    out = []
    for k in range(1, 2 * curve.d, 2):
        uk = field.u_pow(k)
        out.append(ProjPoint(field, [field.zero, field.one, uk]))
    for k in range(1, 2 * curve.d, 2):
        uk = field.u_pow(k)
        out.append(ProjPoint(field, [uk, field.zero, field.one]))
    for k in range(1, 2 * curve.d, 2):
        uk = field.u_pow(k)
        out.append(ProjPoint(field, [field.one, uk, field.zero]))
    return out


def two_hessian(curve: FermatCurve) -> HomPoly:
    """Cayley's second Hessian for the Fermat curve.

    Determinant of the power matrix with columns x^(3d-9), x^(4d-9),
    x^(5d-9) (and the y, z rows); with this column order the determinant
    factors exactly as (xyz)^(3d-9) (x^d-y^d)(y^d-z^d)(z^d-x^d).
    """
    field = curve.field
    d = curve.d
    rows = []
    for var in range(3):
        row = []
        for e in (3 * d - 9, 4 * d - 9, 5 * d - 9):
            exps = [0, 0, 0]
            exps[var] = e
            row.append(HomPoly.monomial(field, tuple(exps), 1))
        rows.append(row)
    return (rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
            - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
            + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]))


def two_hessian_factored(curve: FermatCurve) -> HomPoly:
    field = curve.field
    d = curve.d
    x, y, z = HomPoly.variables(field)
    core = (x**d - y**d) * (y**d - z**d) * (z**d - x**d)
    return HomPoly.monomial(field, (3 * d - 9,) * 3, 1) * core


def sextactic_points(curve: FermatCurve):
    """All 3d^2 sextactic points, cluster by cluster."""
    field = curve.field
    out = []
    for cluster in CLUSTERS:
        for j in range(curve.d):
            zj = field.zeta_pow(j)
            for k in range(1, 2 * curve.d, 2):
                w = field.monomial(-k, 1)          # u^(-k) t
                if cluster == "z":
                    raw = (zj, field.one, w)
                elif cluster == "y":
                    raw = (field.one, w, zj)
                else:
                    raw = (w, zj, field.one)
                out.append(SextacticPoint(cluster, j, k,
                                          ProjPoint(field, raw), raw))
    return out


def sextactic_count_formula(curve: FermatCurve) -> int:
    """6(2d + 5g - 5) - 3d(4 + 4d - 15), which collapses to 3d^2."""
    d, g = curve.d, curve.genus
    return 6 * (2 * d + 5 * g - 5) - 3 * d * (4 + 4 * d - 15)


# -- osculating conics ---------------------------------------------------------


def _polar_form(f: HomPoly, p: ProjPoint, order: int) -> HomPoly:
    """Directional polar: sum over multi-derivatives of f at p times monomials."""
    field = f.field
    if order == 1:
        parts = [f.partial(i).evaluate(p) for i in range(3)]
        return HomPoly.line(field, parts[0], parts[1], parts[2])
    if order == 2:
        acc = HomPoly.zero(field, 2)
        for i in range(3):
            for j in range(3):
                c = f.partial(i).partial(j).evaluate(p)
                if not c.is_zero():
                    exps = [0, 0, 0]
                    exps[i] += 1
                    exps[j] += 1
                    acc = acc + HomPoly.monomial(field, tuple(exps), c)
        return acc
    raise ValueError("only first and second polars are needed")


def _omega_psi_at(curve: FermatCurve, p: ProjPoint):
    """The two Fermat covariant evaluations feeding the conic combination."""
    field = curve.field
    d = curve.d
    px, py, pz = p.coords
    q = px**d * py**d + py**d * pz**d + pz**d * px**d
    if d == 3:
        omega = field.zero
    else:
        pi = (px * py * pz) ** (d - 4)
        omega = field.from_rational(
            d**5 * (d - 1)**5 * (d - 2) * (d - 3)) * pi * q
    pi2 = (px * py * pz) ** (2 * d - 6)
    psi = field.from_rational(d**8 * (d - 1)**8 * (d - 2)**2) * pi2 * q
    return omega, psi


@lru_cache(maxsize=None)
def _hessian_poly(d: int) -> HomPoly:
    curve = FermatCurve(d)
    return hessian(curve.poly)


def _cayley_conic_raw(curve: FermatCurve, p: ProjPoint) -> HomPoly:
    """Covariant-combination conic; valid wherever the Hessian is nonzero."""
    field = curve.field
    F = curve.poly
    H = _hessian_poly(curve.d)
    hp = H.evaluate(p)
    if hp.is_zero():
        raise HessianVanishes("Hessian vanishes at p")
    h2, h3 = hp * hp, hp * hp * hp
    df = _polar_form(F, p, 1)
    d2f = _polar_form(F, p, 2)
    dh = _polar_form(H, p, 1)
    omega, psi = _omega_psi_at(curve, p)
    w = -3 * omega * hp + 4 * psi
    return d2f.scale(9 * h3) - (dh.scale(6 * h2) + df.scale(w)) * df


def _closed_conic_raw(curve: FermatCurve, p: ProjPoint) -> HomPoly:
    """Six-term closed form of the osculating conic in the coordinates of p."""
    field = curve.field
    d = curve.d
    px, py, pz = p.coords
    pxd, pyd, pzd = px**d, py**d, pz**d
    c2 = field.from_rational(2 - d)
    terms = {}
    terms[(2, 0, 0)] = px**(2 * d - 2) * (
        (2 * d - 1) * pyd * pzd + c2 * (pyd + pzd) * pxd) * (d + 1)
    terms[(0, 2, 0)] = py**(2 * d - 2) * (
        (2 * d - 1) * pxd * pzd + c2 * (pxd + pzd) * pyd) * (d + 1)
    terms[(0, 0, 2)] = pz**(2 * d - 2) * (
        (2 * d - 1) * pxd * pyd + c2 * (pxd + pyd) * pzd) * (d + 1)
    a, b = 2 * (d + 1) * (d - 2), 4 * (2 * d - 1) * (d - 2)
    terms[(1, 1, 0)] = -(a * px**(2 * d - 1) * py**(2 * d - 1)
                         + b * (px**(d - 1) * py**(2 * d - 1)
                                + px**(2 * d - 1) * py**(d - 1)) * pzd)
    terms[(1, 0, 1)] = -(a * px**(2 * d - 1) * pz**(2 * d - 1)
                         + b * (px**(d - 1) * pz**(2 * d - 1)
                                + px**(2 * d - 1) * pz**(d - 1)) * pyd)
    terms[(0, 1, 1)] = -(a * py**(2 * d - 1) * pz**(2 * d - 1)
                         + b * (py**(d - 1) * pz**(2 * d - 1)
                                + py**(2 * d - 1) * pz**(d - 1)) * pxd)
    return HomPoly(field, 2, terms)


def _require_conic_point(curve: FermatCurve, p: ProjPoint):
    if not curve.contains(p):
        raise NotOnCurve("conic requested off the curve")
    if (p.coords[0] * p.coords[1] * p.coords[2]).is_zero():
        raise HessianVanishes(
            "point lies on xyz = 0; the conic formula degenerates there")


def osculating_conic_cayley(curve: FermatCurve, p: ProjPoint) -> HomPoly:
    _require_conic_point(curve, p)
    return _cayley_conic_raw(curve, p)


def osculating_conic_closed(curve: FermatCurve, p: ProjPoint) -> HomPoly:
    _require_conic_point(curve, p)
    return _closed_conic_raw(curve, p)


def _hyperosc_conic_cluster_z(field: TowerField, d: int, j: int, k: int) -> HomPoly:
    """O_{j,k} for the cluster-z point (zeta^j : 1 : u^(-k) t)."""
    tinv = field.t_inv
    terms = {
        (2, 0, 0): field.zeta_pow(-2 * j) * (d * (d + 1)),
        (0, 2, 0): field.from_rational(d * (d + 1)),
        (0, 0, 2): field.u_pow(2 * k) * tinv * tinv *
        (-4 * (d + 1) * (2 * d - 3)),
        (1, 1, 0): field.zeta_pow(-j) * (-2 * (d - 2) * (5 * d - 3)),
        (1, 0, 1): field.zeta_pow(-j) * field.u_pow(k) * tinv *
        (8 * d * (d - 2)),
        (0, 1, 1): field.u_pow(k) * tinv * (8 * d * (d - 2)),
    }
    return HomPoly(field, 2, terms)


_CLUSTER_MATRICES = {
    # substitution matrices carrying the cluster-z conic to the other clusters:
    # the conic at g(p) is O_p composed with g^(-1)
    "z": ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    # cluster y point (1 : u^-k t : zeta^j) = g(cluster-z point) with
    # g(x:y:z) = (y:z:x); g^(-1)(x:y:z) = (z:x:y)
    "y": ((0, 0, 1), (1, 0, 0), (0, 1, 0)),
    # cluster x point (u^-k t : zeta^j : 1) with g(x:y:z) = (z:x:y)
    "x": ((0, 1, 0), (0, 0, 1), (1, 0, 0)),
}


def hyperosculating_conic(curve: FermatCurve, s: SextacticPoint) -> HomPoly:
    """The explicit hyperosculating conic at a sextactic point."""
    base = _hyperosc_conic_cluster_z(curve.field, curve.d, s.j, s.k)
    if s.cluster == "z":
        return base
    mat = _CLUSTER_MATRICES[s.cluster]
    return base.compose_matrix(mat)
