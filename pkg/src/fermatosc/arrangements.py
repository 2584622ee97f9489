"""Grid-line arrangements, singularity censuses, freeness and collinearity.

The arrangements attached to the Fermat curve of degree d:

    A: (x^d + y^d)(y^d + z^d)(z^d + x^d)     inflection tangents
    B: (x^d - y^d)(y^d - z^d)(z^d - x^d)     core of the 2-Hessian
    M: (z^d + 2y^d)(x^d + 2z^d)(y^d + 2x^d)
    N: (y^d + 2z^d)(z^d + 2x^d)(x^d + 2y^d)

Subscripts name the variable missing from the defining binary form, so
B_z = V(x^d - y^d), M_x = V(z^d + 2y^d), N_y = V(z^d + 2x^d); those three
host the cluster-z sextactic points with d points per line.

The census lists all singular points of the union (optionally together with
the curve itself), the freeness test solves the quadratic necessary
condition r^2 - (dh-1) r + (dh-1)^2 = tau for an integer exponent
r <= (dh-1)/2, and the collinearity search enumerates every line through
three or more sextactic points exactly, using reductions modulo two primes
as a pre-filter before exact confirmation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NonOrdinary
from .fermat import FermatCurve, SextacticPoint, sextactic_points, tangent_line
from .hompoly import (HomPoly, ProjPoint, line_parametrization,
                      parameter_of_point, pullback_to_line)
from .tower import Q, FieldElement, TowerField, tower_field

GRID_TOKENS = ("Bz", "Bx", "By", "Mx", "My", "Mz", "Nx", "Ny", "Nz",
               "Az", "Ax", "Ay")
GROUP_TOKENS = {"A": ("Az", "Ax", "Ay"), "B": ("Bz", "Bx", "By"),
                "M": ("Mx", "My", "Mz"), "N": ("Nx", "Ny", "Nz")}


@dataclass
class LineArrangement:
    label: str
    field: TowerField
    lines: list                       # degree-1 HomPoly, pairwise non-proportional

    def __post_init__(self):
        keys = [L.line_key() for L in self.lines]
        if len(set(keys)) != len(keys):
            raise ValueError(f"duplicate lines in arrangement {self.label}")

    def __len__(self):
        return len(self.lines)

    def product_poly(self) -> HomPoly:
        out = HomPoly.monomial(self.field, (0, 0, 0), 1)
        for L in self.lines:
            out = out * L
        return out


@dataclass
class CensusEntry:
    point: ProjPoint
    multiplicity: int                 # members through the point (curve counts)
    ordinary: bool
    n_lines: int
    on_curve: Optional[bool] = None


@dataclass
class FreenessVerdict:
    degree_hat: int
    tau: int
    quadratic: tuple                  # (1, -(dh-1), (dh-1)^2 - tau)
    discriminant: int
    discriminant_sign: str            # negative / zero / positive
    exponents: Optional[tuple]
    free: bool

    def to_json_dict(self):
        return {"degree_hat": self.degree_hat, "tau": self.tau,
                "quadratic": list(self.quadratic),
                "discriminant": self.discriminant,
                "discriminant_sign": self.discriminant_sign,
                "exponents": list(self.exponents) if self.exponents else None,
                "free": self.free}


def _grid_lines(token: str, field: TowerField, d: int):
    """Linear factors of one binary-form grid component."""
    zero, one = field.zero, field.one
    out = []
    if token[0] == "B":
        # B_z: x - zeta^j y, B_x: y - zeta^j z, B_y: z - zeta^j x
        order = {"z": (0, 1), "x": (1, 2), "y": (2, 0)}[token[1]]
        for j in range(d):
            coefs = [zero, zero, zero]
            coefs[order[0]] = one
            coefs[order[1]] = -field.zeta_pow(j)
            out.append(HomPoly.line(field, *coefs))
        return out
    if token[0] == "A":
        # A_z: x - u^k y (k odd), etc.
        order = {"z": (0, 1), "x": (1, 2), "y": (2, 0)}[token[1]]
        for k in range(1, 2 * d, 2):
            coefs = [zero, zero, zero]
            coefs[order[0]] = one
            coefs[order[1]] = -field.u_pow(k)
            out.append(HomPoly.line(field, *coefs))
        return out
    # M_x: z - u^(-k) t y, M_y: x - u^(-k) t z, M_z: y - u^(-k) t x
    # N_x: y - u^(-k) t z, N_y: z - u^(-k) t x, N_z: x - u^(-k) t y
    order = {("M", "x"): (2, 1), ("M", "y"): (0, 2), ("M", "z"): (1, 0),
             ("N", "x"): (1, 2), ("N", "y"): (2, 0), ("N", "z"): (0, 1)}[
                 (token[0], token[1])]
    for k in range(1, 2 * d, 2):
        coefs = [zero, zero, zero]
        coefs[order[0]] = one
        coefs[order[1]] = -field.monomial(-k, 1)
        out.append(HomPoly.line(field, *coefs))
    return out


def grid_component_poly(token: str, field: TowerField, d: int) -> HomPoly:
    """The defining binary form of a grid component, e.g. Mx -> z^d + 2y^d."""
    x, y, z = HomPoly.variables(field)
    v = {"x": x, "y": y, "z": z}
    forms = {"Bz": v["x"]**d - v["y"]**d, "Bx": v["y"]**d - v["z"]**d,
             "By": v["z"]**d - v["x"]**d,
             "Az": v["x"]**d + v["y"]**d, "Ax": v["y"]**d + v["z"]**d,
             "Ay": v["z"]**d + v["x"]**d,
             "Mx": v["z"]**d + 2 * v["y"]**d, "My": v["x"]**d + 2 * v["z"]**d,
             "Mz": v["y"]**d + 2 * v["x"]**d,
             "Nx": v["y"]**d + 2 * v["z"]**d, "Ny": v["z"]**d + 2 * v["x"]**d,
             "Nz": v["x"]**d + 2 * v["y"]**d}
    return forms[token]


def parse_label(label: str):
    """Split an arrangement label into grid/triangle tokens."""
    tokens = []
    for part in label.replace(" ", "").split("+"):
        if not part:
            continue
        if part in ("triangle", "xyz"):
            tokens.append("triangle")
            continue
        if part in GROUP_TOKENS:
            tokens.extend(GROUP_TOKENS[part])
            continue
        i = 0
        while i < len(part):
            tok = part[i:i + 2]
            if tok in GRID_TOKENS:
                tokens.append(tok)
                i += 2
            elif part[i] in GROUP_TOKENS:
                tokens.extend(GROUP_TOKENS[part[i]])
                i += 1
            else:
                raise ValueError(f"cannot parse arrangement label {label!r}")
    if not tokens:
        raise ValueError("empty arrangement label")
    return tokens


def build(label: str, d: int) -> LineArrangement:
    """Assemble an arrangement from a label such as B, M+triangle, BzMxNy."""
    field = tower_field(d)
    lines = []
    for tok in parse_label(label):
        if tok == "triangle":
            for exps in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                lines.append(HomPoly.monomial(field, exps, 1))
        else:
            lines.extend(_grid_lines(tok, field, d))
    return LineArrangement(label, field, lines)


# -- census ----------------------------------------------------------------


def _line_crossing(L1: HomPoly, L2: HomPoly, field) -> ProjPoint:
    a1, b1, c1 = (L1.coeff(e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    a2, b2, c2 = (L2.coeff(e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    coords = (b1 * c2 - c1 * b2, c1 * a2 - a1 * c2, a1 * b2 - b1 * a2)
    return ProjPoint(field, coords)


def _curve_points_on_line(curve: FermatCurve, L: HomPoly, specials):
    """Exact intersection of the curve with a line, certified complete.

    Candidates come from the enumerated special points; the restriction of
    the curve to the line must factor completely into the corresponding
    parameter roots (with multiplicity), which certifies that no
    intersection point was missed.
    """
    field = curve.field
    pts = [p for p in specials if L.evaluate(p).is_zero()]
    v1, v2 = line_parametrization(L)
    rest = pullback_to_line(curve.poly, v1, v2)
    mults = {}
    for p in pts:
        s0, t0 = parameter_of_point(p, v1, v2)
        m = 0
        cur = rest
        while cur.deg >= 1:
            quo, rem = cur.divide_linear(t0, -s0)
            if not rem.is_zero():
                break
            cur = quo
            m += 1
        if m == 0:
            raise AssertionError("special point not on restriction")
        mults[p] = m
    if sum(mults.values()) != curve.d:
        raise NonOrdinary(
            "curve-line intersections not exhausted by special points")
    return mults


def census(arr: LineArrangement, extra_curve: Optional[FermatCurve] = None):
    """All singular points of the union, grouped with exact multiplicities."""
    field = arr.field
    through = {}
    for i in range(len(arr.lines)):
        for k in range(i + 1, len(arr.lines)):
            p = _line_crossing(arr.lines[i], arr.lines[k], field)
            through.setdefault(p, set()).update((i, k))

    curve_contact = {}
    if extra_curve is not None:
        specials = ([s.point for s in sextactic_points(extra_curve)]
                    + list(_inflections(extra_curve)))
        for i, L in enumerate(arr.lines):
            for p, m in _curve_points_on_line(extra_curve, L, specials).items():
                curve_contact.setdefault(p, {})[i] = m
                through.setdefault(p, set()).add(i)

    entries = []
    for p, line_idx in through.items():
        n_lines = len(line_idx)
        on_curve = None
        mult = n_lines
        ordinary = True
        if extra_curve is not None:
            on_curve = extra_curve.poly.evaluate(p).is_zero()
            if on_curve:
                mult += 1
                tang = tangent_line(extra_curve, p)
                contacts = curve_contact.get(p, {})
                for i in line_idx:
                    if arr.lines[i].proportional(tang) or contacts.get(i, 1) > 1:
                        ordinary = False
        if mult >= 2:
            entries.append(CensusEntry(p, mult, ordinary, n_lines, on_curve))
    entries.sort(key=lambda e: _point_sort_key(e.point))

    n_pairs = sum(e.n_lines * (e.n_lines - 1) // 2 for e in entries
                  if e.n_lines >= 2)
    assert n_pairs == len(arr.lines) * (len(arr.lines) - 1) // 2, \
        "pair conservation failed"
    return entries


def _inflections(curve: FermatCurve):
    from .fermat import inflection_points
    return inflection_points(curve)


def _point_sort_key(p: ProjPoint):
    return tuple(str(coord.coeffs) for coord in p.coords)


def multiplicity_multiset(entries):
    out = {}
    for e in entries:
        out[e.multiplicity] = out.get(e.multiplicity, 0) + 1
    return out


def tjurina_total(entries) -> int:
    """Sum of (m-1)^2 over ordinary m-fold points."""
    for e in entries:
        if not e.ordinary:
            raise NonOrdinary(f"non-ordinary point of multiplicity "
                              f"{e.multiplicity}")
    return sum((e.multiplicity - 1) ** 2 for e in entries)


def freeness_test(degree_hat: int, tau: int) -> FreenessVerdict:
    """Integer-exponent solution of r^2 - (dh-1) r + (dh-1)^2 = tau."""
    dm1 = degree_hat - 1
    const = dm1 * dm1 - tau
    disc = dm1 * dm1 - 4 * const
    if disc < 0:
        sign = "negative"
    elif disc == 0:
        sign = "zero"
    else:
        sign = "positive"
    exponents = None
    free = False
    if disc >= 0:
        s = math.isqrt(disc)
        if s * s == disc and (dm1 - s) % 2 == 0:
            r = (dm1 - s) // 2
            if 0 <= r <= dm1 - r:
                exponents = (r, dm1 - r)
                free = True
    return FreenessVerdict(degree_hat, tau, (1, -dm1, const), disc, sign,
                           exponents, free)


# -- syzygies -----------------------------------------------------------------


def verify_syzygy(triple, P: HomPoly) -> bool:
    """True iff a*P_x + b*P_y + c*P_z vanishes identically."""
    degs = {t.deg for t in triple if not t.is_zero()}
    if len(degs) > 1:
        raise ValueError("syzygy components must have uniform degree")
    acc = None
    for comp, var in zip(triple, range(3)):
        term = comp * P.partial(var)
        acc = term if acc is None else acc + term
    return acc.is_zero()


def koszul_triple(P: HomPoly, i: int, j: int):
    """The antisymmetric relation (P_j, -P_i) placed in slots i, j."""
    field = P.field
    comps = [HomPoly.zero(field, max(P.deg - 1, 0)) for _ in range(3)]
    comps[i] = P.partial(j)
    comps[j] = -P.partial(i)
    return tuple(comps)


def grid_product_poly(d: int) -> HomPoly:
    """(x^d - y^d)(z^d + 2y^d)(z^d + 2x^d)."""
    field = tower_field(d)
    x, y, z = HomPoly.variables(field)
    return (x**d - y**d) * (z**d + 2 * y**d) * (z**d + 2 * x**d)


def fermat_grid_product_poly(d: int) -> HomPoly:
    field = tower_field(d)
    x, y, z = HomPoly.variables(field)
    return (x**d + y**d + z**d) * grid_product_poly(d)


def syzygy_candidates(d: int):
    """The documented candidate generator triples, evaluated verbatim.

    Returns a list of (name, triple, polynomial) entries; verify_syzygy on
    each records whether the candidate actually annihilates the Jacobian.
    """
    field = tower_field(d)

    def mono(e, c):
        return HomPoly.monomial(field, e, c)

    p_grid = grid_product_poly(d)
    p_full = fermat_grid_product_poly(d)

    hi_grid = (
        mono((d + 1, 0, 0), 2) + mono((1, d, 0), -4) + mono((1, 0, d), 2),
        mono((d, 1, 0), -4) + mono((0, d + 1, 0), 2) + mono((0, 1, d), 2),
        mono((d, 0, 1), -(4 ** (d + 1))) + mono((0, d, 1), -(4 ** (d + 1)))
        + mono((0, 0, d + 1), -1),
    )
    lo_grid = (
        mono((d - 1, d - 1, 0), 2),
        mono((0, d - 1, d - 1), -1),
        mono((d - 1, 0, d - 1), -1),
    )
    hi_full = (
        mono((2 * d + 1, 0, 0), 2) + mono((1, 2 * d, 0), -6)
        + mono((d + 1, 0, d), 6) + mono((1, d, d), -6) + mono((1, 0, 2 * d), 3),
        mono((2 * d, 1, 0), -6) + mono((0, 2 * d + 1, 0), 2)
        + mono((d, 1, d), -6) + mono((0, d + 1, d), 6) + mono((0, 1, 2 * d), 3),
        mono((2 * d, 0, 1), -6) + mono((0, 2 * d, 1), -6)
        + mono((d, 0, d + 1), -6) + mono((0, d, d + 1), -6)
        + mono((0, 0, 2 * d + 1), -1),
    )
    lo_full = (
        mono((0, d - 1, d - 1), -1),
        mono((d - 1, 0, d - 1), -1),
        mono((d - 1, d - 1, 0), 2),
    )
    return [
        ("grid-high", hi_grid, p_grid),
        ("grid-low", lo_grid, p_grid),
        ("fermat-grid-high", hi_full, p_full),
        ("fermat-grid-low", lo_full, p_full),
    ]


# -- collinearity search -------------------------------------------------------


@dataclass
class CollinearLine:
    line: HomPoly
    points: list                      # SextacticPoint members
    clusters: tuple

    @property
    def mixed(self) -> bool:
        return len(set(self.clusters)) > 1


def _find_modular_hom(field: TowerField, skip: int = 0):
    """A prime p with a ring map K_d -> F_p determined by (w, r).

    w has exact order 2d (hence is a root of the cyclotomic polynomial) and
    r^d = 2 with the extra square-root compatibility when 4 | d.  Returns
    (p, w, r); `skip` selects later primes for independent filters.
    """
    d = field.d
    n = 2 * d
    found = 0
    p = 50000 - (50000 % n) + 1
    while True:
        p += n
        if not _is_prime(p):
            continue
        w = None
        for c in range(2, p):
            cand = pow(c, (p - 1) // n, p)
            if cand == 1:
                continue
            ok = all(pow(cand, n // q, p) != 1 for q in _prime_factors(n))
            if ok:
                w = cand
                break
        if w is None:
            continue
        r = None
        if d % 4 == 0:
            target = (pow(w, d // 4, p) - pow(w, 3 * d // 4, p)) % p
            e = d // 2
        else:
            target = 2 % p
            e = d
        for c in range(2, p):
            if pow(c, e, p) == target:
                r = c
                break
        if r is None:
            continue
        assert pow(r, d, p) == 2 % p
        assert _eval_cyclo_mod(field, w, p) == 0
        if found == skip:
            return p, w, r
        found += 1


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
        if q * q > n:
            break
    i = 41
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def _prime_factors(n: int):
    out = set()
    m, p = n, 2
    while p * p <= m:
        while m % p == 0:
            out.add(p)
            m //= p
        p += 1
    if m > 1:
        out.add(m)
    return out


def _eval_cyclo_mod(field: TowerField, w: int, p: int) -> int:
    from .tower import cyclotomic_int_coeffs
    coeffs = cyclotomic_int_coeffs(2 * field.d)
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * w + c) % p
    return acc


def _reduce_element_mod(a: FieldElement, p: int, w: int, r: int) -> int:
    acc = 0
    for (i, j, c) in a.nonzero_terms():
        den = int(c.denominator) % p
        if den == 0:
            raise ZeroDivisionError("prime divides a denominator")
        val = int(c.numerator) % p * pow(den, p - 2, p) % p
        acc = (acc + val * pow(w, i, p) * pow(r, j, p)) % p
    return acc


def collinear_sextactic(curve: FermatCurve, cap: int = 8):
    """Every line through at least three sextactic points, found exactly.

    Brute force over all point triples with a two-prime modular pre-filter:
    a vanishing determinant over K_d vanishes modulo every prime, so the
    filter never discards a true collinear triple, and each surviving
    candidate is confirmed by an exact 3x3 determinant before grouping by
    canonical line.
    """
    d = curve.d
    if d > cap:
        raise ValueError(f"collinearity brute force capped at d <= {cap}")
    field = curve.field
    pts = sextactic_points(curve)
    n = len(pts)

    mods = [_find_modular_hom(field, skip=0), _find_modular_hom(field, skip=1)]
    masks = []
    for (p, w, r) in mods:
        coords = np.array(
            [[_reduce_element_mod(c, p, w, r) for c in s.raw_coords]
             for s in pts], dtype=np.int64)
        cross = np.empty((n, n, 3), dtype=np.int64)
        for axis, (i1, i2) in enumerate(((1, 2), (2, 0), (0, 1))):
            cross[:, :, axis] = (coords[:, None, i1] * coords[None, :, i2]
                                 - coords[:, None, i2] * coords[None, :, i1]) % p
        dots = np.einsum("ijk,lk->ijl", cross % p, coords) % p
        masks.append(dots == 0)
    both = masks[0] & masks[1]

    candidates = set()
    for i in range(n):
        for j in range(i + 1, n):
            ks = np.nonzero(both[i, j])[0]
            for k in ks:
                if k > j:
                    candidates.add((i, j, int(k)))

    def exact_det(i, j, k):
        a, b, c = pts[i].raw_coords, pts[j].raw_coords, pts[k].raw_coords
        return (a[0] * (b[1] * c[2] - b[2] * c[1])
                - a[1] * (b[0] * c[2] - b[2] * c[0])
                + a[2] * (b[0] * c[1] - b[1] * c[0]))

    lines = {}
    for (i, j, k) in sorted(candidates):
        if not exact_det(i, j, k).is_zero():
            continue
        a, b = pts[i].raw_coords, pts[j].raw_coords
        coefs = (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                 a[0] * b[1] - a[1] * b[0])
        L = HomPoly.line(field, *coefs).canonical_line()
        lines.setdefault(L.line_key(), L)

    out = []
    for key in sorted(lines):
        L = lines[key]
        members = [s for s in pts if L.evaluate(s.point).is_zero()]
        assert len(members) >= 3
        out.append(CollinearLine(L, members,
                                 tuple(s.cluster for s in members)))
    return out
