"""Homogeneous polynomial algebra over K_d and exact local intersection data.

Polynomials are sparse maps from exponent triples (a, b, c) with a+b+c = deg
to nonzero field elements.  Intersection multiplicities at a smooth point are
computed two independent ways:

* `int_mult` lifts a truncated power-series branch of the first curve and
  reads off the valuation of the second polynomial along it;
* `resultant_order` eliminates a variable after a recorded random rational
  change of coordinates and reads off the vanishing order of the resultant.

`restrict_to_line` pulls a curve back to a line along a deterministic
parametrization and returns a binary form; `disc2` is the discriminant of a
binary quadratic.
"""

from __future__ import annotations

import random

from .errors import (GenericityFailure, NotOnCurve, ResultantZero,
                     SingularPoint, TruncationExhausted)
from .tower import Q, Q0, Q1, FieldElement, TowerField

VARS = ("x", "y", "z")


class HomPoly:
    """Homogeneous polynomial in x, y, z over K_d."""

    __slots__ = ("field", "deg", "terms", "_hash")

    def __init__(self, field: TowerField, deg: int, terms: dict):
        self.field = field
        self.deg = deg
        clean = {}
        for exps, c in terms.items():
            if sum(exps) != deg:
                raise ValueError(f"term {exps} does not have degree {deg}")
            if not c.is_zero():
                clean[exps] = c
        self.terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(field, deg: int) -> "HomPoly":
        return HomPoly(field, deg, {})

    @staticmethod
    def monomial(field, exps, coeff) -> "HomPoly":
        if not isinstance(coeff, FieldElement):
            coeff = field.from_rational(coeff)
        return HomPoly(field, sum(exps), {tuple(exps): coeff})

    @staticmethod
    def line(field, a, b, c) -> "HomPoly":
        coefs = []
        for v in (a, b, c):
            coefs.append(v if isinstance(v, FieldElement)
                         else field.from_rational(v))
        return HomPoly(field, 1, {(1, 0, 0): coefs[0], (0, 1, 0): coefs[1],
                                  (0, 0, 1): coefs[2]})

    @staticmethod
    def variables(field):
        return (HomPoly.monomial(field, (1, 0, 0), 1),
                HomPoly.monomial(field, (0, 1, 0), 1),
                HomPoly.monomial(field, (0, 0, 1), 1))

    # -- structure -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, HomPoly):
            return NotImplemented
        return (self.field is other.field and self.deg == other.deg
                and self.terms == other.terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field.d, self.deg,
                               frozenset(self.terms.items())))
        return self._hash

    def coeff(self, exps) -> FieldElement:
        return self.terms.get(tuple(exps), self.field.zero)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0], reverse=True)

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if self.is_zero() and self.deg != other.deg:
            return other
        if other.is_zero() and self.deg != other.deg:
            return self
        if self.deg != other.deg:
            raise ValueError("degree mismatch in sum")
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            out[e] = c if s is None else s + c
        return HomPoly(self.field, self.deg, out)

    def __neg__(self):
        return HomPoly(self.field, self.deg,
                       {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, HomPoly):
            out = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                    prod = c1 * c2
                    s = out.get(e)
                    out[e] = prod if s is None else s + prod
            return HomPoly(self.field, self.deg + other.deg, out)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c) -> "HomPoly":
        if not isinstance(c, FieldElement):
            c = self.field.from_rational(c)
        return HomPoly(self.field, self.deg,
                       {e: v * c for e, v in self.terms.items()})

    def __pow__(self, e: int):
        out = HomPoly.monomial(self.field, (0, 0, 0), 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # -- calculus and evaluation ------------------------------------------------

    def partial(self, var) -> "HomPoly":
        vi = VARS.index(var) if isinstance(var, str) else var
        out = {}
        for e, c in self.terms.items():
            k = e[vi]
            if k:
                ne = list(e)
                ne[vi] = k - 1
                out[tuple(ne)] = c * k
        return HomPoly(self.field, max(self.deg - 1, 0), out)

    def evaluate(self, coords) -> FieldElement:
        if isinstance(coords, ProjPoint):
            coords = coords.coords
        pows = []
        for v in coords:
            pv = [self.field.one]
            for _ in range(self.deg):
                pv.append(pv[-1] * v)
            pows.append(pv)
        acc = self.field.zero
        for (a, b, c), coef in self.terms.items():
            acc = acc + coef * pows[0][a] * pows[1][b] * pows[2][c]
        return acc

    def compose_matrix(self, mat) -> "HomPoly":
        """Substitute x_i -> sum_j mat[i][j] x_j (rows give the new forms)."""
        field = self.field
        forms = []
        for row in mat:
            forms.append(HomPoly.line(field, row[0], row[1], row[2]))
        pows = []
        for f in forms:
            pf = [HomPoly.monomial(field, (0, 0, 0), 1)]
            for _ in range(self.deg):
                pf.append(pf[-1] * f)
            pows.append(pf)
        acc = HomPoly.zero(field, self.deg)
        for (a, b, c), coef in self.terms.items():
            acc = acc + (pows[0][a] * pows[1][b] * pows[2][c]).scale(coef)
        return acc

    def proportional(self, other) -> bool:
        """Projective equality: coefficient vectors have rank <= 1."""
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        if self.deg != other.deg:
            return False
        exps = set(self.terms) | set(other.terms)
        exps = sorted(exps)
        a = [self.coeff(e) for e in exps]
        b = [other.coeff(e) for e in exps]
        for i in range(len(exps)):
            for k in range(i + 1, len(exps)):
                if not (a[i] * b[k] - a[k] * b[i]).is_zero():
                    return False
        return True

    def canonical_line(self) -> "HomPoly":
        """Scale a linear form so its first nonzero coefficient is one."""
        assert self.deg == 1 and not self.is_zero()
        for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
            c = self.terms.get(e)
            if c is not None:
                return self.scale(self.field.invert(c))
        raise AssertionError("unreachable")

    def line_key(self):
        return tuple(sorted((e, v.coeffs)
                            for e, v in self.canonical_line().terms.items()))

    def to_json_dict(self) -> dict:
        return {"deg": self.deg,
                "terms": [[a, b, c, coef.to_json_dict()]
                          for (a, b, c), coef in self.sorted_terms()]}

    def __repr__(self):
        if self.is_zero():
            return f"HomPoly(0, deg={self.deg})"
        bits = []
        for (a, b, c), coef in self.sorted_terms()[:6]:
            mono = "".join(f"{v}^{e}" for v, e in zip(VARS, (a, b, c)) if e)
            bits.append(f"({coef!r})*{mono or '1'}")
        if len(self.terms) > 6:
            bits.append("...")
        return " + ".join(bits)


class ProjPoint:
    """Point of P^2 over K_d, stored with first nonzero coordinate scaled to 1."""

    __slots__ = ("field", "coords", "_hash")

    def __init__(self, field: TowerField, coords):
        coords = list(coords)
        if len(coords) != 3:
            raise ValueError("need three coordinates")
        for i, c in enumerate(coords):
            if not isinstance(c, FieldElement):
                coords[i] = field.from_rational(c)
        pivot = None
        for c in coords:
            if not c.is_zero():
                pivot = c
                break
        if pivot is None:
            raise ValueError("all coordinates zero")
        inv = field.invert(pivot)
        self.field = field
        self.coords = tuple(c * inv for c in coords)
        self._hash = None

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return self.field is other.field and self.coords == other.coords

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field.d,) +
                              tuple(c.coeffs for c in self.coords))
        return self._hash

    def to_json(self):
        return [c.to_json_dict() for c in self.coords]

    def approx(self, precision_bits=64):
        return [complex(self.field.embed(c, precision_bits).center)
                for c in self.coords]

    def __repr__(self):
        return f"ProjPoint({self.coords[0]!r} : {self.coords[1]!r} : {self.coords[2]!r})"


# -- spec-facing wrappers -----------------------------------------------------


def partial(f: HomPoly, var) -> HomPoly:
    return f.partial(var)


def evaluate(f: HomPoly, p) -> FieldElement:
    return f.evaluate(p)


def hessian(f: HomPoly) -> HomPoly:
    """Determinant of the 3x3 matrix of second partials."""
    if f.deg < 2:
        return HomPoly.zero(f.field, 0)
    second = [[f.partial(i).partial(j) for j in range(3)] for i in range(3)]
    return _det3(second)


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


# -- binary forms ------------------------------------------------------------


class BinaryForm:
    """Homogeneous form in two parameters s, t; coeffs[i] is the s^i t^(n-i) term."""

    __slots__ = ("field", "deg", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        self.coeffs = tuple(coeffs)
        self.deg = len(self.coeffs) - 1

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def __eq__(self, other):
        return (isinstance(other, BinaryForm) and self.field is other.field
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.field.d,) + tuple(c.coeffs for c in self.coeffs))

    def __mul__(self, other):
        out = [self.field.zero] * (self.deg + other.deg + 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return BinaryForm(self.field, out)

    def scale(self, c):
        return BinaryForm(self.field, [v * c for v in self.coeffs])

    def __sub__(self, other):
        assert self.deg == other.deg
        return BinaryForm(self.field, [a - b for a, b
                                       in zip(self.coeffs, other.coeffs)])

    def evaluate(self, s, t):
        acc = self.field.zero
        sp = [self.field.one]
        tp = [self.field.one]
        for _ in range(self.deg):
            sp.append(sp[-1] * s)
            tp.append(tp[-1] * t)
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                acc = acc + c * sp[i] * tp[self.deg - i]
        return acc

    def proportional(self, other) -> bool:
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        if self.deg != other.deg:
            return False
        n = self.deg + 1
        for i in range(n):
            for k in range(i + 1, n):
                lhs = self.coeffs[i] * other.coeffs[k]
                rhs = self.coeffs[k] * other.coeffs[i]
                if not (lhs - rhs).is_zero():
                    return False
        return True

    def divide_linear(self, alpha, beta):
        """Divide by alpha*s + beta*t; returns (quotient, remainder scalar).

        The remainder scalar is the coefficient of t^n (alpha != 0) or s^n
        (alpha == 0); it vanishes iff the linear form divides exactly.
        """
        field = self.field
        n = self.deg
        b = list(self.coeffs)
        if not alpha.is_zero():
            ainv = field.invert(alpha)
            q = [field.zero] * n
            q[n - 1] = b[n] * ainv
            for i in range(n - 1, 0, -1):
                q[i - 1] = (b[i] - beta * q[i]) * ainv
            rem = b[0] - beta * q[0]
            return BinaryForm(field, q), rem
        binv = field.invert(beta)
        q = [b[i] * binv for i in range(n)]
        return BinaryForm(field, q), b[n]

    def root_multiplicity(self, s0, t0) -> int:
        """Vanishing order at the parameter point (s0 : t0)."""
        # the linear form with zero (s0 : t0) is t0*s - s0*t
        form = self
        mult = 0
        while form.deg >= 1:
            quot, rem = form.divide_linear(t0, -s0)
            if not rem.is_zero():
                break
            form = quot
            mult += 1
        return mult

    def to_json_dict(self):
        return {"deg": self.deg,
                "coeffs": [c.to_json_dict() for c in self.coeffs]}


def pullback_to_line(c: HomPoly, v1, v2) -> BinaryForm:
    """Pull c back along (s, t) -> s*v1 + t*v2 for coordinate triples v1, v2."""
    field = c.field
    lin = []
    for xv, yv in zip(v1, v2):
        if not isinstance(xv, FieldElement):
            xv = field.from_rational(xv)
        if not isinstance(yv, FieldElement):
            yv = field.from_rational(yv)
        lin.append(BinaryForm(field, [yv, xv]))  # coeff of t, then s
    pows = []
    for bf in lin:
        pl = [BinaryForm(field, [field.one])]
        for _ in range(c.deg):
            pl.append(pl[-1] * bf)
        pows.append(pl)
    acc = BinaryForm(field, [field.zero] * (c.deg + 1))
    for (a, b, cc), coef in c.terms.items():
        term = pows[0][a] * pows[1][b] * pows[2][cc]
        acc = BinaryForm(field,
                         [u + v * coef for u, v in zip(acc.coeffs, term.coeffs)])
    return acc


def line_parametrization(L: HomPoly):
    """Deterministic kernel basis of a linear form, pivoting x < y < z."""
    field = L.field
    a = L.coeff((1, 0, 0))
    b = L.coeff((0, 1, 0))
    c = L.coeff((0, 0, 1))
    zero, one = field.zero, field.one
    if not a.is_zero():
        ainv = field.invert(a)
        return ((-b * ainv, one, zero), (-c * ainv, zero, one))
    if not b.is_zero():
        binv = field.invert(b)
        return ((one, zero, zero), (zero, -c * binv, one))
    if not c.is_zero():
        return ((one, zero, zero), (zero, one, zero))
    raise ValueError("zero linear form")


def restrict_to_line(c: HomPoly, L: HomPoly) -> BinaryForm:
    v1, v2 = line_parametrization(L)
    return pullback_to_line(c, v1, v2)


def disc2(q: BinaryForm) -> FieldElement:
    """Discriminant b^2 - 4ac of a binary quadratic a*s^2 + b*st + c*t^2."""
    if q.deg != 2:
        raise ValueError("discriminant needs a quadratic")
    a, b, cc = q.coeffs[2], q.coeffs[1], q.coeffs[0]
    return b * b - 4 * a * cc


def parameter_of_point(p: ProjPoint, v1, v2):
    """Solve p = s*v1 + t*v2 projectively; returns (s, t) in K_d."""
    field = p.field
    # pick two coordinate slots where (v1, v2) has full rank
    for i in range(3):
        for j in range(i + 1, 3):
            det = v1[i] * v2[j] - v1[j] * v2[i]
            if not det.is_zero():
                dinv = field.invert(det)
                s = (p.coords[i] * v2[j] - p.coords[j] * v2[i]) * dinv
                t = (v1[i] * p.coords[j] - v1[j] * p.coords[i]) * dinv
                # consistency on the remaining coordinate
                k = 3 - i - j
                if not (s * v1[k] + t * v2[k] - p.coords[k]).is_zero():
                    raise ValueError("point not on the parametrized line")
                return s, t
    raise ValueError("degenerate parametrization")


# -- truncated power series along a branch --------------------------------------


def _ser_mul(a, b, n):
    field = a[0].field
    out = [field.zero] * n
    for i, ai in enumerate(a):
        if i >= n or ai.is_zero():
            continue
        top = min(n - i, len(b))
        for j in range(top):
            bj = b[j]
            if not bj.is_zero():
                out[i + j] = out[i + j] + ai * bj
    return out


def _ser_eval_poly(f: HomPoly, series, n):
    """Evaluate f on a triple of truncated series, mod s^n."""
    field = f.field
    pows = []
    for s in series:
        pl = [[field.one] + [field.zero] * (n - 1)]
        for _ in range(f.deg):
            pl.append(_ser_mul(pl[-1], s, n))
        pows.append(pl)
    acc = [field.zero] * n
    for (a, b, c), coef in f.terms.items():
        term = _ser_mul(pows[0][a], pows[1][b], n)
        term = _ser_mul(term, pows[2][c], n)
        for i in range(n):
            if not term[i].is_zero():
                acc[i] = acc[i] + coef * term[i]
    return acc


class BranchSeries:
    """Local parametrization of a curve branch at a smooth point.

    `series` is a triple of truncated power series (one per coordinate) in the
    local parameter; substituting them into the curve polynomial vanishes
    modulo s^order.
    """

    __slots__ = ("point", "chart", "param_var", "solved_var", "order", "series")

    def __init__(self, point, chart, param_var, solved_var, order, series):
        self.point = point
        self.chart = chart
        self.param_var = param_var
        self.solved_var = solved_var
        self.order = order
        self.series = series

    def residual(self, f: HomPoly):
        return _ser_eval_poly(f, self.series, self.order)

    def valuation_of(self, g: HomPoly):
        """Valuation of g along the branch, or None if zero mod s^order."""
        vals = _ser_eval_poly(g, self.series, self.order)
        for i, v in enumerate(vals):
            if not v.is_zero():
                return i
        return None

    def tangent_direction(self):
        field = self.point.field
        return tuple(s[1] if len(s) > 1 else field.zero for s in self.series)


def branch_series(f: HomPoly, p: ProjPoint, order: int) -> BranchSeries:
    """Iteratively lifted power-series branch of f at the smooth point p.

    The affine chart is the coordinate of p that equals one; among the other
    two coordinates the one whose partial derivative at p has the largest
    embedded modulus is solved for (ties break x < y < z).
    """
    field = f.field
    if not f.evaluate(p).is_zero():
        raise NotOnCurve("f(p) != 0")
    grads = [f.partial(i).evaluate(p) for i in range(3)]
    if all(g.is_zero() for g in grads):
        raise SingularPoint("gradient vanishes at p")

    chart = next(i for i, c in enumerate(p.coords) if not c.is_zero())
    others = [i for i in range(3) if i != chart]
    candidates = [i for i in others if not grads[i].is_zero()]
    if not candidates:
        # gradient concentrated on the chart coordinate: p is smooth but the
        # branch is transverse to the chart; Euler's relation rules this out
        # for the curves handled here
        raise SingularPoint("no usable partial in this chart")
    if len(candidates) == 2:
        m0 = field.embed(grads[candidates[0]], 64).abs_max()
        m1 = field.embed(grads[candidates[1]], 64).abs_max()
        solved = candidates[1] if m1 > m0 else candidates[0]
    else:
        solved = candidates[0]
    param = next(i for i in others if i != solved)

    n = max(order, 2)
    ser = [None, None, None]
    ser[chart] = [field.one] + [field.zero] * (n - 1)
    ser[param] = [p.coords[param], field.one] + [field.zero] * (n - 2)
    sol = [p.coords[solved]] + [field.zero] * (n - 1)
    ser[solved] = sol

    dinv = field.invert(grads[solved])
    for m in range(1, n):
        vals = _ser_eval_poly(f, ser, m + 1)
        r = vals[m]
        if not r.is_zero():
            sol[m] = -r * dinv
    bs = BranchSeries(p, chart, param, solved, n,
                      tuple(tuple(s) for s in ser))
    res = bs.residual(f)
    assert all(v.is_zero() for v in res), "branch lifting failed"
    return bs


def int_mult(f: HomPoly, g: HomPoly, p: ProjPoint) -> int:
    """Intersection multiplicity (f . g)_p via the branch series of f.

    Returns 0 when g(p) != 0.  Truncation starts slightly above the expected
    bound and doubles up to a cap derived from the product of the degrees.
    """
    if not g.evaluate(p).is_zero():
        return 0
    if g.deg == 1:
        bound = f.deg + 1
    elif g.deg == 2:
        bound = 7
    else:
        bound = f.deg * g.deg
    n = bound + 2
    cap = 4 * f.deg * g.deg + 8
    while True:
        bs = branch_series(f, p, n)
        v = bs.valuation_of(g)
        if v is not None:
            return v
        if n >= cap:
            raise TruncationExhausted(
                f"valuation of g exceeds cap {cap} along the branch")
        n = min(2 * n, cap)


# -- resultants ------------------------------------------------------------------


def _upoly_deg(p):
    for k in range(len(p) - 1, -1, -1):
        if not p[k].is_zero():
            return k
    return -1


def _upoly_mod(a, b, field):
    """Remainder of univariate coefficient lists over the field."""
    a = list(a)
    db = _upoly_deg(b)
    binv = field.invert(b[db])
    da = _upoly_deg(a)
    while da >= db:
        c = a[da] * binv
        for i in range(db + 1):
            t = b[i] * c
            a[da - db + i] = a[da - db + i] - t
        da = _upoly_deg(a)
    return a[: max(da + 1, 1)] if da >= 0 else [field.zero]


def univariate_resultant(a, b, field) -> FieldElement:
    """Resultant of two univariate coefficient lists over K_d (Euclid)."""
    da, db = _upoly_deg(a), _upoly_deg(b)
    if da < 0 or db < 0:
        return field.zero
    res = field.one
    while True:
        if db == 0:
            return res * b[0] ** da
        r = _upoly_mod(a, b, field)
        dr = _upoly_deg(r)
        if dr < 0:
            return field.zero
        sign = -1 if (da * db) % 2 else 1
        res = res * b[db] ** (da - dr)
        if sign < 0:
            res = -res
        a, b, da, db = b, r, db, dr


def _upoly_gcd(a, b, field):
    da, db = _upoly_deg(a), _upoly_deg(b)
    if da < 0:
        return b
    if db < 0:
        return a
    while True:
        r = _upoly_mod(a, b, field)
        dr = _upoly_deg(r)
        if dr < 0:
            return b
        a, b = b, r[: dr + 1]


def _fiber_line_generic(f, g, p, center_coords) -> bool:
    """True iff p is the only common zero of f and g on the line through
    the projection center and p."""
    field = f.field
    rf = pullback_to_line(f, center_coords, p.coords)
    rg = pullback_to_line(g, center_coords, p.coords)
    # p sits at parameter (0 : 1); both restrictions vanish there
    uf = list(rf.coeffs)
    ug = list(rg.coeffs)
    # a common root at (1 : 0) (the center direction at infinity) fails too
    if uf[rf.deg].is_zero() and ug[rg.deg].is_zero():
        return False
    gcd = _upoly_gcd(uf, ug, field)
    dg = _upoly_deg(gcd)
    if dg < 0:
        return False
    # genericity: gcd must be a pure power of s (all lower coeffs zero)
    return all(gcd[i].is_zero() for i in range(dg))


def _mat3_inverse_rational(m):
    det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
           - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
           + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    if det == 0:
        return None
    adj = [[Q0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != j]
            c = [k for k in range(3) if k != i]
            minor = m[r[0]][c[0]] * m[r[1]][c[1]] - m[r[0]][c[1]] * m[r[1]][c[0]]
            adj[i][j] = minor if (i + j) % 2 == 0 else -minor
    return [[adj[i][j] / det for j in range(3)] for i in range(3)]


def _interpolate(nodes, values, field):
    """Newton interpolation; nodes are rationals, values are field elements."""
    n = len(nodes)
    coef = list(values)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            denom = Q(nodes[i] - nodes[i - j])
            coef[i] = (coef[i] - coef[i - 1]) * field.from_rational(1 / denom)
    # expand Newton form into monomial coefficients
    poly = [field.zero] * n
    acc = [field.one] + [field.zero] * (n - 1)
    for j in range(n):
        for i in range(n):
            if not acc[i].is_zero():
                poly[i] = poly[i] + coef[j] * acc[i]
        if j < n - 1:
            # acc *= (w - nodes[j])
            node = field.from_rational(nodes[j])
            new = [field.zero] * n
            for i in range(n - 1):
                if not acc[i].is_zero():
                    new[i + 1] = new[i + 1] + acc[i]
                    new[i] = new[i] - acc[i] * node
            acc = new
    return poly


def resultant_order(f: HomPoly, g: HomPoly, p: ProjPoint,
                    seed: int = 0, max_attempts: int = 24):
    """Vanishing order at p's image of Res_z(f, g) after a recorded random
    rational coordinate change; agrees with int_mult when genericity holds.

    Returns (order, attempt_record) where the record carries the seed, the
    accepted matrix and the attempt count.
    """
    field = f.field
    rng = random.Random(seed)
    last_fail = None
    for attempt in range(max_attempts):
        m = [[Q(rng.randint(-5, 5)) for _ in range(3)] for _ in range(3)]
        minv = _mat3_inverse_rational(m)
        if minv is None:
            continue
        center = [field.from_rational(m[i][2]) for i in range(3)]
        fc = f.evaluate(center)
        gc = g.evaluate(center)
        if fc.is_zero() or gc.is_zero():
            last_fail = "center on a curve"
            continue
        # center must differ from p projectively
        try:
            cpt = ProjPoint(field, center)
        except ValueError:
            continue
        if cpt == p:
            last_fail = "center equals p"
            continue
        if not _fiber_line_generic(f, g, p, center):
            last_fail = "extra common zero on the fiber line"
            continue

        fm = f.compose_matrix(m)
        gm = g.compose_matrix(m)
        q = [sum((field.from_rational(minv[i][j]) * p.coords[j]
                  for j in range(3)), field.zero) for i in range(3)]

        deg_r = f.deg * g.deg
        nodes = [Q(k) for k in range(deg_r + 1)]
        vals = []
        for w in nodes:
            fa = _z_coefficients(fm, w, field)
            ga = _z_coefficients(gm, w, field)
            vals.append(univariate_resultant(fa, ga, field))
        if all(v.is_zero() for v in vals):
            raise ResultantZero("resultant vanishes identically")
        rpoly = _interpolate(nodes, vals, field)

        qx, qy = q[0], q[1]
        if qy.is_zero():
            order = deg_r - _upoly_deg(rpoly)
        else:
            w0 = qx * field.invert(qy)
            order = 0
            cur = rpoly
            while _upoly_deg(cur) >= 1:
                quo, rem = _upoly_divmod_linear(cur, w0, field)
                if not rem.is_zero():
                    break
                order += 1
                cur = quo
        record = {"seed": seed, "attempts": attempt + 1,
                  "matrix": [[f"{c.numerator}/{c.denominator}" for c in row]
                             for row in m]}
        return order, record
    raise GenericityFailure(
        f"no generic coordinate change found ({last_fail})")


def _z_coefficients(h: HomPoly, w, field):
    """Coefficients of h(w, 1, z) as a univariate polynomial in z."""
    out = [field.zero] * (h.deg + 1)
    wq = field.from_rational(w)
    pw = [field.one]
    for _ in range(h.deg):
        pw.append(pw[-1] * wq)
    for (a, b, c), coef in h.terms.items():
        out[c] = out[c] + coef * pw[a]
    return out


def _upoly_divmod_linear(pcoeffs, w0, field):
    """Divide by (w - w0); returns (quotient, remainder)."""
    d = _upoly_deg(pcoeffs)
    q = [field.zero] * d
    acc = pcoeffs[d]
    for i in range(d - 1, -1, -1):
        q[i] = acc
        acc = pcoeffs[i] + acc * w0
    return q, acc


# -- osculating conic from the branch alone ---------------------------------------


def osculating_conic_series(f: HomPoly, p: ProjPoint):
    """Conic with contact order >= 5 at p, from the branch series nullspace.

    Formula-free: sets up the five linear conditions that the first five
    series coefficients of the conic's pullback vanish and solves exactly.
    Returns (conic, contact_order_lower_bound_checked).
    """
    field = f.field
    bs = branch_series(f, p, 8)
    monos = [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]
    cols = []
    for e in monos:
        mono = HomPoly.monomial(field, e, 1)
        cols.append(_ser_eval_poly(mono, bs.series, 5))
    rows = [[cols[c][r] for c in range(6)] for r in range(5)]
    null = _nullspace(rows, 6, field)
    if not null:
        raise ValueError("no conic with the required contact")
    vec = null[0]
    conic = HomPoly(field, 2, {e: v for e, v in zip(monos, vec)
                               if not v.is_zero()})
    return conic


def _nullspace(rows, ncols, field):
    """Kernel basis of a small exact matrix via Gauss-Jordan."""
    mat = [list(r) for r in rows]
    nrows = len(mat)
    pivots = []
    r = 0
    for c in range(ncols):
        sel = None
        for i in range(r, nrows):
            if not mat[i][c].is_zero():
                sel = i
                break
        if sel is None:
            continue
        mat[r], mat[sel] = mat[sel], mat[r]
        inv = field.invert(mat[r][c])
        mat[r] = [v * inv for v in mat[r]]
        for i in range(nrows):
            if i != r and not mat[i][c].is_zero():
                factor = mat[i][c]
                mat[i] = [a - factor * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [field.zero] * ncols
        vec[fc] = field.one
        for ri, pc in enumerate(pivots):
            vec[pc] = -mat[ri][fc]
        basis.append(vec)
    return basis
