import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from fermatosc.hompoly import HomPoly, ProjPoint  # noqa: E402
from fermatosc.tower import Q, tower_field  # noqa: E402


def rand_field_element(field, rng, max_terms=3, num_bound=9):
    return field.random_element(rng, max_terms=max_terms, num_bound=num_bound)


def rand_nonzero(field, rng, **kw):
    while True:
        a = rand_field_element(field, rng, **kw)
        if not a.is_zero():
            return a


def rand_homogeneous(field, rng, deg, n_terms=4):
    """Random homogeneous polynomial with small rational coefficients."""
    terms = {}
    exps = [(a, b, deg - a - b) for a in range(deg + 1)
            for b in range(deg + 1 - a)]
    for _ in range(n_terms):
        e = rng.choice(exps)
        c = field.from_rational(Q(rng.randint(-6, 6), rng.choice((1, 2))))
        if e in terms:
            terms[e] = terms[e] + c
        else:
            terms[e] = c
    return HomPoly(field, deg, {e: c for e, c in terms.items()
                                if not c.is_zero()})


def rand_point(field, rng):
    while True:
        coords = [field.from_rational(rng.randint(-4, 4)) for _ in range(3)]
        if any(not c.is_zero() for c in coords):
            return ProjPoint(field, coords)


def rand_curve_through(field, rng, deg, p, max_tries=60):
    """Random curve of the given degree through p, smooth at p."""
    for _ in range(max_tries):
        f = rand_homogeneous(field, rng, deg, n_terms=6)
        # shift a monomial that is nonzero at p so that f(p) = 0
        val = f.evaluate(p)
        mono = None
        for e in [(deg, 0, 0), (0, deg, 0), (0, 0, deg)]:
            mv = HomPoly.monomial(field, e, 1).evaluate(p)
            if not mv.is_zero():
                mono = (e, mv)
                break
        if mono is None:
            continue
        e, mv = mono
        f = f + HomPoly.monomial(field, e, -val * field.invert(mv))
        if not f.evaluate(p).is_zero():
            continue
        grads = [f.partial(i).evaluate(p) for i in range(3)]
        if all(g.is_zero() for g in grads):
            continue
        return f
    raise RuntimeError("could not build a smooth random curve")


def rand_line_through(field, rng, p):
    """Random line through p (not the tangent generically)."""
    while True:
        a = field.from_rational(rng.randint(-4, 4))
        b = field.from_rational(rng.randint(-4, 4))
        # solve a*px + b*py + c*pz = 0 for c when pz != 0, else permute
        for idx in (2, 1, 0):
            if not p.coords[idx].is_zero():
                others = [i for i in range(3) if i != idx]
                coefs = [field.zero] * 3
                coefs[others[0]] = a
                coefs[others[1]] = b
                s = coefs[others[0]] * p.coords[others[0]] \
                    + coefs[others[1]] * p.coords[others[1]]
                coefs[idx] = -s * field.invert(p.coords[idx])
                L = HomPoly(field, 1, {e: c for e, c in
                                       zip([(1, 0, 0), (0, 1, 0), (0, 0, 1)],
                                           coefs) if not c.is_zero()})
                if not L.is_zero():
                    return L
        # all-zero draw; retry
