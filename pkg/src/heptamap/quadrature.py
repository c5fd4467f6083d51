"""Quadrature kernels for hyperelliptic integrals.

Two kinds of integral show up.  Integrals between consecutive real
branch points carry an inverse square root singularity at both ends and
are handled by Gauss-Chebyshev rules with node doubling.  Everything
else (complex path legs, partial segments with at most one singular
endpoint) goes through an adaptive Gauss-Legendre scheme, with the
substitution x = p + (q - p) t^2 applied when an endpoint is a branch
point.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import BadSegment, NoConvergence

#: Node-doubling schedule bounds for the Chebyshev rule.
CHEB_MIN_NODES = 16
CHEB_MAX_NODES = 32768

#: Order of the base Gauss-Legendre panel.
_GL_ORDER = 15
#: Recursion depth cap for adaptive bisection.
_MAX_DEPTH = 40


@lru_cache(maxsize=None)
def _gl_rule(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def cheb_singular(f, a: float, b: float, tol: float = 1e-12,
                  start_nodes: int = CHEB_MIN_NODES) -> float:
    """Integrate f(x) / sqrt((x - a)(b - x)) over (a, b).

    f must accept an ndarray of abscissae.  Nodes are doubled from
    ``start_nodes`` until two consecutive estimates agree within tol
    (absolute, with a relative floor), up to the node cap.
    """
    if not b > a:
        raise BadSegment(f"need a < b, got ({a}, {b})")
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    prev = None
    n = start_nodes
    while n <= CHEB_MAX_NODES:
        k = np.arange(1, n + 1)
        x = mid + half * np.cos((2 * k - 1) * np.pi / (2 * n))
        val = (np.pi / n) * float(np.sum(f(x)))
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        prev = val
        n *= 2
    raise NoConvergence(
        f"Chebyshev rule did not settle within {CHEB_MAX_NODES} nodes"
    )


def adaptive_gauss(f, a: float, b: float, tol: float = 1e-12):
    """Adaptive Gauss-Legendre integral of a (possibly complex valued)
    vectorized function over the real interval [a, b]."""
    if a == b:
        return 0.0

    xg, wg = _gl_rule(_GL_ORDER)

    def panel(lo, hi):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        vals = f(mid + half * xg)
        return half * np.sum(wg * vals)

    def recurse(lo, hi, whole, tol_here, depth):
        mid = 0.5 * (lo + hi)
        left = panel(lo, mid)
        right = panel(mid, hi)
        if abs(left + right - whole) <= tol_here:
            return left + right
        if depth >= _MAX_DEPTH:
            raise NoConvergence(
                "adaptive quadrature exceeded depth cap; integrand is "
                "singular or too rough on the path"
            )
        return recurse(lo, mid, left, tol_here / 2, depth + 1) + recurse(
            mid, hi, right, tol_here / 2, depth + 1
        )

    return recurse(a, b, panel(a, b), tol, 0)


def line_integral(f, path, tol: float = 1e-12,
                  singular_start: bool = False,
                  singular_end: bool = False):
    """Integrate f(x) dx along a polyline of complex nodes.

    The integrand must be vectorized over complex abscissae and single
    valued along the path (branch tracking is the caller's job).  If an
    end of the polyline sits on a branch point, the corresponding flag
    turns on the regularizing substitution x = p + (q - p) t^2 on that
    leg.
    """
    pts = [complex(p) for p in path]
    if len(pts) < 2:
        raise BadSegment("path needs at least two nodes")
    nseg = len(pts) - 1
    total = 0.0 + 0.0j
    tol_leg = tol / nseg
    for i in range(nseg):
        p, q = pts[i], pts[i + 1]
        if p == q:
            continue
        sing_p = singular_start and i == 0
        sing_q = singular_end and i == nseg - 1
        if sing_p and sing_q:
            m = 0.5 * (p + q)
            total += _leg(f, p, m, True, tol_leg / 2)
            total += _leg(f, m, q, False, tol_leg / 2, from_end=True)
        elif sing_q:
            total += _leg(f, p, q, False, tol_leg, from_end=True)
        else:
            total += _leg(f, p, q, sing_p, tol_leg)
    return total


def _leg(f, p, q, singular_at_p, tol, from_end=False):
    d = q - p
    if from_end:
        # substitution regular at q: x = q + (p - q) s^2
        g = lambda s: f(q - d * s * s) * (2.0 * s * d)
        return adaptive_gauss(g, 0.0, 1.0, tol)
    if singular_at_p:
        g = lambda t: f(p + d * t * t) * (2.0 * t * d)
        return adaptive_gauss(g, 0.0, 1.0, tol)
    g = lambda t: f(p + d * t) * d
    return adaptive_gauss(g, 0.0, 1.0, tol)


def gap_integral(xs, coeffs, k: int, tol: float = 1e-12) -> float:
    """Integral of poly(x) / sqrt(|Q(x)|) over the k-th branch gap.

    xs are the six finite branch points in increasing order and
    Q(x) = prod(x - xs).  Gaps k = 1..5 run from xs[k-1] to xs[k]; gap 6
    wraps through infinity (both tails), which converges only for
    deg(poly) <= 1.  coeffs are highest power first, as in polyval; a
    callable may be passed instead to evaluate the numerator directly
    (factored forms stay accurate when branch points cluster).
    """
    xs = np.asarray(xs, float)
    if xs.size != 6 or np.any(np.diff(xs) <= 0):
        raise BadSegment("need six increasing finite branch points")
    if callable(coeffs):
        num = coeffs
    else:
        coeffs = np.atleast_1d(np.asarray(coeffs, float))
        num = lambda x: np.polyval(coeffs, x)
    if k in range(1, 6):
        a, b = xs[k - 1], xs[k]
        others = np.delete(xs, [k - 1, k])

        def g(x):
            h = np.ones_like(x)
            for r in others:
                h = h * (x - r)
            return num(x) / np.sqrt(np.abs(h))

        return cheb_singular(g, a, b, tol)
    if k == 6:
        if callable(coeffs):
            raise BadSegment(
                "gap through infinity needs the coefficient form"
            )
        if coeffs.size > 2:
            raise BadSegment(
                "gap through infinity diverges for quadratic numerators"
            )
        return _wrap_gap_integral(xs, coeffs, tol)
    raise BadSegment(f"gap index {k} outside 1..6")


def _wrap_gap_integral(xs, coeffs, tol) -> float:
    """Both real tails of the gap (xs[5], +inf) u (-inf, xs[0])."""
    x1, x6 = xs[0], xs[5]
    span = x6 - x1
    L = max(1.0, span)

    def g(x):
        q = np.ones_like(x)
        for r in xs:
            q = q * (x - r)
        return np.polyval(coeffs, x) / np.sqrt(np.abs(q))

    # singular quarter next to x6: x = x6 + tau^2
    right_near = adaptive_gauss(
        lambda t: g(x6 + t * t) * 2.0 * t, 0.0, np.sqrt(L), tol / 4
    )
    # singular quarter next to x1: x = x1 - tau^2, oriented toward x1
    Lp = max(1.0, span, 2.0 * abs(x1) + 1.0)
    left_near = adaptive_gauss(
        lambda t: g(x1 - t * t) * 2.0 * t, 0.0, np.sqrt(Lp), tol / 4
    )
    # tails through infinity under x = 1/t; poly(1/t) * t stays bounded
    c1 = coeffs[0] if coeffs.size == 2 else 0.0
    c0 = coeffs[-1]

    def h(t):
        # g(1/t)/t^2 with sqrt(|Q|) ~ |t|^-3, hence the sign(t) factor
        w = np.ones_like(t)
        for r in xs:
            w = w * (1.0 - r * t)
        return np.sign(t) * (c1 + c0 * t) / np.sqrt(np.abs(w))

    X = x6 + L
    Xn = x1 - Lp
    right_far = adaptive_gauss(h, 0.0, 1.0 / X, tol / 4)
    left_far = adaptive_gauss(h, 1.0 / Xn, 0.0, tol / 4)
    return right_near + right_far + left_far + left_near
