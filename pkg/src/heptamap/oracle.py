"""Independent quadrature checks for the conformal correspondence.

Everything in this module is produced by direct numerical integration
on the hyperelliptic curve: side lengths as gap integrals of the
third-kind differential, period normalizations, the marked-point image,
and values of the correspondence itself.  Nothing here evaluates a
theta series or imports the solver, so agreement with the closed-form
pipeline is a genuine cross-check rather than a restatement.

The algebraic model used throughout is the marked chart: the channel
point sits at x = infinity, the six branch values are finite reals
x_1 < ... < x_6, and

    y^2 = prod_j (x - x_j),
    dw  = (x - x_alpha)(x - x_beta) dx / y,

which has residues -/+ 1 at the two points over infinity, making the
channel width pi automatic.  On the closed upper half plane the branch

    y(x) = prod_j sqrt(x - x_j)        (principal square roots)

is continuous away from the branch points, because every cut points
along the negative real direction and the real axis is approached from
above; on gap s it equals i^(6-s) sqrt(|Q|).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import BadSegment, NoConvergence
from .curve import Curve, to_marked_chart
from .quadrature import adaptive_gauss, gap_integral, line_integral

__all__ = [
    "marked_values",
    "cs_coeffs",
    "cs_numerator",
    "sides_by_quadrature",
    "vertices_by_quadrature",
    "holomorphic_coeffs",
    "periods_by_quadrature",
    "marked_point_image",
    "third_kind_residual",
    "cs_by_quadrature",
]


def marked_values(curve: Curve) -> np.ndarray:
    """Six finite branch values of the marked chart, increasing."""
    if curve.chart != "marked":
        curve = to_marked_chart(curve)
    xm = np.asarray(curve.x, dtype=float)
    if xm.size != 6 or not np.all(np.isfinite(xm)) \
            or np.any(np.diff(xm) <= 0):
        raise BadSegment("marked chart needs six increasing finite "
                         "branch values")
    return xm


def cs_coeffs(xm: np.ndarray, alpha: int, beta: int) -> np.ndarray:
    """Numerator of the third-kind differential, highest power first."""
    xa, xb = xm[alpha - 1], xm[beta - 1]
    return np.array([1.0, -(xa + xb), xa * xb])


def cs_numerator(xm: np.ndarray, alpha: int, beta: int, scale: float = 1.0):
    """Numerator of the third-kind differential in factored form.

    Expanding the quadratic cancels catastrophically near clustered
    branch points; the factored product keeps full relative accuracy."""
    xa, xb = xm[alpha - 1], xm[beta - 1]

    def num(z):
        return scale * (z - xa) * (z - xb)

    return num


def _branch_y(xm: np.ndarray):
    """Continuous upper-sheet branch of y on the closed upper half
    plane (vectorized over complex abscissae)."""
    def y(x):
        x = np.asarray(x, dtype=complex)
        out = np.ones_like(x)
        for r in xm:
            out = out * np.sqrt(x - r)
        return out
    return y


def sides_by_quadrature(curve: Curve, alpha: int, beta: int,
                        tol: float = 1e-12) -> np.ndarray:
    """Signed gap integrals of the third-kind numerator against
    1/sqrt(|Q|) over the five finite gaps.

    With the upper-sheet branch, the increment of the correspondence
    over gap s is -sigma i^s times the s-th entry, for one global sign
    sigma shared by all gaps; sigma times the entries gives the signed
    side data H_s (entries past the reentrant corners are negative)."""
    xm = marked_values(curve)
    num = cs_numerator(xm, alpha, beta)
    return np.array([gap_integral(xm, num, s, tol)
                     for s in range(1, 6)])


def _orientation(sides: np.ndarray, alpha: int, beta: int) -> float:
    """Global sign sigma with sigma * sides = signed side data.

    The corner class prescribes the sign of every side; matching the
    first gap entry against the required sign of H_1 pins sigma."""
    want = (1.5 - alpha) * (1.5 - beta)
    return 1.0 if sides[0] * want > 0 else -1.0


def vertices_by_quadrature(curve: Curve, alpha: int, beta: int,
                           tol: float = 1e-12) -> np.ndarray:
    """All six finite corner images, walked along the boundary by
    quadrature from the anchor value i pi at the first branch point.

    The walk uses the continued upper-sheet branch of y, so both the
    magnitudes and the quarter-turn directions of the sides come out of
    the integration; no closed-form side data enters.  The overall
    orientation is pinned by the first side, whose traversal direction
    is part of the corner-class sign pattern."""
    sides = sides_by_quadrature(curve, alpha, beta, tol)
    sigma = _orientation(sides, alpha, beta)
    verts = [complex(0.0, math.pi)]
    for s in range(1, 6):
        verts.append(verts[-1] - sigma * 1j ** s * sides[s - 1])
    return np.asarray(verts)


def holomorphic_coeffs(curve: Curve, tol: float = 1e-12) -> np.ndarray:
    """Coefficient rows N[j] = (const, linear) of the normalized
    holomorphic differentials du_j = (N[j,0] + N[j,1] x) dx / y,
    determined by unit circuits over the gap-2 and gap-4 ovals."""
    xm = marked_values(curve)
    M = np.empty((2, 2))
    for k, gap in enumerate((2, 4)):
        for j in range(2):
            coeffs = np.array([1.0, 0.0]) if j else np.array([1.0])
            M[k, j] = _oval_circuit(xm, coeffs, gap, tol).real
    return np.linalg.solve(M.T, np.eye(2))


def _oval_circuit(xm: np.ndarray, coeffs, gap: int,
                  tol: float = 1e-12) -> complex:
    """Circuit integral of poly(x) dx / y over the oval covering a
    finite gap, with the upper-sheet branch on the way out; the
    differential's oddness doubles the one-way leg."""
    base = gap_integral(xm, coeffs, gap, tol)
    return 2.0 * (-(1j ** gap)) * base


# circuit orientations completing the unit-pairing basis: the first
# b-oval runs against the increasing-x traversal
_B_ORIENT = {1: -1.0, 5: 1.0}


def periods_by_quadrature(curve: Curve, tol: float = 1e-12) -> np.ndarray:
    """Imaginary parts of the b-circuit matrix of the normalized basis:
    the real symmetric period matrix, by quadrature alone."""
    xm = marked_values(curve)
    N = holomorphic_coeffs(curve, tol)
    P = np.empty((2, 2), dtype=complex)
    for bj, gap in enumerate((1, 5)):
        for k in range(2):
            coeffs = np.array([N[k, 1], N[k, 0]])
            P[bj, k] = _B_ORIENT[gap] * _oval_circuit(xm, coeffs, gap,
                                                      tol)
    return (P / 1j).real


def marked_point_image(curve: Curve, tol: float = 1e-12) -> np.ndarray:
    """Abel-Jacobi image of the channel point, integrated from the
    first branch point along the third oval (the tail of the real axis
    left of the smallest branch value, through infinity)."""
    xm = marked_values(curve)
    N = holomorphic_coeffs(curve, tol)
    out = np.empty(2)
    span = max(1.0, xm[5] - xm[0], 2.0 * abs(xm[0]))
    for j in range(2):
        c1, c0 = N[j, 1], N[j, 0]

        def near(t, c1=c1, c0=c0):
            # x = xm[0] - t^2 kills the endpoint singularity
            x = xm[0] - t * t
            q = np.ones_like(x)
            for r in xm:
                q = q * (x - r)
            return (c0 + c1 * x) / np.sqrt(np.abs(q)) * 2.0 * t

        def tail(t, c1=c1, c0=c0):
            # x = -1/t for the stretch reaching the channel point
            x = -1.0 / t
            q = np.ones_like(x)
            for r in xm:
                q = q * (x - r)
            return (c0 + c1 * x) / np.sqrt(np.abs(q)) / (t * t)

        cut = xm[0] - span
        val = adaptive_gauss(near, 0.0, math.sqrt(span), tol)
        val += adaptive_gauss(tail, 1.0e-18, -1.0 / cut, tol)
        # gap 6 carries a real branch of y; orient the image into the
        # standard box
        out[j] = abs(val)
    return out


def third_kind_residual(curve: Curve, alpha: int, beta: int,
                        tol: float = 1e-12) -> float:
    """Joint residual of the bilinear identity for the third-kind part
    of the correspondence differential.

    The a-circuits of dw fix the holomorphic coefficients C; the
    b-circuits of dw - C du must then equal -4 pi i times the
    marked-point image, up to the polar lattice, which the exponential
    comparison removes.  Everything entering the identity comes from
    quadrature."""
    xm = marked_values(curve)
    sides = sides_by_quadrature(curve, alpha, beta, tol)
    sigma = _orientation(sides, alpha, beta)
    num = cs_numerator(xm, alpha, beta, scale=sigma)
    N = holomorphic_coeffs(curve, tol)
    u0 = marked_point_image(curve, tol)
    C = np.array([_oval_circuit(xm, num, g, tol).real
                  for g in (2, 4)])
    worst = 0.0
    for bj, gap in enumerate((1, 5)):
        total = _oval_circuit(xm, num, gap, tol)
        for k in range(2):
            ck = np.array([N[k, 1], N[k, 0]])
            total -= C[k] * _oval_circuit(xm, ck, gap, tol)
        lhs = np.exp(_B_ORIENT[gap] * total)
        rhs = np.exp(-4j * math.pi * u0[bj])
        worst = max(worst, float(abs(lhs - rhs) / abs(rhs)))
    return worst


def _route(xm: np.ndarray, a: complex, b: complex) -> list[complex]:
    """Polyline from a to b inside the closed upper half plane with
    clearance from the branch values."""
    chord = abs(b - a)
    if chord == 0:
        return [a, b]
    worst = math.inf
    for r in xm:
        d = b - a
        t = ((r - a) * d.conjugate()).real / (chord * chord)
        t = min(1.0, max(0.0, t))
        worst = min(worst, abs(r - (a + t * d)))
    if worst > 0.1 * chord:
        return [a, b]
    lift = 0.6 * chord
    return [a, 0.5 * (a + b) + 1j * lift, b]


def cs_by_quadrature(curve: Curve, alpha: int, beta: int, x,
                     tol: float = 1e-12) -> complex:
    """Value of the correspondence at the half-plane point x of the
    marked chart, integrated from the first branch point (anchored at
    i pi) along a path in the closed upper half plane."""
    xm = marked_values(curve)
    x = complex(x)
    if x.imag < -1e-12:
        raise BadSegment("target must lie in the closed upper half "
                         "plane")
    sides = sides_by_quadrature(curve, alpha, beta, tol)
    sigma = _orientation(sides, alpha, beta)

    # anchor at the branch value nearest the target and carry its corner
    # image; a long leg ending inside a cluster of branch values would
    # exhaust the adaptive rule, while the leg from the nearest branch
    # point is never longer than the local singularity clearance
    k = int(np.argmin(np.abs(np.asarray(xm) - x)))
    verts = [complex(0.0, math.pi)]
    for s in range(1, 6):
        verts.append(verts[-1] - sigma * 1j ** s * sides[s - 1])
    if x == complex(xm[k]):
        return verts[k]
    # the integrand depends on coordinate differences only, so work in
    # anchor-centered coordinates: path points built at the local scale
    # keep full relative accuracy inside a branch-point cluster
    xs = np.asarray(xm, dtype=float) - xm[k]
    xt = x - complex(xm[k])
    num = cs_numerator(xs, alpha, beta, scale=sigma)
    y = _branch_y(xs)

    def f(z):
        z = np.asarray(z, dtype=complex)
        return num(z) / y(z)

    path = [0j] + _route(xs, 0j, xt)[1:]
    val = line_integral(f, path, tol, singular_start=True,
                        singular_end=False)
    return verts[k] + val
