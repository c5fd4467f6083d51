"""Real genus-2 hyperelliptic curves with six real branch points.

The curve y^2 = prod(x - x_s) with x_1 < ... < x_6 on the real line
(cyclically, so one of them may sit at infinity) carries three real
ovals over the gaps [x_2, x_3], [x_4, x_5] and [x_6, x_1], and three
coreal ovals over the complementary gaps.  The homology basis is fixed
by taking a_1, a_2 over the first two real ovals and b_1, b_2 over the
lifts of [x_1, x_2] and [x_5, x_6]; holomorphic differentials
du_j = (c_1j x + c_0j) dx / y are normalized against the a-cycles, and
the b-periods form the pure imaginary period matrix Pi = i Omega with
Omega in the cone 0 < Omega_12 < min(Omega_11, Omega_22).

Orientation of the homology cycles is not prescribed in advance: the
eight admissible sign assignments are searched and exactly one class
(up to the global sheet flip, which acts trivially here) produces a
symmetric period matrix inside the cone.  Anything else raises.

The Abel-Jacobi map integrates du from the base branch point x_1.  On
the upper sheet closure the image of a branch point is the half period
attached to its characteristic, and interior points of the upper half
plane land in the quarter-period block H+ of the Jacobian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import (
    BadLabel,
    BadSegment,
    ConeViolation,
    DenominatorZero,
    HumbertDegenerate,
    PathThroughSingularity,
    SignCheckFailed,
    WrongTile,
)
from .quadrature import adaptive_gauss, gap_integral
from .theta import (
    BRANCH_CHARS,
    H_PLUS,
    JH_PLUS,
    RealChar,
    char_from_indices,
    reduce_to_tile,
    theta_char_scaled,
    theta_const,
    tile_of,
)

#: Relative clearance a complex integration path must keep from branch
#: points (in units of the branch point span).
PATH_CLEARANCE = 1e-6


# ---------------------------------------------------------------------------
# charts and points


def _circle_angle(x: float) -> float:
    """Monotone embedding of the extended real line into the circle."""
    if math.isinf(x):
        return np.pi
    return 2.0 * math.atan(x)


def _cyclically_increasing(values) -> bool:
    ang = np.array([_circle_angle(v) for v in values])
    gaps = np.mod(np.diff(np.append(ang, ang[0])), 2.0 * np.pi)
    if np.any(gaps < 1e-15) or np.any(gaps > 2.0 * np.pi - 1e-15):
        return False
    return abs(gaps.sum() - 2.0 * np.pi) < 1e-9


@dataclass(frozen=True)
class Curve:
    """Branch points in cyclic order plus an optional marked point.

    ``x`` lists the six branch points; at most one may be infinite.
    The marked point ``x0``, when present, must lie strictly inside the
    gap from x[5] around to x[0] (the oval carrying the base point).
    """

    x: tuple[float, ...]
    x0: float | None = None
    chart: str = "generic"

    def __post_init__(self):
        if len(self.x) != 6:
            raise BadLabel("a genus-2 real curve needs six branch points")
        n_inf = sum(math.isinf(v) for v in self.x)
        if self.x0 is not None:
            n_inf += math.isinf(self.x0)
        if n_inf > 1:
            raise BadLabel("at most one point may sit at infinity")
        seq = list(self.x) + ([self.x0] if self.x0 is not None else [])
        if not _cyclically_increasing(seq):
            raise BadLabel(
                f"branch points are not in cyclic order: {seq}"
            )

    @property
    def finite(self) -> bool:
        return all(math.isfinite(v) for v in self.x)

    def span(self) -> float:
        xs = [v for v in self.x if math.isfinite(v)]
        return max(xs) - min(xs)


@dataclass(frozen=True)
class SurfacePoint:
    """A point of the curve: base coordinate plus a sheet tag.

    For Im x != 0 the tag +1/-1 selects the lift lying in the H+ / JH+
    quarter-period block; for real x it selects the lift on the closure
    of the corresponding block.
    """

    x: complex
    sheet: int = 1

    def __post_init__(self):
        if self.sheet not in (1, -1):
            raise BadLabel("sheet tag must be +1 or -1")


# ---------------------------------------------------------------------------
# Moebius charts


def mobius_to_zero_one_inf(p: float, q: float, r: float) -> np.ndarray:
    """Real Moebius matrix sending (p, q, r) to (0, 1, inf)."""
    if math.isinf(p):
        return np.array([[0.0, q - r], [1.0, -r]])
    if math.isinf(q):
        return np.array([[1.0, -p], [1.0, -r]])
    if math.isinf(r):
        return np.array([[1.0, -p], [0.0, q - p]])
    return np.array([[q - r, -p * (q - r)], [q - p, -r * (q - p)]])


def mobius_between(src, dst) -> np.ndarray:
    """Moebius matrix carrying the three src points to the three dst
    points (entries real, extended reals allowed)."""
    A = mobius_to_zero_one_inf(*src)
    B = mobius_to_zero_one_inf(*dst)
    return np.linalg.inv(B) @ A


def mobius_apply(M, x):
    a, b = M[0]
    c, d = M[1]
    if np.isscalar(x) or np.asarray(x).ndim == 0:
        xv = complex(x)
        if math.isinf(xv.real) and xv.imag == 0:
            return math.inf if c == 0 else a / c
        den = c * xv + d
        if den == 0:
            return math.inf
        return (a * xv + b) / den
    x = np.asarray(x, complex)
    return (a * x + b) / (c * x + d)


def _mobius_apply_real(M, v: float) -> float:
    r = mobius_apply(M, v)
    if isinstance(r, float):
        return r
    if abs(r.imag) > 1e-12 * max(1.0, abs(r)):
        raise BadSegment("real point left the real axis under the chart map")
    return float(r.real)


def apply_chart(curve: Curve, M, chart: str) -> Curve:
    """Transport a curve through a real Moebius map with positive
    determinant (so cyclic order is preserved)."""
    if np.linalg.det(M) <= 0:
        raise BadSegment("chart maps must be orientation preserving")
    xs = tuple(_mobius_apply_real(M, v) for v in curve.x)
    x0 = None if curve.x0 is None else _mobius_apply_real(M, curve.x0)
    return Curve(xs, x0, chart)


def to_marked_chart(curve: Curve) -> Curve:
    """Send the marked point to infinity via x -> 1/(x0 - x).

    The map is orientation preserving and leaves the six branch points
    finite and increasing.
    """
    if curve.x0 is None or math.isinf(curve.x0):
        raise BadSegment("marked chart needs a finite marked point")
    M = np.array([[0.0, 1.0], [-1.0, curve.x0]])
    return apply_chart(curve, M, "marked")


def to_period_chart(curve: Curve) -> Curve:
    """All-finite chart with the marked point x0 below x1.

    Needed whenever integrals must reach the marked point along the
    real axis without passing through infinity.
    """
    cur = curve
    if cur.x0 is not None and math.isfinite(cur.x0):
        cur = to_marked_chart(cur)
    if not all(math.isfinite(v) for v in cur.x):
        raise BadSegment("branch points must be finite after marking")
    m = max(cur.x) + 0.5 * cur.span() + 1.0
    M = np.array([[0.0, -1.0], [1.0, -m]])
    return apply_chart(cur, M, "period")


# ---------------------------------------------------------------------------
# branch tracking along integration paths


class _TrackedPath:
    """Continuous branch of y = sqrt(prod(x - x_s)) along a polyline.

    Legs are (p, q, mode) with mode 'linear' (x = p + (q-p) t) or
    'sqrt' (x = p + (q-p) t^2, used when p is a branch point: the
    tracked quantity is then y / t, which stays smooth and nonzero).
    t runs over [0, 1] on each leg.
    """

    _TABLE_START = 128
    _TABLE_MAX = 16384

    def __init__(self, roots, legs, seed_y=None):
        self.roots = np.asarray(roots, complex)
        self.legs = legs
        self.tables = []
        y_prev = seed_y
        for i in range(len(legs)):
            ts, ys = self._build_table(i, y_prev)
            self.tables.append((ts, ys))
            # the tracked quantity equals y at t = 1 on either leg kind
            y_prev = ys[-1]
        self._y_end = y_prev

    def _x(self, leg, t):
        p, q, mode = self.legs[leg]
        t = np.asarray(t, float)
        if mode == "sqrt":
            return p + (q - p) * t * t
        return p + (q - p) * t

    def _dx(self, leg, t):
        p, q, mode = self.legs[leg]
        t = np.asarray(t, float)
        if mode == "sqrt":
            return 2.0 * (q - p) * t
        return (q - p) * np.ones_like(t)

    def _q_of_x(self, x):
        x = np.asarray(x, complex)
        out = np.ones_like(x)
        for r in self.roots:
            out = out * (x - r)
        return out

    def _tracked_raw(self, leg, t):
        """Quantity whose square is known: y or z = y/t on sqrt legs."""
        p, q, mode = self.legs[leg]
        x = self._x(leg, t)
        if mode == "sqrt":
            # z^2 = Q(x)/t^2 = (q - p) * Q(x) / (x - p), smooth at t = 0
            val = (q - p) * self._q_of_x(x) / np.where(x == p, 1.0, x - p)
            if np.any(x == p):
                # limit t -> 0: (q - p) * prod over other roots
                others = self.roots[np.abs(self.roots - p) > 0]
                lim = (q - p) * np.prod(p - others)
                val = np.where(x == p, lim, val)
            return np.sqrt(val)
        return np.sqrt(self._q_of_x(x))

    def _build_table(self, leg, y_prev):
        n = self._TABLE_START
        while n <= self._TABLE_MAX:
            ts = np.linspace(0.0, 1.0, n + 1)
            raw = self._tracked_raw(leg, ts)
            ys = np.empty_like(raw)
            ref = y_prev
            ok = True
            for i, rv in enumerate(raw):
                cand = rv if ref is None else (
                    rv if abs(rv - ref) <= abs(rv + ref) else -rv
                )
                if ref is not None:
                    if abs(cand - ref) > 0.8 * max(abs(cand), abs(ref)):
                        ok = False
                        break
                ys[i] = cand
                ref = cand
            if ok:
                return ts, ys
            n *= 2
        raise PathThroughSingularity(
            "branch tracking table failed to resolve; path runs too close "
            "to a branch point"
        )

    def tracked(self, leg, t):
        """Continued value of the tracked quantity at arbitrary t."""
        ts, ys = self.tables[leg]
        t = np.atleast_1d(np.asarray(t, float))
        raw = self._tracked_raw(leg, t)
        idx = np.clip(np.rint(t * (len(ts) - 1)).astype(int), 0, len(ts) - 1)
        ref = ys[idx]
        flip = np.abs(raw - ref) > np.abs(raw + ref)
        out = np.where(flip, -raw, raw)
        bad = np.abs(out - ref) > 0.9 * np.maximum(np.abs(out), np.abs(ref))
        if np.any(bad):
            raise PathThroughSingularity("branch continuation lost track")
        return out

    def integrate(self, numer_coeffs, tol):
        """Integral of poly(x) dx / y along the whole path."""
        total = 0.0 + 0.0j
        tol_leg = tol / max(1, len(self.legs))
        for i, (p, q, mode) in enumerate(self.legs):
            if mode == "sqrt":
                # dx/y = 2 (q - p) t dt / (t z) = 2 (q - p) dt / z
                def f(t, i=i, p=p, q=q):
                    x = self._x(i, t)
                    z = self.tracked(i, t)
                    return np.polyval(numer_coeffs, x) * 2.0 * (q - p) / z
            else:
                def f(t, i=i, p=p, q=q):
                    x = self._x(i, t)
                    y = self.tracked(i, t)
                    return np.polyval(numer_coeffs, x) * (q - p) / y
            total += adaptive_gauss(f, 0.0, 1.0, tol_leg)
        return total

    @property
    def end_value(self):
        return self._y_end


def _segment_clearance(p: complex, q: complex, roots) -> float:
    """Minimum distance from the open segment (p, q) to the roots."""
    d = q - p
    L2 = abs(d) ** 2
    best = math.inf
    for r in roots:
        t = ((r - p) * np.conj(d)).real / L2 if L2 > 0 else 0.0
        t = min(1.0, max(0.0, t))
        best = min(best, abs(p + t * d - r))
    return best


# ---------------------------------------------------------------------------
# periods


@dataclass(eq=False)
class PeriodData:
    """Normalized differentials and period matrix of a finite-chart curve.

    ``coeffs[:, j]`` holds the polyval coefficients (c1, c0) of the
    numerator of du_j.  ``eta`` records the homology orientation signs
    (a1, a2, b1, b2) found by the cone search, with the a1 sign gauged
    to +1.
    """

    curve: Curve
    omega: np.ndarray
    coeffs: np.ndarray
    eta: tuple[int, int, int, int]
    sym_defect: float
    _cache: dict = field(default_factory=dict)

    @property
    def Pi(self) -> np.ndarray:
        return 1j * self.omega


def _cone_ok(Om) -> bool:
    return (
        Om[0, 0] > 0
        and Om[1, 1] > 0
        and Om[0, 1] > 0
        and Om[0, 1] < min(Om[0, 0], Om[1, 1])
        and np.linalg.det(Om) > 0
    )


#: boundary gaps carrying the a- and b-cycles, as gap indices
A_GAPS = (2, 4)
B_GAPS = (1, 5)

# one-way integral of poly/y over gap k on the reference sheet equals
# -i^k times the real kernel integral; these are the resulting factors
_A_FACTORS = (1.0, -1.0)      # gaps 2, 4
_B_FACTOR = -1j               # gaps 1, 5 share it


def period_data(curve: Curve, tol: float = 1e-12) -> PeriodData:
    """Normalize du against the a-cycles and build Omega.

    Raises ConeViolation unless exactly one orientation class yields a
    symmetric period matrix in the cone.
    """
    if not curve.finite:
        raise BadSegment("period computation needs an all-finite chart")
    xs = np.asarray(curve.x, float)
    basis = (np.array([1.0, 0.0]), np.array([1.0]))  # x and 1

    A_raw = np.array(
        [[gap_integral(xs, b, k, tol) for b in basis] for k in A_GAPS]
    )
    B_raw = np.array(
        [[gap_integral(xs, b, k, tol) for b in basis] for k in B_GAPS]
    )

    candidates = []
    for ea2, eb1, eb2 in product((1, -1), repeat=3):
        eta = (1, ea2, eb1, eb2)
        Ma = np.array(
            [
                2.0 * eta[0] * _A_FACTORS[0] * A_raw[0],
                2.0 * eta[1] * _A_FACTORS[1] * A_raw[1],
            ]
        )
        try:
            C = np.linalg.inv(Ma)
        except np.linalg.LinAlgError:
            continue
        Mb = np.array(
            [
                2.0 * eta[2] * _B_FACTOR * B_raw[0],
                2.0 * eta[3] * _B_FACTOR * B_raw[1],
            ]
        )
        Pi = Mb @ C
        Om = Pi.imag
        scale = np.max(np.abs(Om)) or 1.0
        defect = abs(Om[0, 1] - Om[1, 0]) / scale
        if defect < 1e-7 and _cone_ok(0.5 * (Om + Om.T)):
            candidates.append((eta, C, 0.5 * (Om + Om.T), defect))

    if not candidates:
        raise ConeViolation(
            "no homology orientation yields a symmetric period matrix in "
            "the cone"
        )
    if len(candidates) > 1:
        raise ConeViolation(
            "homology orientation is ambiguous for this branch set"
        )
    eta, C, Om, defect = candidates[0]
    return PeriodData(curve, Om, C, eta, defect)


def half_period_from_omega(omega, s: int) -> np.ndarray:
    """Exact table image of branch point s on the upper sheet closure."""
    if s not in BRANCH_CHARS:
        raise BadLabel(f"branch index {s} outside 1..6")
    ch = BRANCH_CHARS[s]
    return RealChar(
        tuple(float(b) for b in ch.eps), tuple(float(b) for b in ch.epsp)
    ).point(omega)


def half_period(pd: PeriodData, s: int) -> np.ndarray:
    return half_period_from_omega(pd.omega, s)


def aj_branch_points(pd: PeriodData, tol: float = 1e-12) -> np.ndarray:
    """Abel-Jacobi images of all six branch points by chained gap
    quadrature along the boundary of the upper sheet (reference
    orientation; images match the half-period table modulo the lattice,
    which absorbs the global sheet sign)."""
    xs = np.asarray(pd.curve.x, float)
    out = np.zeros((6, 2), complex)
    acc = np.zeros(2, complex)
    for k in range(1, 6):
        step = np.array(
            [
                -(1j ** k) * gap_integral(xs, pd.coeffs[:, j], k, tol)
                for j in (0, 1)
            ]
        )
        acc = acc + step
        out[k] = acc
    return out


# ---------------------------------------------------------------------------
# Abel-Jacobi map


def _build_path(curve: Curve, target: complex) -> list:
    """Polyline from the base branch point to the target, clearing the
    real axis through the upper half plane."""
    xs = np.asarray(curve.x, float)
    span = curve.span()
    x1 = xs[0]
    h = 0.35 * span
    tgt = complex(target)
    legs = []
    if tgt.imag >= h:
        legs.append((x1, x1 + 1j * h, "sqrt"))
        legs.append((x1 + 1j * h, tgt, "linear"))
    else:
        top = complex(tgt.real, h)
        legs.append((x1, x1 + 1j * h, "sqrt"))
        legs.append((x1 + 1j * h, top, "linear"))
        legs.append((top, tgt, "linear"))
    floor = PATH_CLEARANCE * span
    tgt_clear = min(abs(tgt - r) for r in xs)
    for i, (p, q, _) in enumerate(legs):
        if i == 0:
            continue  # the first leg starts on a branch point by design
        clr = _segment_clearance(p, q, xs)
        # the last leg may legitimately approach the axis as close as
        # the target itself sits to the branch points
        allowed = floor if i < len(legs) - 1 else min(floor, 0.9 * tgt_clear)
        if clr < allowed:
            raise PathThroughSingularity(
                "integration path passes too close to a branch point; "
                "move the target or integrate in another chart"
            )
    if tgt_clear < floor:
        raise PathThroughSingularity(
            "target sits too close to a branch point"
        )
    return legs


def _closure_distance(u, Omega, block) -> float:
    """Distance of the reduced characteristic of u from the closed box
    of a quarter-period block, on the mod-2 circle."""
    c = RealChar.from_point(u, Omega)

    def circ_dist(v, lo, hi):
        # distance from v to [lo, hi] modulo 2
        d = 0.0 if lo <= v <= hi else min(
            min(abs(v - lo + 2 * k) for k in (-1, 0, 1)),
            min(abs(v - hi + 2 * k) for k in (-1, 0, 1)),
        )
        return d

    eps = np.mod(np.asarray(c.eps), 2.0)    # in [0, 2)
    epsp = np.mod(np.asarray(c.epsp), 2.0)
    if block is H_PLUS:
        lo_e, hi_e, lo_p, hi_p = 1.0, 2.0, 0.0, 1.0
    else:
        lo_e, hi_e, lo_p, hi_p = 0.0, 1.0, 1.0, 2.0
    d = 0.0
    for v in eps:
        d = max(d, circ_dist(float(v), lo_e, hi_e))
    for v in epsp:
        d = max(d, circ_dist(float(v), lo_p, hi_p))
    return d


def aj_point(pd: PeriodData, p: SurfacePoint, tol: float = 1e-11) -> np.ndarray:
    """Abel-Jacobi image of a surface point, reduced to the tile cell.

    Branch points return their table half-periods exactly.  Otherwise
    the integral runs from the base branch point along an upper-half-
    plane polyline, and the sheet tag picks between the two lifts u and
    -u by matching quarter-period blocks (closures for real x).
    """
    xs = np.asarray(pd.curve.x, float)
    span = pd.curve.span()
    tgt = complex(p.x)
    if tgt.imag < -1e-14:
        raise BadSegment("targets live in the closed upper half plane")
    for s, xv in enumerate(xs, start=1):
        if abs(tgt - xv) < 1e-12 * span:
            return half_period(pd, s)
    if abs(tgt.imag) < 1e-14 and (tgt.real < xs[0] or tgt.real > xs[5]):
        raise BadSegment(
            "real targets beyond the outer branch points belong to the "
            "base oval; use aj_third_oval in the period chart"
        )
    legs = _build_path(pd.curve, tgt)
    path = _TrackedPath(xs, legs)
    u = np.array(
        [path.integrate(pd.coeffs[:, j], tol) for j in (0, 1)]
    )
    want = H_PLUS if p.sheet == 1 else JH_PLUS
    cands = [reduce_to_tile(u, pd.omega), reduce_to_tile(-u, pd.omega)]
    if abs(tgt.imag) < 1e-12 * span:
        d = [_closure_distance(c, pd.omega, want) for c in cands]
        return cands[int(np.argmin(d))]
    for c in cands:
        lab = tile_of(c, pd.omega)
        if not lab.boundary and lab.same_block(want):
            return c
    # interior target whose image sits numerically on a tile wall
    d = [_closure_distance(c, pd.omega, want) for c in cands]
    if min(d) < 1e-6:
        return cands[int(np.argmin(d))]
    raise WrongTile(
        "neither lift of the target lands in the requested block"
    )


def aj_third_oval(pd: PeriodData, x_star: float, tol: float = 1e-11) -> np.ndarray:
    """Abel-Jacobi image of a base-oval point, period chart only.

    The target must satisfy x0 <= x_star < x1.  The image is real with
    both components in (0, 1/2) on the upper-closure lift, which is the
    representative returned.
    """
    xs = np.asarray(pd.curve.x, float)
    if pd.curve.x0 is None or not (pd.curve.x0 <= x_star < xs[0]):
        raise BadSegment(
            "base-oval integration needs x0 <= x_star < x1 in an "
            "all-finite chart"
        )
    if xs[0] - x_star < 1e-13 * pd.curve.span():
        return np.zeros(2)
    legs = [(xs[0], complex(x_star), "sqrt")]
    path = _TrackedPath(xs, legs)
    u = np.array([path.integrate(pd.coeffs[:, j], tol) for j in (0, 1)])
    if np.max(np.abs(u.imag)) > 1e-8 * max(1.0, np.max(np.abs(u))):
        raise PathThroughSingularity("base-oval image failed to be real")
    u = u.real
    if np.all(u < 0):
        u = -u
    if not np.all(u > 0):
        raise SignCheckFailed(
            "base-oval image has mixed component signs; the curve data "
            "is inconsistent"
        )
    return u


# ---------------------------------------------------------------------------
# Rosenhain invariants


def _const_char(eps, epsp):
    from .theta import IntChar

    return IntChar(tuple(eps), tuple(epsp))


_ROS = {
    "A": _const_char((0, 0), (0, 0)),
    "B": _const_char((0, 0), (0, 1)),
    "C": _const_char((0, 0), (1, 0)),
    "D": _const_char((0, 0), (1, 1)),
    "E": _const_char((1, 1), (0, 0)),
    "F": _const_char((1, 1), (1, 1)),
    "G": _const_char((1, 0), (0, 0)),
    "H": _const_char((1, 0), (0, 1)),
    "I": _const_char((0, 1), (0, 0)),
}

#: characteristic whose theta constant vanishes on the Humbert boundary
HUMBERT_CHAR = _ROS["F"]


def _ros_consts(Omega, tol):
    Pi = 1j * np.asarray(Omega, float)
    vals = {k: theta_const(ch, Pi, tol).real for k, ch in _ROS.items()}
    scale = max(abs(v) for v in vals.values())
    return vals, scale


def rosenhain(Omega, tol: float = 1e-13, degeneracy_tol: float = 1e-7):
    """Branch points (x3, x4, x5) of the curve with x1 = 0, x2 = 1,
    x6 = infinity realizing the period matrix i Omega.

    Raises HumbertDegenerate when the even theta constants needed here
    vanish (the matrix sits on a product-of-elliptic-curves stratum),
    and ConeViolation if the recovered points are not ordered.
    """
    t, scale = _ros_consts(Omega, tol)
    small = degeneracy_tol * scale
    if any(abs(t[k]) < small for k in ("A", "B", "C", "D", "E", "F")):
        raise HumbertDegenerate(
            "even theta constants vanish; period matrix is degenerate"
        )
    x3 = (t["A"] * t["B"] / (t["C"] * t["D"])) ** 2
    x4 = (t["B"] * t["E"] / (t["C"] * t["F"])) ** 2
    x5 = (t["A"] * t["E"] / (t["F"] * t["D"])) ** 2
    if not (1.0 < x3 < x4 < x5):
        raise ConeViolation(
            f"recovered branch points are not ordered: {x3}, {x4}, {x5}"
        )
    return x3, x4, x5


def rosenhain_complement(Omega, tol: float = 1e-13):
    """Independent second route: the values (1 - x3, 1 - x4, 1 - x5)
    from a different set of theta constants."""
    t, scale = _ros_consts(Omega, tol)
    c3 = -((t["G"] * t["H"]) ** 2) / ((t["C"] * t["D"]) ** 2)
    c4 = -((t["I"] * t["H"]) ** 2) / ((t["C"] * t["F"]) ** 2)
    c5 = -((t["I"] * t["G"]) ** 2) / ((t["F"] * t["D"]) ** 2)
    return c3, c4, c5


def curve_from_omega(Omega, x0: float | None = None,
                     tol: float = 1e-13) -> Curve:
    """Canonical-chart curve (0, 1, x3, x4, x5, inf) for Pi = i Omega."""
    x3, x4, x5 = rosenhain(Omega, tol)
    return Curve((0.0, 1.0, x3, x4, x5, math.inf), x0, "canonical")


# ---------------------------------------------------------------------------
# projection to the sphere by theta quotients


def _arc_expected_sign(s: int, j: int, l: int, m: int) -> int:
    """Sign of the normalized coordinate of branch point m when (s, j, l)
    go to (0, 1, inf): positive on the arc from s through j to l,
    negative on the arc from l back to s."""
    order = []
    k = s
    while True:
        k = k % 6 + 1
        if k == l:
            break
        order.append(k)
    return 1 if m in order or m == j else -1


def sphere_coordinate(omega, u, norm=(1, 2, 6), k: int | None = None,
                      tol: float = 1e-13, cache: dict | None = None) -> complex:
    """Coordinate of the point with Jacobian image u, normalized so the
    branch points (s, j, l) = norm sit at 0, 1, infinity.

    The two-valued sign in the closed form is resolved once per
    normalization by checking the remaining branch points against their
    known arc positions; SignCheckFailed means no sign works.
    """
    s, j, l = norm
    if len({s, j, l}) != 3 or not all(1 <= v <= 6 for v in (s, j, l)):
        raise BadLabel("normalization labels must be three distinct "
                       "branch indices")
    free = sorted(set(range(1, 7)) - {s, j, l})
    if k is not None:
        if k in (s, j, l):
            raise BadLabel("the free index must avoid the normalization "
                           "labels")
        free = [k] + [m for m in free if m != k]

    if cache is None:
        cache = {}
    Pi = 1j * np.asarray(omega, dtype=float)
    for kk in free:
        key = ("proj", s, j, l, kk)
        if key not in cache:
            cache[key] = _calibrate_projection(omega, s, j, l, kk, tol)
        sign, const_ratio, c_num, c_den = cache[key]
        num, sc_n = theta_char_scaled(c_num, u, Pi, tol)
        den, sc_d = theta_char_scaled(c_den, u, Pi, tol)
        if abs(den) < 1e-10 * sc_d:
            if abs(num) < 1e-8 * sc_n:
                continue  # removable 0/0 at the free branch point
            raise DenominatorZero(
                "projection evaluated at the branch point sent to infinity"
            )
        return sign * const_ratio * (num / den) ** 2
    raise DenominatorZero(
        "projection is 0/0 for every admissible free index"
    )


def project_to_sphere(pd: PeriodData, u, norm=(1, 2, 6), k: int | None = None,
                      tol: float = 1e-13) -> complex:
    return sphere_coordinate(pd.omega, u, norm, k, tol, pd._cache)


def _calibrate_projection(omega, s, j, l, k, tol):
    Pi = 1j * np.asarray(omega, dtype=float)
    c_num0 = char_from_indices([l, k, j, 3, 5])
    c_den0 = char_from_indices([s, k, j, 3, 5])
    t_num0 = theta_const(c_num0, Pi, tol)
    t_den0 = theta_const(c_den0, Pi, tol)
    if abs(t_den0) == 0:
        raise DenominatorZero("normalization constant vanishes")
    const_ratio = (t_num0 / t_den0) ** 2
    c_num = char_from_indices([s, k, 3, 5])
    c_den = char_from_indices([l, k, 3, 5])

    votes = []
    for m in sorted(set(range(1, 7)) - {s, j, l}):
        um = half_period_from_omega(omega, m)
        num, sc_n = theta_char_scaled(c_num, um, Pi, tol)
        den, sc_d = theta_char_scaled(c_den, um, Pi, tol)
        if abs(num) < 1e-8 * sc_n or abs(den) < 1e-8 * sc_d:
            continue
        raw = const_ratio * (num / den) ** 2
        if abs(raw.imag) > 1e-6 * abs(raw):
            raise SignCheckFailed(
                "projection of a branch point failed to be real"
            )
        expected = _arc_expected_sign(s, j, l, m)
        votes.append(1 if np.sign(raw.real) == expected else -1)
    if not votes:
        raise SignCheckFailed("no branch point available to fix the sign")
    if len(set(votes)) != 1:
        raise SignCheckFailed(
            "branch points disagree about the projection sign"
        )
    return votes[0], const_ratio, c_num, c_den
