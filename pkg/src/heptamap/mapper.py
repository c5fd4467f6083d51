"""Parameter solving and the conformal correspondence itself.

Solving runs in one direction only: given a target heptagon, Newton
continuation in (Omega, u1) matches the four free side lengths, after
which every map evaluation is a local Newton correction along the theta
divisor.  Forward (heptagon to half plane) walks in w, inverse walks in
the sphere coordinate; both keep the running point exactly on the
divisor and accumulate the channel-map increment by principal
logarithms, so no global branch bookkeeping is ever needed.
"""

from __future__ import annotations

import cmath
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import (AtPole, ContinuationStalled, DenominatorZero,
                     InvalidHeptagon, LeftValidRegion, NoConvergence,
                     NoRootInBracket, OutsideHeptagon, SignCheckFailed,
                     SingularSystem, WrongTile)
from .theta import (BRANCH_CHARS, char_from_indices, H_PLUS,
                    lattice_distance, RealChar, reduce_to_tile,
                    theta_char, theta_char_scaled, theta_grad,
                    theta_with_grad, theta_with_hess, tile_of)
from .curve import (Curve, SurfacePoint, _calibrate_projection, aj_point,
                    half_period_from_omega, mobius_apply,
                    mobius_to_zero_one_inf, period_data, rosenhain,
                    sphere_coordinate, to_marked_chart)
from .heptagon import Heptagon, contains_point, distance_to_boundary

_CHI35 = char_from_indices([3, 5])
_CHI3 = BRANCH_CHARS[3]

# default continuation anchor: a parameter point far from every
# degeneration, where the forward side map is easy to evaluate
ANCHOR_OMEGA = np.array([[2.0, 0.5], [0.5, 1.5]])
ANCHOR_U1 = 0.2

_U1_MARGIN = 1e-3          # keep u1 away from the ends of (0, 1/2)
_MAX_W_STEP = 0.4          # continuation chord length in w
_MAX_U_STEP = 0.35         # divisor walk node spacing
_ARG_GUARD = 2.6           # reject log increments this close to the cut
_POLE_REL = 1e-11          # relative scale below which theta counts as 0


# ---------------------------------------------------------------------------
# closed-form side lengths for given (Omega, u1)


def solve_u0_second(Omega, u1: float, tol: float = 1e-13,
                    hint: float | None = None) -> float:
    """Second coordinate of the channel-end image: the root of
    theta[K]((u1, t), i Omega) in t on (0, 1/2).

    A 64 interval scan must find exactly one sign change; anything else
    raises NoRootInBracket.  A hint from a nearby parameter point skips
    the scan when the local bracket still captures the root.
    """
    Omega = np.asarray(Omega, dtype=float)
    Pi = 1j * Omega

    def f(t: float) -> float:
        return theta_char(_CHI35, np.array([u1, t]), Pi, tol).real

    lo, hi = 1e-9, 0.5 - 1e-9
    if hint is not None and lo < hint < hi:
        a = max(lo, hint - 0.03)
        b = min(hi, hint + 0.03)
        fa, fb = f(a), f(b)
        if fa == 0.0:
            return a
        if fb == 0.0:
            return b
        if fa * fb < 0:
            return float(brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps))

    grid = np.linspace(lo, hi, 65)
    vals = np.array([f(t) for t in grid])
    brackets = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            brackets.append((grid[i], grid[i]))
        elif vals[i] * vals[i + 1] < 0:
            brackets.append((grid[i], grid[i + 1]))
    if vals[-1] == 0.0:
        brackets.append((grid[-1], grid[-1]))
    if len(brackets) != 1:
        raise NoRootInBracket(
            f"expected exactly one sign change of the cut-out function "
            f"on (0, 1/2), found {len(brackets)}"
        )
    a, b = brackets[0]
    if a == b:
        return float(a)
    return float(brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps))


def _wedge_row(Omega, u0, gamma: int, tol: float):
    """One wedge condition at branch point gamma, written as the complex
    linear equation  T . C = rhs  with T the divisor tangent (-g2, g1).

    At gamma = 5 both edge-ratio factors vanish identically (the label
    pair {3, 5} is the vanishing pair of the cut-out characteristic), so
    the tangential log derivative is a 0/0 limit along the divisor; it
    is evaluated by second-order expansion, which needs Hessians."""
    Pi = 1j * Omega
    ug = half_period_from_omega(Omega, gamma)
    _, g, H35, _ = theta_with_hess(_CHI35, ug, Pi, tol)
    vp, gp, Hp, sp = theta_with_hess(_CHI3, ug + u0, Pi, tol)
    vm, gm, Hm, sm = theta_with_hess(_CHI3, ug - u0, Pi, tol)
    T = np.array([-g[1], g[0]])
    if abs(vp) < 1e-8 * sp and abs(vm) < 1e-8 * sm:
        a = complex(T @ gp)
        b = complex(T @ gm)
        tn = float(np.linalg.norm(T))
        if abs(a) < 1e-12 * tn * sp or abs(b) < 1e-12 * tn * sm:
            raise SingularSystem(
                "edge-ratio factors vanish to second order at a corner"
            )
        gn = float(np.linalg.norm(g))
        nvec = np.conj(g) / gn
        mu = -complex(T @ H35 @ T) / gn
        a2 = complex(T @ Hp @ T) + mu * complex(nvec @ gp)
        b2 = complex(T @ Hm @ T) + mu * complex(nvec @ gm)
        return T, -0.5 * (a2 / a - b2 / b)
    if abs(vp) < 1e-9 * sp or abs(vm) < 1e-9 * sm:
        raise SingularSystem(
            "edge-ratio log derivative blows up at a corner image"
        )
    h = gp / vp - gm / vm
    return T, -complex(T @ h)


def solve_C(Omega, u0, alpha: int, beta: int, tol: float = 1e-13):
    """Real translation vector C from the two wedge conditions.

    Returns (C, residual); the stacked real 4x2 system must be
    consistent, and a rank drop raises SingularSystem.
    """
    Omega = np.asarray(Omega, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    rows, rhs = [], []
    for gamma in (alpha, beta):
        row, b = _wedge_row(Omega, u0, gamma, tol)
        rows.append(row)
        rhs.append(b)
    A = np.array(rows)
    b = np.array(rhs)
    A4 = np.vstack([A.real, A.imag])
    b4 = np.concatenate([b.real, b.imag])
    sing = np.linalg.svd(A4, compute_uv=False)
    if sing[-1] < 1e-12 * sing[0]:
        raise SingularSystem("wedge conditions are rank deficient")
    C, *_ = np.linalg.lstsq(A4, b4, rcond=None)
    scale = sing[0] * (np.linalg.norm(C) + 1.0) + np.linalg.norm(b4)
    residual = float(np.linalg.norm(A4 @ C - b4) / scale)
    return C, residual


def _forward(Omega, u1, alpha, beta, tol, hint=None):
    u2 = solve_u0_second(Omega, u1, tol, hint)
    u0 = np.array([u1, u2])
    C, wres = solve_C(Omega, u0, alpha, beta, tol)
    O = np.asarray(Omega, dtype=float)
    H1 = 0.5 * (C[0] * O[0, 0] + C[1] * O[0, 1] + 2 * math.pi * (1 - 2 * u1))
    H2 = 0.5 * C[0]
    H4 = -0.5 * C[1]
    H5 = -0.5 * (C[0] * O[0, 1] + C[1] * O[1, 1] - 4 * math.pi * u2)
    H3 = H1 + H5 - math.pi
    H = np.array([H1, H2, H3, H4, H5])
    return H, {"u0": u0, "C": C, "wedge_residual": wres}


def forward_sides(Omega, u1: float, alpha: int, beta: int,
                  tol: float = 1e-13, hint: float | None = None):
    """Side lengths of the heptagon cut out by (Omega, u1) for corner
    labels (alpha, beta).  Returns (Heptagon, aux) with aux carrying u0,
    C and the wedge residual."""
    H, aux = _forward(Omega, u1, alpha, beta, tol, hint)
    return Heptagon(alpha, beta, tuple(H)), aux


# ---------------------------------------------------------------------------
# parameter continuation


def _xi_valid(xi) -> bool:
    o11, o12, o22, u1 = xi
    if not (o11 > 0 and o22 > 0):
        return False
    if not (1e-8 < o12 < min(o11, o22)):
        return False
    return _U1_MARGIN < u1 < 0.5 - _U1_MARGIN


# evaluation failures that mark a parameter point as unusable rather
# than the whole solve as broken
_EVAL_ERRORS = (SingularSystem, NoConvergence, DenominatorZero, AtPole)


def _fd_jacobian(fun, xi, f0):
    J = np.empty((4, 4))
    for i in range(4):
        h = 1e-6 * max(abs(xi[i]), 0.05)
        xp = xi.copy()
        xm = xi.copy()
        xp[i] += h
        xm[i] -= h
        cols = []
        if _xi_valid(xp):
            cols.append((xp, f0, h))
        if _xi_valid(xm):
            cols.append((xm, f0, -h))
        if len(cols) == 2:
            try:
                J[:, i] = (fun(xp) - fun(xm)) / (2 * h)
                continue
            except _EVAL_ERRORS:
                pass
        for xq, fq, hq in cols:
            try:
                J[:, i] = (fun(xq) - fq) / hq
                break
            except _EVAL_ERRORS:
                continue
        else:
            raise SingularSystem(
                "no usable finite-difference stencil at the current "
                "parameter point"
            )
    return J


def _newton_leg(fun, xi, target, rtol, max_iter=14):
    """Damped Newton for fun(xi) = target inside the valid region.
    Returns (ok, xi, reason)."""
    xi = np.asarray(xi, dtype=float).copy()
    f = fun(xi)
    for _ in range(max_iter):
        r = f - target
        if np.max(np.abs(r)) <= rtol:
            return True, xi, ""
        try:
            J = _fd_jacobian(fun, xi, f)
            delta = np.linalg.solve(J, -r)
        except (np.linalg.LinAlgError, *_EVAL_ERRORS):
            return False, xi, "singular"
        accepted = False
        all_guard = True
        for lam in (1.0, 0.5, 0.25, 0.125, 0.0625):
            xt = xi + lam * delta
            if not _xi_valid(xt):
                continue
            all_guard = False
            try:
                ft = fun(xt)
            except _EVAL_ERRORS:
                continue
            rt = ft - target
            if (np.linalg.norm(rt) < (1 - 0.2 * lam) * np.linalg.norm(r)
                    or np.max(np.abs(rt)) <= rtol):
                xi, f = xt, ft
                accepted = True
                break
        if not accepted:
            return False, xi, "guards" if all_guard else "stall"
    return bool(np.max(np.abs(f - target)) <= rtol), xi, "maxiter"


def solve_parameters(hept: Heptagon, tol: float = 1e-9,
                     anchor=None, build_seed_table: bool = True,
                     seed_tol: float = 1e-11) -> "MapParams":
    """Find (Omega, u0, C) whose heptagon has the prescribed sides.

    Continuation runs from a fixed interior anchor toward the target
    side vector, with a damped Newton solve at each node and adaptive
    step control; the final polish matches the four free sides to well
    below tol.
    """
    viols = hept.validate(1e-8)
    if viols:
        raise InvalidHeptagon("target heptagon is invalid: "
                              + "; ".join(viols))
    alpha, beta = hept.alpha, hept.beta
    target = np.array([hept.H[0], hept.H[1], hept.H[3], hept.H[4]])
    if anchor is None:
        xi = np.array([ANCHOR_OMEGA[0, 0], ANCHOR_OMEGA[0, 1],
                       ANCHOR_OMEGA[1, 1], ANCHOR_U1])
    else:
        xi = np.asarray(anchor, dtype=float).copy()
        if not _xi_valid(xi):
            raise LeftValidRegion("anchor lies outside the valid region")

    state: dict = {"hint": None}
    ftol = 1e-13

    def fvec(x):
        Om = np.array([[x[0], x[1]], [x[1], x[2]]])
        H, aux = _forward(Om, x[3], alpha, beta, ftol, state["hint"])
        state["hint"] = aux["u0"][1]
        return np.array([H[0], H[1], H[3], H[4]])

    xi0 = xi.copy()
    F0 = fvec(xi)
    inner = min(1e-8, tol)

    def run_path(path, xi):
        tau, step = 0.0, 0.25
        while tau < 1.0 - 1e-12:
            t_next = min(1.0, tau + step)
            ok, xi_try, why = _newton_leg(fvec, xi, path(t_next), inner)
            if ok:
                xi, tau = xi_try, t_next
                step = min(0.5, step * 1.6)
            else:
                step *= 0.5
                if step < 1e-4:
                    if why == "guards":
                        raise LeftValidRegion(
                            "continuation pushed the parameters out of "
                            f"the cone/interval region at tau={tau:.4f}"
                        )
                    raise ContinuationStalled(
                        f"side-length continuation stalled at "
                        f"tau={tau:.4f}"
                    )
        return xi

    # a straight segment in side space can graze a fold of the
    # parametrization; blending the magnitudes geometrically bends the
    # path away while keeping every component's sign
    signs = np.sign(target)
    paths = [
        lambda t: (1 - t) * F0 + t * target,
        lambda t: signs * np.abs(F0) ** (1 - t) * np.abs(target) ** t,
    ]
    err = None
    for path in paths:
        state["hint"] = None
        try:
            xi = run_path(path, xi0.copy())
            break
        except (ContinuationStalled, LeftValidRegion) as exc:
            err = exc
    else:
        raise err
    final_tol = max(0.03 * tol, 2e-12)
    ok, xi, why = _newton_leg(fvec, xi, target, final_tol, max_iter=20)
    if not ok:
        raise ContinuationStalled(
            f"final polish failed to reach {final_tol:.1e} ({why})"
        )

    Omega = np.array([[xi[0], xi[1]], [xi[1], xi[2]]])
    H, aux = _forward(Omega, xi[3], alpha, beta, ftol, state["hint"])
    model = Heptagon(alpha, beta, tuple(H))
    residual = float(max(np.max(np.abs(np.array(
        [H[0], H[1], H[3], H[4]]) - target)), aux["wedge_residual"]))
    params = MapParams(alpha=alpha, beta=beta, omega=Omega,
                       u0=aux["u0"], C=aux["C"], anchor=1j * math.pi,
                       residual=residual, heptagon=model, seeds=(),
                       curve=None)
    if build_seed_table:
        _attach_seed_table(params, seed_tol)
    return params


# ---------------------------------------------------------------------------
# parameter container and seed table


@dataclass(frozen=True)
class Seed:
    """One precomputed correspondence: u on the divisor, w in the
    heptagon, x in the canonical chart."""
    u: tuple[complex, complex]
    w: complex
    x: complex
    kind: str
    label: int = 0

    @property
    def uvec(self) -> np.ndarray:
        return np.array(self.u, dtype=complex)


@dataclass
class MapParams:
    alpha: int
    beta: int
    omega: np.ndarray
    u0: np.ndarray
    C: np.ndarray
    anchor: complex
    residual: float
    heptagon: Heptagon
    seeds: tuple[Seed, ...]
    curve: Curve | None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def Pi(self) -> np.ndarray:
        return 1j * self.omega

    @property
    def u0c(self) -> np.ndarray:
        return self.u0.astype(complex)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "Omega": [[float(v) for v in row] for row in self.omega],
            "u0": [float(v) for v in self.u0],
            "C": [float(v) for v in self.C],
            "anchor": [self.anchor.real, self.anchor.imag],
            "residual": self.residual,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), indent=2, **kw)

    @classmethod
    def from_dict(cls, d: dict, build_seed_table: bool = True,
                  seed_tol: float = 1e-11) -> "MapParams":
        try:
            alpha, beta = int(d["alpha"]), int(d["beta"])
            Omega = np.array(d["Omega"], dtype=float)
            u0 = np.array(d["u0"], dtype=float)
            C = np.array(d["C"], dtype=float)
            anchor = complex(d["anchor"][0], d["anchor"][1])
            residual = float(d.get("residual", 0.0))
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ValueError(f"malformed parameter record: {exc}") from exc
        if Omega.shape != (2, 2) or u0.shape != (2,) or C.shape != (2,):
            raise ValueError("parameter record has wrong shapes")
        H, aux = _forward(Omega, u0[0], alpha, beta, 1e-13, u0[1])
        model = Heptagon(alpha, beta, tuple(H))
        params = cls(alpha=alpha, beta=beta, omega=Omega, u0=aux["u0"],
                     C=aux["C"], anchor=anchor, residual=residual,
                     heptagon=model, seeds=(), curve=None)
        if build_seed_table:
            _attach_seed_table(params, seed_tol)
        return params

    @classmethod
    def from_json(cls, text: str, **kw) -> "MapParams":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"parameter file is not valid JSON: {exc}") \
                from exc
        if not isinstance(d, dict):
            raise ValueError("parameter file must hold a JSON object")
        return cls.from_dict(d, **kw)


# ---------------------------------------------------------------------------
# divisor walking: channel-map increments along the theta divisor


def _edge_ratio(params, u, tol=1e-13) -> complex:
    """Ratio theta[3](u + u0) / theta[3](u - u0) along the divisor.

    At the corner-5 image both factors vanish (simple zeros along the
    divisor), and the ratio continues through as the ratio of
    tangential derivatives.  A single vanishing factor is a genuine
    zero or pole of the channel-map exponential."""
    Pi = params.Pi
    u0 = params.u0c
    vp, sp = theta_char_scaled(_CHI3, u + u0, Pi, tol)
    vm, sm = theta_char_scaled(_CHI3, u - u0, Pi, tol)
    p_small = abs(vp) < 1e-9 * sp
    m_small = abs(vm) < 1e-9 * sm
    if not (p_small or m_small):
        return vp / vm
    if p_small and m_small:
        _, g35, _ = theta_with_grad(_CHI35, u, Pi, tol)
        T = np.array([-g35[1], g35[0]])
        a = complex(T @ theta_grad(_CHI3, u + u0, Pi, tol))
        b = complex(T @ theta_grad(_CHI3, u - u0, Pi, tol))
        if b == 0:
            raise AtPole("edge ratio degenerates beyond first order")
        return a / b
    raise AtPole("edge ratio has a zero or pole here (channel end)")


def _log_step(params, ua, ub):
    """Principal-branch increment of the channel map from ua to ub, or
    None when the increment is too close to the cut to trust."""
    r = _edge_ratio(params, ub) / _edge_ratio(params, ua)
    if abs(cmath.phase(r)) > _ARG_GUARD:
        return None
    d = ub - ua
    return cmath.log(r) + complex(params.C[0] * d[0] + params.C[1] * d[1])


def _divisor_project(params, u, max_iter=8):
    """Pull a near-divisor point back onto theta[K] = 0 by the minimal
    Newton correction."""
    u = np.asarray(u, dtype=complex).copy()
    Pi = params.Pi
    for _ in range(max_iter):
        v, g, sc = theta_with_grad(_CHI35, u, Pi)
        if abs(v) <= 5e-13 * sc:
            return u
        gn = float(np.sum(np.abs(g) ** 2))
        if gn == 0.0:
            break
        delta = -v * np.conj(g) / gn
        nd = float(np.linalg.norm(delta))
        if nd > 0.5:
            delta *= 0.5 / nd
        u = u + delta
    raise NoConvergence("projection onto the divisor did not converge")


def _walk_w(params, ua, wa, ub, depth=0):
    """Channel-map value at ub, continued along the divisor from the
    known pair (ua, wa).  Both endpoints must lie on the divisor."""
    ua = np.asarray(ua, dtype=complex)
    ub = np.asarray(ub, dtype=complex)
    if depth > 26:
        raise NoConvergence("divisor walk subdivided past the depth limit")
    if float(np.linalg.norm(ub - ua)) <= _MAX_U_STEP:
        d = _log_step(params, ua, ub)
        if d is not None:
            return wa + d
    um = _divisor_project(params, 0.5 * (ua + ub))
    if (float(np.linalg.norm(um - ua)) < 1e-12
            or float(np.linalg.norm(um - ub)) < 1e-12):
        raise NoConvergence("divisor walk collapsed onto an endpoint")
    wm = _walk_w(params, ua, wa, um, depth + 1)
    return _walk_w(params, um, wm, ub, depth + 1)


def cs_value(params: MapParams, u, tol: float = 1e-10) -> complex:
    """Channel map at a divisor point u (any lattice representative of a
    point on the upper-sheet closure).

    The value is found by continuing along the half-plane coordinate to
    the point's own coordinate, which keeps the path on the cut surface
    where the map is single valued; the landing representative must
    agree with the input modulo the lattice."""
    u = reduce_to_tile(np.asarray(u, dtype=complex), params.omega)
    v, _, sc = theta_with_grad(_CHI35, u, params.Pi)
    if abs(v) > 1e-6 * sc:
        raise WrongTile("u does not lie on the theta divisor")
    lab = tile_of(u, params.omega)
    if not (lab.boundary or lab.same_block(H_PLUS)):
        raise WrongTile("u reduces into the lower-sheet tile block")
    u = _divisor_project(params, u)
    for seed in params.seeds:
        if seed.kind == "vertex" and lattice_distance(
                u - seed.uvec, params.omega) < 1e-9:
            return seed.w
    x_t = sphere_coordinate(params.omega, u, (1, 2, 6),
                            cache=params._cache)
    u_f, w = _reach_x(params, x_t, (1, 2, 6), tol)
    if lattice_distance(u_f - u, params.omega) > 1e-7:
        raise WrongTile(
            "u is the lower-sheet lift of its half-plane coordinate"
        )
    return w


# ---------------------------------------------------------------------------
# seed table


def _enter_gap(params, s, u_v, w_v, marked, tol):
    """Step from the branch point s onto the interior of gap s.

    The divisor is a genus-2 surface, so only short continuation legs
    (or legs whose half-plane track stays on one sheet) carry the
    heptagon image unambiguously.  Entering a gap is the one spot where
    the half-plane Newton has a square-root degeneracy, handled by
    starting the iteration slightly off the branch point along the
    divisor tangent.  Both tangent signs reach a valid gap point (the
    two lifts of the same coordinate); the one whose image lies on the
    matching heptagon edge is kept.
    """
    if s < 6:
        xm = marked.x[s - 1] + 0.08 * (marked.x[s] - marked.x[s - 1])
    else:
        xm = -0.08 * marked.x[4]
    x_t = params.curve.x0 - 1.0 / xm
    _, g, _ = theta_with_grad(_CHI35, u_v, params.Pi)
    T = np.array([-g[1], g[0]])
    T = T / np.linalg.norm(T)
    verts = params.heptagon.vertices()
    if s < 6:
        a, b = verts[s - 1], verts[s % 6]
    # the two boundary arcs meeting at the corner leave along T and iT
    # (the local parameter on the curve is squared by the projection)
    for sgn in (1.0, -1.0, 1.0j, -1.0j):
        res = _x_newton(params, u_v, w_v, x_t, (1, 2, 6), tol,
                        max_iter=70, u_start=u_v + sgn * 2e-3 * T)
        if res is None:
            continue
        # the same fiber holds the corner-reflected branch (mirror
        # through the corner representative) and the canonical folds of
        # both; each candidate must still land on the matching arc
        cands = [res]
        u_m = 2.0 * np.asarray(u_v, dtype=complex) - res[0]
        for u_c in (u_m, reduce_to_tile(res[0], params.omega),
                    reduce_to_tile(u_m, params.omega)):
            if any(np.allclose(u_c, uc) for uc, _ in cands):
                continue
            try:
                cands.append((u_c, _walk_w(params,
                                           np.asarray(u_v, complex),
                                           w_v, u_c)))
            except (NoConvergence, AtPole):
                pass
        for u1, w1 in cands:
            if not _in_tile_box(params, u1):
                continue
            if s < 6:
                on_edge = _seg_dist(a, b, w1) < 1e-6 * (1.0 + abs(b - a))
            else:
                on_edge = (abs(w1.imag) < 1e-6
                           and w1.real > verts[5].real - 1e-6)
            if on_edge:
                return u1, w1, x_t
    raise SignCheckFailed(
        f"could not step from corner {s} onto its boundary arc"
    )


def _close_vertex(params, s_next, u_e, w_e):
    """Finish a gap walk on the branch point at its far end.

    The continued point u_e sits close to one lattice representative of
    the half period; that representative is identified by proximity
    (it must win clearly) and the image is carried over the final short
    chord."""
    ch = BRANCH_CHARS[s_next]
    Pi = params.Pi
    cands = []
    for s1 in (1.0, -1.0):
        for s2 in (1.0, -1.0):
            for t1 in (1.0, -1.0):
                for t2 in (1.0, -1.0):
                    eps = np.array([s1 * ch.eps[0], s2 * ch.eps[1]])
                    epsp = np.array([t1 * ch.epsp[0], t2 * ch.epsp[1]])
                    cand = 0.5 * (Pi @ eps + epsp)
                    if not any(np.allclose(cand, c) for c in cands):
                        cands.append(cand)
    dists = sorted((float(np.linalg.norm(c - u_e)), i)
                   for i, c in enumerate(cands))
    best, second = dists[0][0], (dists[1][0] if len(dists) > 1
                                 else math.inf)
    if not (best < 0.45 * second and best < 0.6):
        raise SignCheckFailed(
            f"ambiguous landing near corner {s_next}: nearest lattice "
            f"representatives at {best:.3f} and {second:.3f}"
        )
    u_v = cands[dists[0][1]]
    w_v = _walk_w(params, u_e, w_e, u_v)
    return u_v, w_v


def _attach_seed_table(params: MapParams, tol: float = 1e-11) -> None:
    """Precompute the correspondence table used to start continuation.

    Starting from the single anchor (u = 0, w = i pi), the boundary is
    traversed gap by gap in the half-plane coordinate: enter each gap,
    park a seed at its midpoint (which must land on the matching
    heptagon edge), continue to the far end and close onto the next
    corner, whose image must match the prescribed vertex.  Every leg is
    short or tracks the half-plane coordinate, so no continuation can
    pick up a spurious period; the landing checks pin the sheet and
    branch conventions or fail loudly.
    """
    omega = params.omega
    x0c = sphere_coordinate(omega, params.u0c, (1, 2, 6),
                            cache=params._cache)
    if abs(x0c.imag) > 1e-7 * (1 + abs(x0c)) or x0c.real >= 0:
        raise SignCheckFailed(
            f"channel-end coordinate must be negative real, got {x0c:.3e}"
        )
    x3, x4, x5 = rosenhain(omega)
    canonical = Curve((0.0, 1.0, x3, x4, x5, math.inf), float(x0c.real),
                      "canonical")
    params.curve = canonical
    marked = to_marked_chart(canonical)
    # crosscheck the reconstruction by integrating its periods; badly
    # clustered branch points cap the rule, so relax until it settles
    pd = None
    for q in (1e-11, 1e-9, 1e-7, 1e-5):
        try:
            pd = period_data(marked, tol=q)
            break
        except NoConvergence:
            continue
    if pd is None:
        raise NoConvergence(
            "branch points cluster too tightly for the period "
            "crosscheck; the requested heptagon is outside the "
            "double-precision envelope"
        )
    drift = float(np.max(np.abs(pd.omega - omega))
                  / np.max(np.abs(omega)))
    if drift > max(1e-6, 1e3 * q):
        raise NoConvergence(
            f"period recovery from the reconstructed curve drifted "
            f"by {drift:.2e}"
        )
    params._cache["pd_marked"] = pd

    verts = params.heptagon.vertices()
    scale = math.pi + max(abs(h) for h in params.heptagon.H)
    seeds: list[Seed] = [Seed(u=(0j, 0j), w=verts[0], x=0j,
                              kind="vertex", label=1)]

    # boundary chain: enter each gap, park a seed at its midpoint,
    # continue to the far end and close onto the next corner
    u_v = np.zeros(2, dtype=complex)
    w_v = verts[0]
    for s in range(1, 6):
        u1, w1, x1 = _enter_gap(params, s, u_v, w_v, marked, tol)
        xm_mid = 0.5 * (marked.x[s - 1] + marked.x[s])
        x_mid = canonical.x0 - 1.0 / xm_mid
        u_m, w_m = _continue_x(params, u1, w1, x1, [x_mid],
                               (1, 2, 6), tol)
        a, b = verts[s - 1], verts[s % 6]
        dist = _seg_dist(a, b, w_m)
        if dist > 1e-6 * scale:
            # long legs can slip onto the mirror branch where the fiber
            # crowds a half period; the on-edge test picks the true lift
            for u_c, w_c in _mirror_candidates(params, u1, w1, u_m, w_m):
                d_c = _seg_dist(a, b, w_c)
                if d_c < 1e-6 * scale and _in_tile_box(params, u_c):
                    u_m, w_m, dist = np.asarray(u_c, complex), w_c, d_c
                    break
        if dist > 1e-6 * scale:
            raise SignCheckFailed(
                f"edge {s} midpoint image {w_m:.6f} missed the segment "
                f"[{a:.4f}, {b:.4f}] by {dist:.2e}"
            )
        seeds.append(Seed(u=tuple(u_m.astype(complex)), w=w_m,
                          x=complex(x_mid), kind="edge", label=s))
        u_e, w_e, x_e = u_m, w_m, x_mid
        # the x-parametrization of an edge can be extremely nonuniform
        # (neighbouring branch points cluster), so approach the far end
        # geometrically and stop as soon as the landing is decisive
        frac = 0.05
        while True:
            xe_m = marked.x[s] - frac * (marked.x[s] - marked.x[s - 1])
            x_t = canonical.x0 - 1.0 / xe_m
            u_e, w_e = _continue_x(params, u_e, w_e, x_e, [x_t],
                                   (1, 2, 6), tol)
            x_e = x_t
            try:
                u_v, w_v = _close_vertex(params, s + 1, u_e, w_e)
                break
            except SignCheckFailed:
                if frac < 1e-10:
                    raise
                frac *= 0.4
        if abs(w_v - verts[s]) > 1e-6 * scale:
            # a slipped far-end leg carries a reflected image into the
            # corner; the direct chord from the verified midpoint seed
            # re-derives it independently
            try:
                w_v = _walk_w(params, u_m, w_m, np.asarray(u_v, complex))
            except (NoConvergence, AtPole):
                pass
        if abs(w_v - verts[s]) > 1e-6 * scale:
            raise SignCheckFailed(
                f"walked corner {s + 1} image {w_v:.6f} disagrees with "
                f"the prescribed vertex {verts[s]:.6f}"
            )
        seeds.append(Seed(u=tuple(u_v.astype(complex)), w=verts[s],
                          x=complex(canonical.x[s]), kind="vertex",
                          label=s + 1))

    # interior points, off the real axis in the marked chart
    span = marked.x[5] - marked.x[0]
    mid = 0.5 * (marked.x[0] + marked.x[5])
    edge_seeds = [sd for sd in seeds if sd.kind == "edge"]
    for re_off, im_off in ((-0.25, 0.4), (0.25, 0.4),
                           (-0.25, 1.1), (0.25, 1.1)):
        xz = complex(mid + re_off * span, im_off * span)
        x_can = complex(canonical.x0 - 1.0 / xz)
        base = min(edge_seeds, key=lambda sd: abs(sd.x - x_can))
        u_i, w_i = _continue_x(
            params, base.uvec, base.w, base.x,
            _x_route(params, base.x, x_can, (1, 2, 6)), (1, 2, 6), tol)
        if not contains_point(params.heptagon, w_i, tol=1e-6 * scale):
            raise SignCheckFailed(
                f"interior seed image {w_i:.6f} fell outside the heptagon"
            )
        seeds.append(Seed(u=tuple(u_i.astype(complex)), w=w_i,
                          x=x_can, kind="interior"))

    # one seed inside the east channel: enter the unbounded gap at
    # corner 6, then continue in w (chords inside the heptagon keep the
    # image single valued)
    v6 = next(sd for sd in seeds if sd.kind == "vertex" and sd.label == 6)
    u1, w1, _ = _enter_gap(params, 6, v6.uvec, v6.w, marked, tol)
    w_ch = complex(max(v.real for v in verts) + 1.0, 0.5 * math.pi)
    u_ch = _continue_w(params, u1, w1, w_ch, 1e-11)
    x_ch = sphere_coordinate(omega, u_ch, (1, 2, 6), cache=params._cache)
    seeds.append(Seed(u=tuple(u_ch.astype(complex)), w=w_ch,
                      x=x_ch, kind="channel"))

    params.seeds = tuple(seeds)


# ---------------------------------------------------------------------------
# forward map: heptagon point -> half-plane coordinate


def _w_newton(params, u_ref, w_ref, w_t, tol, max_iter=12):
    """One continuation node: solve theta[K](u) = 0, F(u) = w_t from the
    known pair (u_ref, w_ref).  Returns (u, w) or None to back off."""
    Pi = params.Pi
    u0 = params.u0c
    C = params.C
    try:
        ratio_ref = _edge_ratio(params, u_ref)
    except AtPole:
        return None
    u = np.asarray(u_ref, dtype=complex).copy()
    for _ in range(max_iter):
        v35, g35, s35 = theta_with_grad(_CHI35, u, Pi)
        vp, gp, sp = theta_with_grad(_CHI3, u + u0, Pi)
        vm, gm, sm = theta_with_grad(_CHI3, u - u0, Pi)
        if abs(vp) < _POLE_REL * sp or abs(vm) < _POLE_REL * sm:
            return None
        r = (vp / vm) / ratio_ref
        if abs(cmath.phase(r)) > 2.9:
            return None
        d = u - u_ref
        # the principal log cannot see a full winding, so the leg must
        # stay short in u as well
        if float(np.linalg.norm(d)) > _MAX_U_STEP:
            return None
        w_cur = w_ref + cmath.log(r) + complex(C[0] * d[0] + C[1] * d[1])
        r2 = w_cur - w_t
        if abs(v35) <= 1e-11 * s35 and abs(r2) <= tol:
            return u, w_cur
        D = gp / vp - gm / vm + C
        J = np.array([[g35[0], g35[1]], [D[0], D[1]]])
        try:
            delta = np.linalg.solve(J, -np.array([v35, r2]))
        except np.linalg.LinAlgError:
            return None
        nd = float(np.linalg.norm(delta))
        if nd > 0.3:
            delta *= 0.3 / nd
        u = u + delta
    return None


def _continue_w(params, u_start, w_start, w_target, tol):
    """Continue the correspondence along the straight chord from w_start
    to w_target; the chord must stay inside the closed heptagon."""
    u = np.asarray(u_start, dtype=complex)
    w = w_start
    step = _MAX_W_STEP
    while w != w_target:
        d = w_target - w
        wt = w_target if step >= abs(d) else w + d / abs(d) * step
        res = _w_newton(params, u, w, wt, tol)
        if res is not None:
            u, _ = res
            w = wt
            step = min(_MAX_W_STEP, step * 1.5)
        else:
            step *= 0.5
            if step < 1e-7:
                raise NoConvergence(
                    f"w-continuation stalled near {w:.6f} heading for "
                    f"{w_target:.6f}"
                )
    return u


def _chord_inside(hept: Heptagon, wa, wb, tol=1e-9) -> bool:
    for t in np.linspace(0.0, 1.0, 33)[1:-1]:
        if not contains_point(hept, wa + t * (wb - wa), tol=tol):
            return False
    return True


def _waypoints(params) -> list[complex]:
    if "waypoints" in params._cache:
        return params._cache["waypoints"]
    hept = params.heptagon
    pts = [s.w for s in params.seeds if s.kind in ("interior", "channel")]
    verts = hept.vertices()
    scale = min(abs(h) for h in hept.H)
    for i in range(6):
        a, b = verts[i], verts[(i + 1) % 6]
        m = 0.5 * (a + b)
        t = (b - a) / abs(b - a)
        for n in (1j * t, -1j * t):
            cand = m + 0.35 * scale * n
            if contains_point(hept, cand, tol=0.0) \
                    and distance_to_boundary(hept, cand) > 0.05 * scale:
                pts.append(cand)
                break
    params._cache["waypoints"] = pts
    return pts


def _landing_ok(params, u) -> bool:
    lab = tile_of(reduce_to_tile(u, params.omega), params.omega,
                  tol=1e-7)
    return (lab.boundary or lab.same_block(H_PLUS)) \
        and _in_tile_box(params, u)


def _solve_w(params: MapParams, w, tol: float = 1e-10) -> np.ndarray:
    """Divisor point whose channel-map value is w."""
    hept = params.heptagon
    if not contains_point(hept, w, tol=1e-9):
        raise OutsideHeptagon(f"{w:.6f} is not in the closed heptagon")
    order = sorted(params.seeds, key=lambda s: abs(s.w - w))
    for seed in order[:5]:
        if seed.w == w:
            return seed.uvec
        if not _chord_inside(hept, seed.w, w):
            continue
        try:
            u = _continue_w(params, seed.uvec, seed.w, w, tol)
        except NoConvergence:
            continue
        if _landing_ok(params, u):
            return u
    for seed in order[:5]:
        for wp in _waypoints(params):
            if _chord_inside(hept, seed.w, wp) \
                    and _chord_inside(hept, wp, w):
                try:
                    u_mid = _continue_w(params, seed.uvec, seed.w, wp,
                                        tol)
                    u = _continue_w(params, u_mid, wp, w, tol)
                except NoConvergence:
                    continue
                if _landing_ok(params, u):
                    return u
    raise NoConvergence(
        f"no continuation route from the seed table reached {w:.6f}"
    )


def to_halfplane(params: MapParams, w, norm=(1, 2, 6),
                 k: int | None = None, tol: float = 1e-10) -> complex:
    """Half-plane coordinate of the heptagon point w, normalized so the
    branch points norm = (s, j, l) sit at 0, 1, infinity."""
    u = _solve_w(params, complex(w), tol)
    lab = tile_of(reduce_to_tile(u, params.omega), params.omega,
                  tol=1e-7)
    if not (lab.boundary or lab.same_block(H_PLUS)):
        raise WrongTile(
            "continuation left the upper-sheet tile block; the target "
            "was likely outside the heptagon"
        )
    return sphere_coordinate(params.omega, u, norm, k,
                             cache=params._cache)


# ---------------------------------------------------------------------------
# inverse map: half-plane coordinate -> heptagon point


def _chart_mobius(params, norm):
    key = ("chart", norm)
    if key not in params._cache:
        s, j, l = norm
        cx = params.curve.x
        params._cache[key] = mobius_to_zero_one_inf(
            cx[s - 1], cx[j - 1], cx[l - 1])
    return params._cache[key]


def _chart_move(params, x_can, norm) -> complex:
    if tuple(norm) == (1, 2, 6):
        return x_can
    if isinstance(x_can, complex) and not cmath.isfinite(x_can):
        x_can = math.inf
    return complex(mobius_apply(_chart_mobius(params, norm), x_can))


def _sphere_with_grad(params, u, norm, tol=1e-13):
    """Projection value and u-gradient at a divisor point, using the
    first admissible free index whose denominator is clean.  The
    gradient is formed as  dX = sgn c 2 q (gn - q gd) / den  with
    q = num/den, which stays finite through the numerator zero at a
    branch point."""
    s, j, l = norm
    Pi = params.Pi
    for kk in sorted(set(range(1, 7)) - {s, j, l}):
        key = ("proj", s, j, l, kk)
        if key not in params._cache:
            params._cache[key] = _calibrate_projection(
                params.omega, s, j, l, kk, tol)
        sign, const_ratio, c_num, c_den = params._cache[key]
        num, gn, sn = theta_with_grad(c_num, u, Pi, tol)
        den, gd, sd = theta_with_grad(c_den, u, Pi, tol)
        if abs(den) < 1e-8 * sd:
            continue
        q = num / den
        X = sign * const_ratio * q * q
        dX = sign * const_ratio * 2.0 * q * (gn - q * gd) / den
        return X, dX
    raise NoConvergence("projection gradient unavailable at this point")


def _hop_cap(params) -> float:
    """Largest u-displacement a single continuation leg may take.

    Newton can converge to a lattice translate of the continuous
    landing point; any such hop moves u by at least the shortest
    lattice vector, so legs shorter than half of it cannot hop."""
    cap = params._cache.get("hop_cap")
    if cap is None:
        Pi = params.Pi
        best = math.inf
        for m1, m2, n1, n2 in itertools.product((-1, 0, 1), repeat=4):
            if (m1, m2, n1, n2) == (0, 0, 0, 0):
                continue
            lam = Pi @ np.array([m1, m2]) + np.array([n1, n2])
            best = min(best, float(np.linalg.norm(lam)))
        cap = min(0.3, 0.45 * best)
        params._cache["hop_cap"] = cap
    return cap


def _x_newton(params, u_ref, w_ref, x_t, norm, tol, max_iter=12,
              u_start=None, max_du=None):
    Pi = params.Pi
    u = np.asarray(u_ref if u_start is None else u_start,
                   dtype=complex).copy()
    size = 1.0 + abs(x_t)
    for _ in range(max_iter):
        v35, g35, s35 = theta_with_grad(_CHI35, u, Pi)
        try:
            X, dX = _sphere_with_grad(params, u, norm)
        except NoConvergence:
            return None
        r2 = X - x_t
        if abs(v35) <= 1e-11 * s35 and abs(r2) <= tol * size:
            if max_du is not None and float(np.linalg.norm(
                    u - np.asarray(u_ref, dtype=complex))) > max_du:
                return None
            # a half-plane leg can never leave the upper-sheet block
            lab = tile_of(reduce_to_tile(u, params.omega), params.omega,
                          tol=1e-9)
            if not (lab.boundary or lab.same_block(H_PLUS)):
                return None
            try:
                w = _walk_w(params, np.asarray(u_ref, dtype=complex),
                            w_ref, u)
            except (NoConvergence, AtPole):
                return None
            return u, w
        J = np.array([[g35[0], g35[1]], [dX[0], dX[1]]])
        try:
            delta = np.linalg.solve(J, -np.array([v35, r2]))
        except np.linalg.LinAlgError:
            return None
        nd = float(np.linalg.norm(delta))
        if nd > 0.3:
            delta *= 0.3 / nd
        u = u + delta
    return None


def _continue_x(params, u, w, x, targets, norm, tol):
    """Follow a polyline of half-plane targets from a known
    (u, w, x) triple, carrying the heptagon image along the divisor.
    Chord legs live in the closed upper half plane, where the lifted
    path cannot wind around a surface cycle, so the carried image is
    path independent."""
    u = np.asarray(u, dtype=complex)
    cap = _hop_cap(params)
    for x_target in targets:
        step = abs(x_target - x)
        while x != x_target:
            d = x_target - x
            xt = x_target if step >= abs(d) else x + d / abs(d) * step
            res = _x_newton(params, u, w, xt, norm, tol, max_du=cap)
            if res is not None:
                u, w = res
                x = xt
                step *= 1.5
            else:
                step *= 0.5
                if step < 1e-9 * (1.0 + abs(x_target)):
                    raise NoConvergence(
                        f"x-continuation stalled near {x:.6f} heading "
                        f"for {x_target:.6f}"
                    )
    return u, w


def _branch_images(params, norm) -> list[complex]:
    out = []
    for xv in params.curve.x:
        img = _chart_move(params, complex(xv) if math.isfinite(xv)
                          else complex(math.inf), norm)
        if cmath.isfinite(img):
            out.append(img)
    return out


def _seg_dist(a: complex, b: complex, p: complex) -> float:
    d = b - a
    L2 = abs(d) ** 2
    if L2 == 0:
        return abs(p - a)
    t = ((p - a) * d.conjugate()).real / L2
    t = max(0.0, min(1.0, t))
    return abs(p - (a + t * d))


def _x_route(params, x_seed, x_t, norm) -> list[complex]:
    """Polyline from a (possibly real-axis) seed coordinate to the
    target, bulged away from branch-point images when the straight
    chord passes too close."""
    chord = abs(x_t - x_seed)
    if chord == 0:
        return [x_t]
    clearance = min((_seg_dist(x_seed, x_t, b)
                     for b in _branch_images(params, norm)),
                    default=math.inf)
    if clearance > 0.08 * chord:
        return [x_t]
    mid = 0.5 * (x_seed + x_t) + 0.6j * chord
    return [mid, x_t]


def _in_tile_box(params, u, slack: float = 0.05) -> bool:
    """True when u lies in the closed upper-sheet block of the canonical
    tile (up to slack in characteristic units).  Continuation from
    table seeds can only land here; any other representative means the
    walk picked up a period and its carried image is shifted by a cycle
    integral."""
    c = RealChar.from_point(np.asarray(u, dtype=complex), params.omega)
    eps = np.asarray(c.eps)
    epsp = np.asarray(c.epsp)
    return bool(np.all(eps >= -1.0 - slack) and np.all(eps <= slack)
                and np.all(epsp >= -slack)
                and np.all(epsp <= 1.0 + slack))


def _mirror_candidates(params, u_from, w_from, u_found, w_found):
    """Alternative lifts of a continuation landing over the same fiber.

    Near a branch point the two lifts of the sphere coordinate crowd
    together and a long leg can settle on the mirror branch (point
    reflection through the half period), which drags the carried image
    off by a reflection plus a cycle period.  Yields the landing itself,
    its mirror through every nearby branch half period, and the
    canonical folds of each, re-imaging every alternative by a fresh
    increment walk from the trusted start of the leg."""
    omega = params.omega
    Pi = params.Pi
    u_found = np.asarray(u_found, dtype=complex)
    cands = [(u_found, w_found)]
    alts = [reduce_to_tile(u_found, omega)]
    for s1 in range(1, 7):
        ch = BRANCH_CHARS[s1]
        hp = 0.5 * (Pi @ np.asarray(ch.eps, dtype=float)
                    + np.asarray(ch.epsp, dtype=float))
        # lattice translate of the half period nearest the landing
        d = u_found - hp
        m = np.rint(np.linalg.solve(omega, d.imag))
        n = np.rint(d.real)
        u_mir = 2.0 * (hp + Pi @ m + n) - u_found
        if np.linalg.norm(u_mir - u_found) < 1e-8:
            continue
        alts.append(u_mir)
        alts.append(reduce_to_tile(u_mir, omega))
    for u_c in alts:
        if any(np.allclose(u_c, uc, atol=1e-8) for uc, _ in cands):
            continue
        try:
            w_c = _walk_w(params, np.asarray(u_from, dtype=complex),
                          w_from, u_c)
        except (NoConvergence, AtPole):
            continue
        cands.append((u_c, w_c))
    return cands


def _reach_x(params, x, norm, tol):
    """Continue from the best available seeds to the half-plane
    coordinate x, returning the landing (u, w)."""
    usable = [s for s in params.seeds if s.kind != "vertex"]
    scored = sorted(
        usable, key=lambda s: abs(_chart_move(params, s.x, norm) - x))
    last_exc: Exception | None = None
    for seed in scored[:4]:
        xs = _chart_move(params, seed.x, norm)
        try:
            u_f, w_f = _continue_x(params, seed.uvec, seed.w, xs,
                                   _x_route(params, xs, x, norm), norm,
                                   tol)
        except (NoConvergence, AtPole) as exc:
            last_exc = exc
            continue
        if _in_tile_box(params, u_f):
            return u_f, w_f
        last_exc = WrongTile(
            "continuation landed outside the canonical tile box"
        )
    raise NoConvergence(
        f"no x-continuation route reached {x:.6f}"
    ) from last_exc


def to_heptagon(params: MapParams, x, norm=(1, 2, 6),
                k: int | None = None, tol: float = 1e-10,
                check: bool = False) -> complex:
    """Heptagon point whose half-plane coordinate is x (open upper half
    plane).  With check=True the landing point is cross-validated
    against an independent quadrature integration on the curve."""
    x = complex(x)
    if x.imag <= 0:
        raise ValueError("target must lie in the open upper half plane")
    u, w = _reach_x(params, x, norm, tol)
    lab = tile_of(reduce_to_tile(u, params.omega), params.omega,
                  tol=1e-7)
    if not (lab.boundary or lab.same_block(H_PLUS)):
        raise WrongTile("inverse continuation left the upper-sheet block")
    if check:
        _aj_crosscheck(params, u, x, norm)
    return w


def _aj_crosscheck(params, u, x, norm) -> None:
    pd = params._cache["pd_marked"]
    if tuple(norm) == (1, 2, 6):
        x_can = x
    else:
        M = _chart_mobius(params, norm)
        x_can = mobius_apply(np.linalg.inv(M), x)
    x_marked = 1.0 / (params.curve.x0 - x_can)
    u_q = aj_point(pd, SurfacePoint(complex(x_marked), 1))
    d = lattice_distance(np.asarray(u, dtype=complex) - u_q, params.omega)
    if d > 1e-6:
        raise NoConvergence(
            f"quadrature cross-check disagrees with the theta landing "
            f"point by {d:.2e} (mod lattice)"
        )


# ---------------------------------------------------------------------------
# grids


def map_grid(params: MapParams, nx: int, ny: int, norm=(1, 2, 6),
             tol: float = 1e-10) -> list[dict]:
    """Forward images of the rectangular mesh covering the bounding box
    of the finite vertices.  Mesh points outside the closed heptagon
    are skipped; results come back in row-major order as dicts with
    mesh indices, w and x."""
    if nx < 2 or ny < 2:
        raise ValueError("grid needs at least 2 points per side")
    verts = params.heptagon.vertices()
    re0 = min(v.real for v in verts)
    re1 = max(v.real for v in verts)
    im0 = min(v.imag for v in verts)
    im1 = max(v.imag for v in verts)
    xs = np.linspace(re0, re1, nx)
    ys = np.linspace(im0, im1, ny)
    hept = params.heptagon
    out: list[dict] = []
    for j, yv in enumerate(ys):
        prev: tuple[np.ndarray, complex] | None = None
        for i, xv in enumerate(xs):
            w = complex(xv, yv)
            if not contains_point(hept, w, tol=1e-12):
                prev = None
                continue
            try:
                if prev is not None and _chord_inside(hept, prev[1], w):
                    u = _continue_w(params, prev[0], prev[1], w, tol)
                else:
                    u = _solve_w(params, w, tol)
            except NoConvergence:
                u = _solve_w(params, w, tol)
            try:
                x = sphere_coordinate(params.omega, u, norm,
                                      cache=params._cache)
            except DenominatorZero:
                x = complex(math.inf)
            out.append({"i": i, "j": j, "w": w, "x": x})
            prev = (u, w)
    return out
