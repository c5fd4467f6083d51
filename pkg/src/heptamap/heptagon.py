"""Rectangular heptagons with six right angles and an east channel.

A heptagon of class (alpha, beta) has vertices w_1 .. w_6 at right
angles, one zero angle at infinity, and sides alternating between the
coordinate directions: i^s H_s = w_s - w_{s+1}.  Sides are measured by
the five real numbers H_1 .. H_5; the sixth side and the two channel
rays are determined by closure, which forces H_1 - H_3 + H_5 = pi.
The side sign pattern is pinned by the two exterior corners alpha <
beta: (s + 1/2 - alpha)(s + 1/2 - beta) H_s > 0.  A few classes need an
extra non-crossing inequality for the boundary to stay simple.

The normalization puts w_1 = i pi, so the channel is the half strip
0 < Im w < pi running east.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidHeptagon

#: classes whose geometry needs an inequality beyond the sign rule;
#: entries are (guard, requirement): when guard(H) holds, requirement(H)
#: must hold (guard None means always)
_NON_CROSSING = {
    (1, 2): (None, lambda H: -H[1] + H[3] > 0),
    (1, 5): (lambda H: H[0] - H[2] <= 0, lambda H: -H[1] + H[3] > 0),
    (2, 3): (None, lambda H: -H[2] + H[4] > 0),
    (2, 6): (lambda H: -H[2] + H[4] <= 0, lambda H: -H[1] + H[3] < 0),
    (4, 5): (None, lambda H: H[0] - H[2] > 0),
    (5, 6): (None, lambda H: -H[1] + H[3] < 0),
}


@dataclass(frozen=True)
class Heptagon:
    """Side data (H_1 .. H_5) of a rectangular heptagon of class
    (alpha, beta)."""

    alpha: int
    beta: int
    H: tuple[float, float, float, float, float]

    def __post_init__(self):
        if not (
            isinstance(self.alpha, int)
            and isinstance(self.beta, int)
            and 1 <= self.alpha < self.beta <= 6
        ):
            raise InvalidHeptagon(
                f"need integer corners 1 <= alpha < beta <= 6, got "
                f"({self.alpha}, {self.beta})"
            )
        if len(self.H) != 5 or not all(
            isinstance(v, (int, float)) and math.isfinite(v) for v in self.H
        ):
            raise InvalidHeptagon("H must be five finite side lengths")

    def vertices(self) -> np.ndarray:
        """The six finite vertices, starting from w_1 = i pi."""
        w = np.empty(6, complex)
        w[0] = 1j * np.pi
        for s in range(1, 6):
            w[s] = w[s - 1] - (1j ** s) * self.H[s - 1]
        return w

    def validate(self, tol: float = 1e-9) -> list[str]:
        """List of violated class constraints (empty when valid)."""
        H = self.H
        a, b = self.alpha, self.beta
        out = []
        closure = H[0] - H[2] + H[4] - np.pi
        if abs(closure) > tol:
            out.append(
                f"closure: H1 - H3 + H5 = pi violated by {closure:.3e}"
            )
        for s in range(1, 6):
            sgn = (s + 0.5 - a) * (s + 0.5 - b)
            if not sgn * H[s - 1] > 0:
                out.append(
                    f"sign rule: side {s} must have sign "
                    f"{'+' if sgn > 0 else '-'}, got H{s} = {H[s - 1]:.6g}"
                )
        rule = _NON_CROSSING.get((a, b))
        if rule is not None:
            guard, req = rule
            if (guard is None or guard(H)) and not req(H):
                out.append(f"non-crossing inequality for class ({a}, {b})")
        if not out and not boundary_is_simple(self):
            out.append("boundary polyline crosses itself")
        return out

    def is_valid(self, tol: float = 1e-9) -> bool:
        return not self.validate(tol)

    def reflect(self) -> "Heptagon":
        """Mirror heptagon: sides reversed, class (7 - beta, 7 - alpha)."""
        return Heptagon(7 - self.beta, 7 - self.alpha, self.H[::-1])

    def to_json(self) -> str:
        return json.dumps(
            {"alpha": self.alpha, "beta": self.beta, "H": list(self.H)}
        )

    @classmethod
    def from_json(cls, text: str) -> "Heptagon":
        data = json.loads(text)
        try:
            alpha = data["alpha"]
            beta = data["beta"]
            H = data["H"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"heptagon JSON missing field: {exc}") from exc
        if not isinstance(H, list) or len(H) != 5:
            raise ValueError("heptagon JSON needs a 5-element H array")
        return cls(int(alpha), int(beta), tuple(float(v) for v in H))


# ---------------------------------------------------------------------------
# boundary geometry


def _boundary_segments(h: Heptagon, reach: float = 0.0):
    """Finite vertex chain plus the two channel rays, clipped east of
    every vertex (and of ``reach``)."""
    w = h.vertices()
    far = max(float(np.max(w.real)), reach) + 2.0 + np.pi
    segs = [(complex(far, w[0].imag), w[0])]
    segs += [(w[s], w[s + 1]) for s in range(5)]
    segs.append((w[5], complex(far, w[5].imag)))
    return segs


def _orient(a: complex, b: complex, c: complex) -> float:
    return (b.real - a.real) * (c.imag - a.imag) - (
        b.imag - a.imag
    ) * (c.real - a.real)


def _segments_cross(p, q, r, s, eps) -> bool:
    """Proper or improper intersection of closed segments pq and rs."""
    d1 = _orient(r, s, p)
    d2 = _orient(r, s, q)
    d3 = _orient(p, q, r)
    d4 = _orient(p, q, s)
    if ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and (
        (d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)
    ):
        return True

    def on_seg(a, b, c):
        if abs(_orient(a, b, c)) > eps:
            return False
        return (
            min(a.real, b.real) - 1e-12 <= c.real <= max(a.real, b.real) + 1e-12
            and min(a.imag, b.imag) - 1e-12 <= c.imag <= max(a.imag, b.imag) + 1e-12
        )

    return on_seg(r, s, p) or on_seg(r, s, q) or on_seg(p, q, r) or on_seg(p, q, s)


def boundary_is_simple(h: Heptagon) -> bool:
    """True when the boundary polyline (channel rays included) has no
    self-intersection apart from shared consecutive endpoints."""
    segs = _boundary_segments(h)
    scale = max(max(abs(a), abs(b)) for a, b in segs) or 1.0
    eps = 1e-12 * scale * scale
    n = len(segs)
    for i in range(n):
        for j in range(i + 1, n):
            p, q = segs[i]
            r, s = segs[j]
            if j == i + 1:
                # consecutive segments legitimately share one endpoint
                shared = q
                if abs(shared - r) > 1e-12 * scale:
                    return False
                # they must not overlap beyond the joint
                if abs(_orient(p, q, s)) < eps and (
                    (s - q).real * (p - q).real + (s - q).imag * (p - q).imag
                ) > eps:
                    return False
                continue
            if _segments_cross(p, q, r, s, eps):
                return False
    return True


def contains_point(h: Heptagon, w: complex, tol: float = 1e-12) -> bool:
    """Membership in the closed heptagon, channel included."""
    w = complex(w)
    if distance_to_boundary(h, w) <= tol:
        return True
    verts = h.vertices()
    far = max(float(np.max(verts.real)), w.real) + 3.0
    poly = list(verts) + [
        complex(far, verts[5].imag),
        complex(far, verts[0].imag),
    ]
    # even-odd rule with a horizontal ray from w
    inside = False
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if (a.imag > w.imag) != (b.imag > w.imag):
            xc = a.real + (w.imag - a.imag) * (b.real - a.real) / (
                b.imag - a.imag
            )
            if w.real < xc:
                inside = not inside
    return inside


def distance_to_boundary(h: Heptagon, w: complex) -> float:
    w = complex(w)
    best = math.inf
    for a, b in _boundary_segments(h, reach=w.real):
        d = b - a
        L2 = abs(d) ** 2
        t = (
            ((w - a).real * d.real + (w - a).imag * d.imag) / L2
            if L2 > 0
            else 0.0
        )
        t = min(1.0, max(0.0, t))
        best = min(best, abs(a + t * d - w))
    return best
