"""Genus-2 Riemann theta functions with half-integer characteristics.

The series evaluated here is

    theta(u, Pi) = sum_{m in Z^2} exp(2*pi*i m.u + pi*i m.Pi.m)

for u in C^2 and Pi a symmetric 2x2 matrix with positive definite
imaginary part.  A characteristic shifts the lattice and the argument:

    theta[2e, 2e'](u, Pi)
        = sum_m exp(2*pi*i (m+e).(u+e') + pi*i (m+e).Pi.(m+e))

where the stored integer labels are the doubled vectors 2e, 2e' with
entries in {0, 1}.  Half-integer characteristics are even or odd as the
bilinear pairing 4 e.e' is, and odd ones have vanishing theta constants.

Truncation policy: terms are summed over the lattice points falling in
the ellipse (m + e + c).Im(Pi).(m + e + c) <= R^2 centred at the real
shift c = Im(Pi)^{-1} Im(u).  R comes from the Gaussian tail bound at
the requested tolerance, after which R is doubled once and the two
partial sums must agree to that tolerance relative to the largest
summed term.  R is capped at 60.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadLabel, NoConvergence, NonPositiveDefinite

# Hard ceiling on the summation radius, in units of the Im(Pi) metric.
_R_CAP = 60.0
# Default relative truncation tolerance for the series.
DEFAULT_TOL = 1e-13


# ---------------------------------------------------------------------------
# characteristics


@dataclass(frozen=True)
class IntChar:
    """Half-integer characteristic stored as doubled integer vectors.

    ``eps`` and ``epsp`` hold the entries of [2e, 2e'] and must be 0/1.
    The point of the Jacobian attached to the characteristic is
    u = (Pi.eps + epsp) / 2.
    """

    eps: tuple[int, int]
    epsp: tuple[int, int]

    def __post_init__(self):
        for v in (self.eps, self.epsp):
            if len(v) != 2 or any(b not in (0, 1) for b in v):
                raise BadLabel(f"characteristic entries must be 0/1 bits, got {v}")

    @property
    def parity(self) -> int:
        """0 for even, 1 for odd characteristics."""
        return (self.eps[0] * self.epsp[0] + self.eps[1] * self.epsp[1]) % 2

    def __xor__(self, other: "IntChar") -> "IntChar":
        return IntChar(
            (self.eps[0] ^ other.eps[0], self.eps[1] ^ other.eps[1]),
            (self.epsp[0] ^ other.epsp[0], self.epsp[1] ^ other.epsp[1]),
        )

    def half_vectors(self) -> tuple[np.ndarray, np.ndarray]:
        """The (e, e') pair entering the series, i.e. the labels halved."""
        return np.asarray(self.eps, float) / 2.0, np.asarray(self.epsp, float) / 2.0


@dataclass(frozen=True)
class RealChar:
    """Real characteristic (eps, epsp) of a Jacobian point.

    Follows the same doubling convention as IntChar: the attached point
    is u = (Pi.eps + epsp) / 2, so integer characteristics embed with
    their stored bits unchanged.
    """

    eps: tuple[float, float]
    epsp: tuple[float, float]

    @classmethod
    def from_point(cls, u, Omega) -> "RealChar":
        u = np.asarray(u, complex)
        Omega = np.asarray(Omega, float)
        eps = np.linalg.solve(Omega, 2.0 * u.imag)
        epsp = 2.0 * u.real
        return cls(tuple(eps), tuple(epsp))

    def point(self, Omega) -> np.ndarray:
        Omega = np.asarray(Omega, float)
        eps = np.asarray(self.eps, float)
        epsp = np.asarray(self.epsp, float)
        return 0.5 * (1j * (Omega @ eps) + epsp)

    def half_vectors(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.eps, float) / 2.0, np.asarray(self.epsp, float) / 2.0


#: Characteristics of the six branch points on the real hyperelliptic
#: curve, ordered so that consecutive points bound the boundary gaps.
#: The base point carries the zero characteristic.
BRANCH_CHARS: dict[int, IntChar] = {
    1: IntChar((0, 0), (0, 0)),
    2: IntChar((1, 0), (0, 0)),
    3: IntChar((1, 0), (1, 0)),
    4: IntChar((0, 1), (1, 0)),
    5: IntChar((0, 1), (1, 1)),
    6: IntChar((0, 0), (1, 1)),
}

#: Vector of Riemann constants for this homology basis, an odd
#: characteristic: theta[K](u) vanishes iff u is the image of a point.
RIEMANN_CONSTANT = IntChar((1, 1), (0, 1))


def char_from_indices(indices) -> IntChar:
    """XOR of branch-point characteristics plus the Riemann constant shift.

    ``char_from_indices([s])`` is the characteristic whose theta function
    cuts out the image of the curve translated by u(p_s); in particular
    ``char_from_indices([3, 5])`` is the odd characteristic vanishing on
    the Jacobian image of the curve itself.
    """
    c = IntChar((0, 0), (0, 0))
    for s in indices:
        if s not in BRANCH_CHARS:
            raise BadLabel(f"branch index {s} outside 1..6")
        c = c ^ BRANCH_CHARS[s]
    return c


def char_parity(c) -> str:
    return "odd" if c.parity else "even"


# ---------------------------------------------------------------------------
# quarter-period tiles


@dataclass(frozen=True)
class TileLabel:
    """Sign block of a reduced real characteristic.

    Each component sign records whether the reduced entry lies in (0, 1)
    or (-1, 0); the boundary flag is set when any entry sits within
    tolerance of an integer, where the block is ambiguous.
    """

    sigma_eps: tuple[int, int]
    sigma_epsp: tuple[int, int]
    boundary: bool

    def same_block(self, other: "TileLabel") -> bool:
        return (
            self.sigma_eps == other.sigma_eps
            and self.sigma_epsp == other.sigma_epsp
        )


#: Block containing the Jacobian image of the open upper-half-plane sheet.
H_PLUS = TileLabel((-1, -1), (1, 1), False)
#: Its hyperelliptic-involution partner.
JH_PLUS = TileLabel((1, 1), (-1, -1), False)


def _reduce_mod2(v):
    """Shift entries by even integers into (-1, 1]."""
    r = np.mod(np.asarray(v, float) + 1.0, 2.0) - 1.0
    # mod can return -1.0 exactly when v+1 is a tiny negative multiple
    r[r == -1.0] = 1.0
    return r


def tile_of(u, Omega, tol: float = 1e-9) -> TileLabel:
    """Quarter-period block of a Jacobian point for Pi = i Omega.

    The real characteristic of u is reduced mod 2 into (-1, 1]^4 and
    labelled by component signs.
    """
    c = RealChar.from_point(u, Omega)
    eps = _reduce_mod2(c.eps)
    epsp = _reduce_mod2(c.epsp)
    all_entries = np.concatenate([eps, epsp])
    boundary = bool(np.any(np.abs(all_entries - np.round(all_entries)) < tol))
    sig = lambda v: tuple(1 if x > 0 else -1 for x in v)
    return TileLabel(sig(eps), sig(epsp), boundary)


def reduce_to_tile(u, Omega) -> np.ndarray:
    """Representative of u mod the period lattice with characteristic
    entries in (-1, 1]."""
    c = RealChar.from_point(u, Omega)
    eps = _reduce_mod2(c.eps)
    epsp = _reduce_mod2(c.epsp)
    return RealChar(tuple(eps), tuple(epsp)).point(Omega)


def lattice_distance(d, Omega) -> float:
    """Distance of d from the period lattice of Pi = i Omega, measured on
    characteristic entries (so exact lattice vectors give 0)."""
    c = RealChar.from_point(d, Omega)
    half = np.concatenate([c.eps, c.epsp]) / 2.0
    return float(np.max(np.abs(half - np.round(half))))


# ---------------------------------------------------------------------------
# series evaluation


def validate_riemann_matrix(Pi) -> np.ndarray:
    """Check symmetry and positive definite imaginary part; return the
    matrix as a complex array."""
    Pi = np.asarray(Pi, complex)
    if Pi.shape != (2, 2):
        raise NonPositiveDefinite(f"expected 2x2 matrix, got shape {Pi.shape}")
    scale = float(np.max(np.abs(Pi))) or 1.0
    if abs(Pi[0, 1] - Pi[1, 0]) > 1e-10 * scale:
        raise NonPositiveDefinite("period matrix is not symmetric")
    Om = Pi.imag
    if not (Om[0, 0] > 0 and np.linalg.det(Om) > 0):
        raise NonPositiveDefinite("Im(Pi) must have positive leading minors")
    return Pi


def _lattice_sum(seps, sepsp, u, Pi, Om, center, R, order):
    """Sum the shifted series over lattice points in the ellipse of
    radius R around -center, center = seps + Om^{-1} Im u."""
    Oinv = np.linalg.inv(Om)
    box = R * np.sqrt(np.diag(Oinv))
    lo = np.ceil(-center - box).astype(int)
    hi = np.floor(-center + box).astype(int)
    m1 = np.arange(lo[0], hi[0] + 1)
    m2 = np.arange(lo[1], hi[1] + 1)
    M = np.stack(
        [np.repeat(m1, m2.size), np.tile(m2, m1.size)], axis=1
    ).astype(float)
    v = M + center
    qv = np.einsum("ij,jk,ik->i", v, Om, v)
    keep = qv <= R * R + 1e-12
    n = M[keep] + seps
    shifted = u + sepsp
    expo = (
        1j * np.pi * np.einsum("ij,jk,ik->i", n, Pi, n)
        + 2j * np.pi * (n @ shifted)
    )
    re = expo.real
    if re.size == 0:
        return 0.0 + 0.0j, np.zeros(2, complex), np.zeros((2, 2), complex), 0.0
    peak = float(re.max())
    if peak > 700.0:
        raise NoConvergence("series terms overflow double precision range")
    terms = np.exp(expo)
    val = complex(terms.sum())
    grad = np.zeros(2, complex)
    hess = np.zeros((2, 2), complex)
    if order >= 1:
        c = 2j * np.pi * n
        grad = (c * terms[:, None]).sum(axis=0)
        if order >= 2:
            hess = np.einsum("ij,ik,i->jk", c, c, terms)
    return val, grad, hess, float(np.exp(peak))


def _series(seps, sepsp, u, Pi, tol, order):
    Pi = validate_riemann_matrix(Pi)
    u = np.asarray(u, complex).reshape(2)
    Om = Pi.imag
    lam = float(np.linalg.eigvalsh(Om)[0])
    c = np.linalg.solve(Om, u.imag)
    center = seps + c
    R = np.sqrt((np.log(1.0 / tol) + 10.0) / (np.pi * lam)) + np.sqrt(2.0)
    if R > _R_CAP:
        raise NoConvergence(
            f"required summation radius {R:.1f} exceeds cap {_R_CAP}"
        )
    v1, g1, h1, s1 = _lattice_sum(seps, sepsp, u, Pi, Om, center, R, order)
    R2 = min(2.0 * R, _R_CAP)
    v2, g2, h2, s2 = _lattice_sum(seps, sepsp, u, Pi, Om, center, R2, order)
    scale = max(s1, s2)
    if abs(v2 - v1) > 10.0 * tol * scale:
        raise NoConvergence(
            "doubling the summation radius changed the value by "
            f"{abs(v2 - v1):.3e} (scale {scale:.3e})"
        )
    return v2, g2, h2, scale


def _half_vectors(char):
    if char is None:
        z = np.zeros(2)
        return z, z
    return char.half_vectors()


def theta(u, Pi, tol: float = DEFAULT_TOL) -> complex:
    """Riemann theta value at u for period matrix Pi."""
    z = np.zeros(2)
    val, _, _, _ = _series(z, z, u, Pi, tol, 0)
    return val


def theta_char(char, u, Pi, tol: float = DEFAULT_TOL) -> complex:
    """Theta with characteristic; exact zero for odd characteristics at
    the origin."""
    if isinstance(char, IntChar) and char.parity == 1:
        uu = np.asarray(u, complex)
        if np.all(uu == 0):
            return 0.0 + 0.0j
    seps, sepsp = _half_vectors(char)
    val, _, _, _ = _series(seps, sepsp, u, Pi, tol, 0)
    return val


def theta_char_scaled(char, u, Pi, tol: float = DEFAULT_TOL):
    """Value together with the magnitude of the largest summed term.

    The scale is the natural yardstick for deciding whether a value is
    numerically zero (e.g. for divisor membership tests).
    """
    seps, sepsp = _half_vectors(char)
    val, _, _, scale = _series(seps, sepsp, u, Pi, tol, 0)
    return val, scale


def theta_grad(char, u, Pi, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Gradient (d/du_1, d/du_2) of theta with characteristic."""
    seps, sepsp = _half_vectors(char)
    _, grad, _, _ = _series(seps, sepsp, u, Pi, tol, 1)
    return grad


def theta_with_grad(char, u, Pi, tol: float = DEFAULT_TOL):
    """Value and gradient in a single lattice pass."""
    seps, sepsp = _half_vectors(char)
    val, grad, _, scale = _series(seps, sepsp, u, Pi, tol, 1)
    return val, grad, scale


def theta_with_hess(char, u, Pi, tol: float = DEFAULT_TOL):
    """Value, gradient and Hessian in a single lattice pass."""
    seps, sepsp = _half_vectors(char)
    return _series(seps, sepsp, u, Pi, tol, 2)


def theta_const(char, Pi, tol: float = DEFAULT_TOL) -> complex:
    """Theta constant (value at u = 0)."""
    return theta_char(char, np.zeros(2, complex), Pi, tol)
