"""Articulated tetrahedral angle: the spherical four-bar input-output equation.

A tetrahedral (four-faced) solid angle with fixed face angles alpha, beta,
gamma, delta and articulated edges behaves like a spherical four-bar linkage.
With t and u the half-angle tangents of the dihedrals along the two edges
that bound the face ``alpha``, the configuration constraint is the
biquadratic

    a*t^2*u^2 + b*t^2 + 2*c*t*u + d*u^2 + e = 0.

This module computes the five coefficients from face angles, solves the
equation for the conjugate dihedral, classifies the decomposable linkages
(rhomboidal: adjacent faces equal or supplementary in pairs; unicursal:
opposite faces equal or supplementary in pairs), recovers face angles from
a coefficient vector, gives the linear relation tying the cosines of two
opposite dihedrals, and provides the planar four-bar limit in which the
vertex recedes to infinity.

Angle convention: the face cycle around the vertex is alpha, beta, gamma,
delta, with alpha between the two tracked edges, beta adjacent to the
``t`` edge, delta adjacent to the ``u`` edge, and gamma opposite alpha.
All faces lie strictly in (0, pi).  A dihedral of pi is represented by the
half-tangent ``math.inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GENERAL = "general"
RHOMBOIDAL = "rhomboidal"
UNICURSAL = "unicursal"

PRODUCT = "product"
RATIO = "ratio"


class NoRealRoot(ValueError):
    """The requested dihedral is outside the reachable range of the linkage."""


class DegenerateQuadratic(ValueError):
    """The conjugate equation degenerates and determines no isolated root."""


class NotUnicursal(ValueError):
    """Decomposition constants requested for a non-unicursal linkage."""


class SingularC(ValueError):
    """c = 0: the unicursal family, for which reconstruction is not unique."""


class Unreal(ValueError):
    """A reality condition fails: no real face angles produce these coefficients."""


@dataclass(frozen=True)
class FaceAngles:
    """Four face angles of an articulated tetrahedral angle, radians."""

    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            v = getattr(self, name)
            if not (0.0 < v < math.pi):
                raise ValueError(f"face angle {name}={v!r} must lie strictly in (0, pi)")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.delta)


@dataclass(frozen=True)
class TetraCoeffs:
    """Coefficients (a, b, c, d, e) of the biquadratic half-tangent equation."""

    a: float
    b: float
    c: float
    d: float
    e: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.a, self.b, self.c, self.d, self.e)

    def scale(self) -> float:
        return max(abs(v) for v in self.as_tuple())

    def residual(self, t: float, u: float) -> float:
        """Value of a t^2 u^2 + b t^2 + 2 c t u + d u^2 + e at (t, u)."""
        return (self.a * t * t * u * u + self.b * t * t
                + 2.0 * self.c * t * u + self.d * u * u + self.e)


@dataclass(frozen=True)
class LinkageClass:
    """Classification outcome: tag, vanishing coefficient pair, face relation."""

    tag: str
    branch: tuple[str, str] | None
    relation: str


@dataclass(frozen=True)
class UnicursalConstants:
    """The two constants of the decomposed equation, t*u = k or t/u = k."""

    branch: str
    k_a: float
    k_b: float


@dataclass(frozen=True)
class OppositeDihedralLine:
    """Coefficients of l*cos(phi) + m*cos(theta) + n = 0 for opposite dihedrals."""

    l: float
    m: float
    n: float

    def __post_init__(self):
        if self.l == 0.0 and self.m == 0.0 and self.n == 0.0:
            raise ValueError("line coefficients must not all vanish")

    def normalized(self) -> "OppositeDihedralLine":
        s = math.sqrt(self.l**2 + self.m**2 + self.n**2)
        return OppositeDihedralLine(self.l / s, self.m / s, self.n / s)

    def residual(self, cos_phi: float, cos_theta: float) -> float:
        return self.l * cos_phi + self.m * cos_theta + self.n


def half_tangent(angle: float) -> float:
    """tan(angle/2), with the flat dihedral pi mapped to inf exactly."""
    if angle == math.pi:
        return math.inf
    return math.tan(0.5 * angle)


def angle_from_half_tangent(t: float) -> float:
    """Inverse of half_tangent, into (-pi, pi]."""
    if math.isinf(t):
        return math.pi
    return 2.0 * math.atan(t)


def tetra_coeffs_arrays(alpha, beta, gamma, delta):
    """Vectorized coefficient evaluation; returns five arrays (a, b, c, d, e)."""
    alpha, beta, gamma, delta = map(np.asarray, (alpha, beta, gamma, delta))
    cg = np.cos(gamma)
    return (cg - np.cos(alpha + beta + delta),
            cg - np.cos(alpha + beta - delta),
            -2.0 * np.sin(beta) * np.sin(delta),
            cg - np.cos(alpha - beta + delta),
            cg - np.cos(alpha - beta - delta))


def tetra_coeffs(angles: FaceAngles) -> TetraCoeffs:
    """Coefficients of the dihedral equation from the four face angles."""
    a, b, c, d, e = (float(v) for v in tetra_coeffs_arrays(*angles.as_tuple()))
    return TetraCoeffs(a, b, c, d, e)


def decomposition_discriminant(coeffs: TetraCoeffs) -> float:
    """(c^2 - a e - b d)^2 - 4 a b d e.

    Vanishes only when a face angle degenerates to 0 or pi; equals
    16 sin^2(alpha) sin^2(beta) sin^2(gamma) sin^2(delta) for coefficients
    generated from face angles.
    """
    a, b, c, d, e = coeffs.as_tuple()
    return (c * c - a * e - b * d) ** 2 - 4.0 * a * b * d * e


def solve_conjugate(coeffs: TetraCoeffs, t: float, tol: float = 1e-12) -> tuple[float, ...]:
    """Roots u of the dihedral equation for a given half-tangent t.

    Solves (a t^2 + d) u^2 + 2 c t u + (b t^2 + e) = 0.  For t = inf the
    equation reduces to a u^2 + b = 0.  When the leading coefficient
    vanishes the single finite linear root is returned (the second root has
    escaped to infinity).

    Raises NoRealRoot when the radicand is negative beyond tolerance and
    DegenerateQuadratic when no isolated root exists.
    """
    scale = coeffs.scale()
    if scale == 0.0:
        raise DegenerateQuadratic("all coefficients vanish")
    a, b, c, d, e = coeffs.as_tuple()

    if math.isinf(t):
        if abs(a) <= tol * scale:
            raise DegenerateQuadratic("leading coefficient a vanishes at t = inf")
        r2 = -b / a
        if r2 < -tol:
            raise NoRealRoot("a u^2 + b = 0 has no real root")
        if r2 <= tol:
            return (0.0,)
        r = math.sqrt(r2)
        return (-r, r)

    qa = a * t * t + d
    qb = c * t
    qc = b * t * t + e
    mag = max(abs(qa), abs(qb), abs(qc))
    if mag == 0.0:
        raise DegenerateQuadratic("equation vanishes identically at this t")

    if abs(qa) <= tol * mag:
        # linear in u; the lost quadratic root is at infinity
        if abs(qb) <= tol * mag:
            raise DegenerateQuadratic("no u-dependence at this t")
        return (-qc / (2.0 * qb),)

    rad = qb * qb - qa * qc
    rad_scale = max(qb * qb, abs(qa * qc), tol)
    if rad < -1e-10 * rad_scale:
        raise NoRealRoot(f"radicand {rad} negative: dihedral unreachable")
    if rad <= tol * rad_scale:
        return (-qb / qa,)
    sq = math.sqrt(rad)
    if qb >= 0.0:
        q = -(qb + sq)
    else:
        q = -(qb - sq)
    r1, r2 = q / qa, qc / q
    return (r1, r2) if r1 <= r2 else (r2, r1)


# (names, tag, implied face relation); unicursal pairs listed first so that
# they win when both families vanish, e.g. for all faces equal
_VANISHING_TABLE = (
    (("b", "d"), UNICURSAL, "gamma = alpha, delta = beta"),
    (("a", "e"), UNICURSAL, "gamma = pi - alpha, delta = pi - beta"),
    (("b", "e"), RHOMBOIDAL, "delta = alpha, gamma = beta"),
    (("a", "d"), RHOMBOIDAL, "delta = pi - alpha, gamma = pi - beta"),
)


def classify(angles: FaceAngles, tol: float = 1e-9) -> LinkageClass:
    """Classify the linkage by which coefficient pairs vanish.

    A pair vanishes when both entries are at most ``tol`` times the largest
    coefficient magnitude.  Unicursal takes precedence over rhomboidal when
    pairs from both families vanish; every matching relation is recorded.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    co = tetra_coeffs(angles)
    vals = dict(zip("abcde", co.as_tuple()))
    s = co.scale()
    matches = [(pair, tag, rel) for pair, tag, rel in _VANISHING_TABLE
               if abs(vals[pair[0]]) <= tol * s and abs(vals[pair[1]]) <= tol * s]
    if not matches:
        return LinkageClass(GENERAL, None, "")
    pair, tag, _ = matches[0]
    relation = "; ".join(rel for _, _, rel in matches)
    return LinkageClass(tag, pair, relation)


def unicursal_constants(angles: FaceAngles, tol: float = 1e-9) -> UnicursalConstants:
    """Constants of the decomposed one-to-one relation t*u = k or t/u = k.

    For the product branch (opposite faces equal: gamma = alpha,
    delta = beta) the two factors are

        t*u = cos((alpha-beta)/2) / cos((alpha+beta)/2)      (k_a)
        t*u = sin((beta-alpha)/2) / sin((alpha+beta)/2)      (k_b)

    and for the ratio branch (opposite faces supplementary)

        t/u = sin((alpha-beta)/2) / sin((alpha+beta)/2)      (k_a)
        t/u = -cos((alpha-beta)/2) / cos((alpha+beta)/2)     (k_b).

    By Vieta on the decomposed quadratic, k_a * k_b = e/a on the product
    branch and d/b on the ratio branch.
    """
    cls = classify(angles, tol=tol)
    if cls.tag != UNICURSAL:
        raise NotUnicursal(f"linkage classified {cls.tag!r}, branch {cls.branch!r}")
    al, be = angles.alpha, angles.beta
    half_diff, half_sum = 0.5 * (al - be), 0.5 * (al + be)
    if cls.branch == ("b", "d"):
        return UnicursalConstants(
            PRODUCT,
            math.cos(half_diff) / math.cos(half_sum),
            -math.sin(half_diff) / math.sin(half_sum))
    return UnicursalConstants(
        RATIO,
        math.sin(half_diff) / math.sin(half_sum),
        -math.cos(half_diff) / math.cos(half_sum))


def reconstruct_angles(coeffs: TetraCoeffs, tol: float = 1e-9) -> tuple[FaceAngles, FaceAngles]:
    """Recover the two face-angle systems generating a coefficient vector.

    The principal system regenerates the input coefficients up to a
    positive scale; the second system is (alpha, pi - beta, gamma,
    pi - delta) and regenerates the index-reversed vector (e, d, c, b, a),
    the same linkage read through (t, u) -> (1/t, 1/u).

    Raises SingularC when c vanishes (the unicursal family admits
    infinitely many angle systems) and Unreal when a cosine leaves [-1, 1].
    """
    s = coeffs.scale()
    if s == 0.0 or abs(coeffs.c) <= tol * s:
        raise SingularC("c = 0: reconstruction is not unique")
    a, b, c, d, e = coeffs.as_tuple()
    if c > 0.0:  # normalize sign: generated coefficients always have c < 0
        a, b, c, d, e = -a, -b, -c, -d, -e

    slack = 64.0 * np.finfo(float).eps
    cos_alpha = -(a - b - d + e) / (2.0 * c)
    if abs(cos_alpha) > 1.0 + slack:
        raise Unreal(f"cos(alpha) = {cos_alpha} outside [-1, 1]")
    alpha = math.acos(min(1.0, max(-1.0, cos_alpha)))
    sin_alpha = math.sin(alpha)
    if sin_alpha <= slack:
        raise Unreal("alpha degenerates to 0 or pi")

    num = -2.0 * c * sin_alpha  # positive multiple of sin(beta), sin(delta)
    beta = math.atan2(num, a - b + d - e)
    delta = math.atan2(num, a + b - d - e)

    cos_gamma = (math.cos(alpha) * math.cos(beta) * math.cos(delta)
                 - (a + b + d + e) / (2.0 * c) * math.sin(beta) * math.sin(delta))
    if abs(cos_gamma) > 1.0 + slack:
        raise Unreal(f"cos(gamma) = {cos_gamma} outside [-1, 1]")
    if abs(cos_gamma) >= 1.0 - slack:
        raise Unreal("gamma degenerates to 0 or pi")
    gamma = math.acos(cos_gamma)

    first = FaceAngles(alpha, beta, gamma, delta)
    second = FaceAngles(alpha, math.pi - beta, gamma, math.pi - delta)
    return first, second


def opposite_dihedral_line(angles: FaceAngles) -> OppositeDihedralLine:
    """Linear relation between the cosines of the two opposite dihedrals.

    With phi the dihedral between faces alpha and beta and theta the
    dihedral on the opposite edge (between gamma and delta), the spherical
    law of cosines applied to the diagonal of the face cycle gives

        cos(alpha)cos(beta) + sin(alpha)sin(beta)cos(phi)
            = cos(gamma)cos(delta) + sin(gamma)sin(delta)cos(theta).
    """
    al, be, ga, de = angles.as_tuple()
    return OppositeDihedralLine(
        math.sin(al) * math.sin(be),
        -math.sin(ga) * math.sin(de),
        math.cos(al) * math.cos(be) - math.cos(ga) * math.cos(de))


def planar_fourbar_coeffs(a: float, b: float, c: float, d: float) -> TetraCoeffs:
    """Coefficients of the planar four-bar limit, sides (a, b, c, d).

    Letting the face angles shrink proportionally to the sides (the vertex
    recedes to infinity and the solid angle becomes prismatic), the
    coefficients vanish to second order; rescaled by the common factor they
    become polynomial in the sides:

        a' = (a+b+d)^2 - c^2     b' = (a+b-d)^2 - c^2     c' = -4 b d
        d' = (a-b+d)^2 - c^2     e' = (a-b-d)^2 - c^2

    Side a joins the two tracked joints, b and d are adjacent to them, c is
    opposite.  The same discriminant combination then equals 256 (abcd)^2,
    which cannot vanish for positive sides.
    """
    for name, v in zip("abcd", (a, b, c, d)):
        if v <= 0.0:
            raise ValueError(f"side {name}={v!r} must be positive")
    return TetraCoeffs(
        (a + b + d) ** 2 - c * c,
        (a + b - d) ** 2 - c * c,
        -4.0 * b * d,
        (a - b + d) ** 2 - c * c,
        (a - b - d) ** 2 - c * c)
