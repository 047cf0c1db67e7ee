"""Independent checks of the structural theorems along realizations and paths.

Covered: the concurrency of the three facet planes through the sides of a
base facet at a point of the opposite facet plane (valid along deformations),
the equal-or-supplementary covariance of opposite dihedrals, the constancy
of the four skew hexagons' sides and angles, and the linear relation between
the cosines of opposite dihedrals at each vertex, fitted empirically and
compared against its closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linkage import OppositeDihedralLine, opposite_dihedral_line
from .octahedron import (EDGE_FACETS, OPPOSITE_EDGES, VERTEX_CYCLES,
                         Realization, canonical_edge, facet_normal,
                         opposite_pair_cosines)
from .flexion import FlexionPath

HEXAGONS = ("ABCDEF", "ABFDEC", "AECDBF", "AEFDBC")

_OPPOSITE_FACET = {"ABC": "DEF", "DEF": "ABC", "BCD": "AEF", "AEF": "BCD",
                   "CAE": "BFD", "BFD": "CAE", "ABF": "CDE", "CDE": "ABF"}


class NearParallelPlanes(ValueError):
    """The three facet planes are too close to parallel to intersect reliably."""


class InsufficientFrames(ValueError):
    """Too few path frames for the requested fit."""


@dataclass(frozen=True)
class ConcurrencyResult:
    base: str
    point: np.ndarray
    spread: float
    residual: float


def mannheim_point(r: Realization, base: str = "ABC",
                   cond_tol: float = 1e-4) -> ConcurrencyResult:
    """Meet of the facet planes through the sides of ``base``, measured
    against the opposite facet's plane.

    For a deformable octahedron the three planes are the normal planes of
    the opposite facet's vertex trajectories, so their common point lies on
    the opposite facet's plane.  The residual is that distance over the
    diameter.  Raises NearParallelPlanes when the smallest over largest
    singular value of the normal matrix falls below cond_tol; the meet
    point error grows with the square of the conditioning (all three
    planes coincide at flat positions), so the default keeps evaluated
    residuals trustworthy to about 1e-8.
    """
    if base not in _OPPOSITE_FACET:
        raise ValueError(f"unknown facet {base!r}")
    sides = [canonical_edge(base[i], base[(i + 1) % 3]) for i in range(3)]
    normals = []
    offsets = []
    for e in sides:
        facet = next(f for f in EDGE_FACETS[e] if f != base)
        n = facet_normal(r, facet)
        normals.append(n)
        offsets.append(float(n @ r[facet[0]]))
    a = np.array(normals)
    b = np.array(offsets)
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[-1] < cond_tol * sv[0]:
        raise NearParallelPlanes(f"plane normal conditioning {sv[-1]/sv[0]:.2e}")
    point = np.linalg.solve(a, b)

    diam = r.diameter()
    spread = 0.0
    for i in range(3):
        j = (i + 1) % 3
        d = np.cross(a[i], a[j])
        dn = np.linalg.norm(d)
        if dn == 0.0:
            continue
        # a point on the intersection line of planes i and j
        m = np.array([a[i], a[j]])
        p0, *_ = np.linalg.lstsq(m, np.array([b[i], b[j]]), rcond=None)
        v = point - p0
        dist = np.linalg.norm(v - (v @ (d / dn)) * (d / dn))
        spread = max(spread, float(dist) / diam)

    opp = _OPPOSITE_FACET[base]
    n_opp = facet_normal(r, opp)
    residual = abs(float(n_opp @ point) - float(n_opp @ r[opp[0]])) / diam
    return ConcurrencyResult(base=base, point=point, spread=spread, residual=residual)


@dataclass(frozen=True)
class PairRelation:
    pair: tuple[str, str]
    relation: str  # "equal" | "supplementary" | "none"
    dev_equal: float
    dev_supplementary: float


def opposite_dihedral_trace(path: FlexionPath, classify_below: float = 1e-6,
                            reject_above: float = 1e-3) -> list[PairRelation]:
    """Classify each opposite edge pair as equal or supplementary in cosine
    over the whole path.

    A pair is labeled only when one branch's deviation stays below
    ``classify_below`` while the other exceeds ``reject_above``; otherwise
    the relation is reported as none with both deviations.  A single-frame
    path classifies trivially by the smaller deviation.
    """
    if not path.frames:
        raise InsufficientFrames("empty path")
    out = []
    for e1, e2 in OPPOSITE_EDGES:
        c1 = np.cos(path.dihedral_series(e1))
        c2 = np.cos(path.dihedral_series(e2))
        dev_eq = float(np.max(np.abs(c1 - c2)))
        dev_su = float(np.max(np.abs(c1 + c2)))
        if dev_eq <= classify_below and dev_su >= reject_above:
            rel = "equal"
        elif dev_su <= classify_below and dev_eq >= reject_above:
            rel = "supplementary"
        elif len(path.frames) == 1:
            rel = "equal" if dev_eq <= dev_su else "supplementary"
        else:
            rel = "none"
        out.append(PairRelation((e1, e2), rel, dev_eq, dev_su))
    return out


@dataclass(frozen=True)
class HexagonTrace:
    hexagon: str
    sides: tuple[str, ...]
    max_side_variation: float       # relative to the initial length
    max_angle_variation: float      # radians


def hexagon_sides(hexagon: str) -> tuple[str, ...]:
    return tuple(canonical_edge(hexagon[i], hexagon[(i + 1) % 6]) for i in range(6))


def hexagon_traces(path: FlexionPath) -> list[HexagonTrace]:
    """Side-length and interior-angle variation of the four skew hexagons.

    Every deformable octahedron carries four closed hexagons whose sides
    are octahedron edges and whose vertex angles are facet angles, so both
    stay constant along any edge-preserving path; the reported variations
    double as a consistency check of the path itself.
    """
    if not path.frames:
        raise InsufficientFrames("empty path")
    out = []
    for hexagon in HEXAGONS:
        sides = hexagon_sides(hexagon)
        side_var = 0.0
        ref_len = None
        angle_ref = None
        angle_var = 0.0
        for f in path.frames:
            r = f.realization
            lens = np.array([np.linalg.norm(r[e[0]] - r[e[1]]) for e in sides])
            if ref_len is None:
                ref_len = lens
            side_var = max(side_var, float(np.max(np.abs(lens - ref_len) / ref_len)))
            angles = []
            for i in range(6):
                prev_v = hexagon[(i - 1) % 6]
                v = hexagon[i]
                nxt = hexagon[(i + 1) % 6]
                u1 = r[prev_v] - r[v]
                u2 = r[nxt] - r[v]
                c = float(u1 @ u2 / (np.linalg.norm(u1) * np.linalg.norm(u2)))
                angles.append(math.acos(min(1.0, max(-1.0, c))))
            angles = np.array(angles)
            if angle_ref is None:
                angle_ref = angles
            angle_var = max(angle_var, float(np.max(np.abs(angles - angle_ref))))
        out.append(HexagonTrace(hexagon, sides, side_var, angle_var))
    return out


@dataclass(frozen=True)
class CosineLineFit:
    vertex: str
    pair: tuple[str, str]
    line: OppositeDihedralLine
    max_residual: float
    analytic: OppositeDihedralLine
    agreement: float
    degenerate: bool


def vertex_opposite_pairs(vertex: str) -> list[tuple[str, str]]:
    """The two opposite edge pairs of the tetrahedral angle at a vertex."""
    cyc = VERTEX_CYCLES[vertex]
    return [(cyc[0], cyc[2]), (cyc[1], cyc[3])]


def dihedral_cos_line_fit(path: FlexionPath, vertex: str,
                          pair: tuple[str, str]) -> CosineLineFit:
    """Total-least-squares line through the (cos phi, cos theta) samples of
    two opposite dihedrals at a vertex, compared with the closed form.

    The fitted and analytic lines are unit-normalized; agreement is their
    distance up to sign.  Requires at least three frames; a rank-deficient
    sample cloud (constant dihedrals) is flagged degenerate.
    """
    if len(path.frames) < 3:
        raise InsufficientFrames(f"{len(path.frames)} frames, need at least 3")
    angles, _, _ = opposite_pair_cosines(path.frames[0].realization, vertex, pair)
    e1 = canonical_edge(vertex, pair[0])
    e2 = canonical_edge(vertex, pair[1])
    c1 = np.cos(path.dihedral_series(e1))
    c2 = np.cos(path.dihedral_series(e2))
    m = np.column_stack([c1, c2, np.ones_like(c1)])
    _, sv, vt = np.linalg.svd(m, full_matrices=False)
    coeffs = vt[-1]
    degenerate = bool(sv[1] <= 1e-12 * sv[0])
    line = OppositeDihedralLine(*map(float, coeffs)).normalized()
    fit_vec = np.array([line.l, line.m, line.n])
    max_residual = float(np.max(np.abs(m @ fit_vec)))
    analytic = opposite_dihedral_line(angles).normalized()
    ana_vec = np.array([analytic.l, analytic.m, analytic.n])
    agreement = float(min(np.linalg.norm(fit_vec - ana_vec),
                          np.linalg.norm(fit_vec + ana_vec)))
    return CosineLineFit(vertex, pair, line, max_residual, analytic,
                         agreement, degenerate)
