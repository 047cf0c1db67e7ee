"""First-order rigidity analysis and finite flexion by continuation.

The rigidity matrix stacks the gradients of the twelve squared edge-length
constraints; its co-rank beyond the six rigid-body motions counts the
independent infinitesimal flexes.  Finite flexion is traced by arc-length
predictor-corrector continuation: the predictor steps along the unit null
vector of the pinned constraint Jacobian, the corrector is a damped
Gauss-Newton iteration on the edge constraints plus six frame-pinning
constraints (one vertex fixed, a second on a fixed line through it, a
third in a fixed plane).

Flat (coplanar) configurations are first-order degenerate: every
out-of-plane displacement is an infinitesimal flex.  Paths starting flat
select their tangent by second-order analysis (the self-stress quadratic
forms must vanish on a genuine flex) and launch with a second-order
predictor.  Flat crossings met along a path are located by a local search
and recorded as events, not failures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .octahedron import (EDGE_ORDER, FACET_NAMES, Realization, all_dihedrals,
                         canonical_edge, coplanarity_measure, dihedral_angle,
                         edge_lengths, facet_points)

_VIDX = {v: i for i, v in enumerate("ABCDEF")}
_EDGE_IDX = [(_VIDX[e[0]], _VIDX[e[1]]) for e in EDGE_ORDER]


class NotFlexible(ValueError):
    """The starting realization admits no finite flex."""


class ContinuationStall(RuntimeError):
    """Corrector failed after reducing the step to its floor."""

    def __init__(self, message: str, partial: "FlexionPath"):
        super().__init__(message)
        self.partial = partial


class BranchAmbiguity(RuntimeError):
    """Tangent space dimension exceeded one away from a flat configuration."""

    def __init__(self, message: str, partial: "FlexionPath"):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class RigidityReport:
    singular_values: np.ndarray
    rank: int
    flex_dimension: int
    degenerate_flag: bool


@dataclass(frozen=True)
class DriveSpec:
    """Continuation controls.

    The driven edge's signed dihedral acts as a stopping monitor only; the
    path itself is parameterized by arc length, since dihedral
    parameterization is singular exactly at flat configurations.  Step
    sizes are relative to the starting diameter.
    """

    edge: str = "BC"
    dihedral_range: tuple[float, float] = (-math.pi, math.pi)
    direction: int = +1
    max_steps: int = 200
    initial_step: float = 0.02
    max_step: float = 0.05
    min_step_factor: float = 1e-6
    corrector_tol: float = 1e-12
    max_newton: int = 25
    rank_tol: float = 1e-7
    flat_event_tol: float = 1e-6
    stop_after_flat_events: int | None = None
    refine_flat_events: bool = True
    track_facet_crossings: bool = False
    pin: tuple[str, str, str] = ("A", "B", "C")


@dataclass(frozen=True)
class PathFrame:
    realization: Realization
    arclength: float
    dihedrals: dict[str, float]
    max_edge_deviation: float
    flat_measure: float
    flat: bool


@dataclass
class PathEvent:
    kind: str
    frame_index: int
    info: dict


@dataclass
class FlexionPath:
    frames: list[PathFrame]
    events: list[PathEvent] = field(default_factory=list)
    termination: str = ""
    drive: DriveSpec | None = None
    meta: dict = field(default_factory=dict)

    def arclengths(self) -> np.ndarray:
        return np.array([f.arclength for f in self.frames])

    def dihedral_series(self, edge: str) -> np.ndarray:
        e = canonical_edge(edge[0], edge[1])
        return np.array([f.dihedrals[e] for f in self.frames])

    def flat_events(self) -> list[PathEvent]:
        return [ev for ev in self.events if ev.kind == "flat"]


def rigidity_matrix(r: Realization, el: dict[str, float] | None = None) -> np.ndarray:
    """12 x 18 Jacobian of the squared edge-length constraints."""
    x = r.points
    m = np.zeros((12, 18))
    for row, (i, j) in enumerate(_EDGE_IDX):
        d = 2.0 * (x[i] - x[j])
        m[row, 3 * i:3 * i + 3] = d
        m[row, 3 * j:3 * j + 3] = -d
    return m


def flex_dimension(r: Realization, el: dict[str, float] | None = None,
                   rank_tol: float = 1e-7) -> RigidityReport:
    """Numerical rank of the rigidity matrix and the flex count 18 - 6 - rank.

    Coplanar realizations are flagged degenerate: every out-of-plane
    displacement is then a first-order flex, so the reported dimension
    overcounts finite flexes there.
    """
    sv = np.linalg.svd(rigidity_matrix(r, el), compute_uv=False)
    rank = int(np.sum(sv > rank_tol * sv[0])) if sv[0] > 0 else 0
    return RigidityReport(
        singular_values=sv,
        rank=rank,
        flex_dimension=18 - 6 - rank,
        degenerate_flag=coplanarity_measure(r) <= 1e-6)


def detect_flat(r: Realization, tol: float = 1e-8) -> tuple[float, bool]:
    """Coplanarity measure (smallest singular value of the centered
    coordinates over their norm) and whether it is at most tol."""
    m = coplanarity_measure(r)
    return m, m <= tol


# ---------------------------------------------------------------------------
# facet-facet intersections


def _tri_tri_cross(t1: np.ndarray, t2: np.ndarray, tol: float) -> bool:
    """True when two triangles intersect in more than a shared point.

    Interval test on the plane-intersection line; coplanar pairs fall back
    to a polygon-clip area test.  A contact limited to a single point (for
    example a shared vertex) does not count.
    """
    n1 = np.cross(t1[1] - t1[0], t1[2] - t1[0])
    n2 = np.cross(t2[1] - t2[0], t2[2] - t2[0])
    s1, s2 = np.linalg.norm(n1), np.linalg.norm(n2)
    if s1 == 0.0 or s2 == 0.0:
        return False
    n1, n2 = n1 / s1, n2 / s2
    d2 = (t2 - t1[0]) @ n1
    d1 = (t1 - t2[0]) @ n2
    if np.all(d2 > tol) or np.all(d2 < -tol):
        return False
    if np.all(d1 > tol) or np.all(d1 < -tol):
        return False

    if np.max(np.abs(d2)) <= tol and np.max(np.abs(d1)) <= tol:
        # coplanar: Sutherland-Hodgman clip of t2 by t1, 2-d area test
        axis = int(np.argmax(np.abs(n1)))
        keep = [k for k in range(3) if k != axis]
        p1 = t1[:, keep]
        poly = [q for q in t2[:, keep]]
        sign = np.sign((p1[1] - p1[0])[0] * (p1[2] - p1[0])[1]
                       - (p1[1] - p1[0])[1] * (p1[2] - p1[0])[0]) or 1.0
        for k in range(3):
            a, b = p1[k], p1[(k + 1) % 3]
            edge = b - a
            nxt = []
            for i in range(len(poly)):
                p, q = poly[i], poly[(i + 1) % len(poly)]
                sp = sign * (edge[0] * (p - a)[1] - edge[1] * (p - a)[0])
                sq = sign * (edge[0] * (q - a)[1] - edge[1] * (q - a)[0])
                if sp >= -tol:
                    nxt.append(p)
                if (sp > tol and sq < -tol) or (sp < -tol and sq > tol):
                    lam = sp / (sp - sq)
                    nxt.append(p + lam * (q - p))
            poly = nxt
            if not poly:
                return False
        area = 0.0
        for i in range(1, len(poly) - 1):
            area += 0.5 * abs((poly[i] - poly[0])[0] * (poly[i + 1] - poly[0])[1]
                              - (poly[i] - poly[0])[1] * (poly[i + 1] - poly[0])[0])
        return area > tol * tol

    line = np.cross(n1, n2)
    ln = np.linalg.norm(line)
    if ln == 0.0:
        return False
    line = line / ln

    def interval(tri, dist):
        pts = tri @ line
        params = []
        for i in range(3):
            if abs(dist[i]) <= tol:
                params.append(pts[i])
        for i in range(3):
            j = (i + 1) % 3
            if dist[i] * dist[j] < -tol * tol:
                lam = dist[i] / (dist[i] - dist[j])
                params.append(pts[i] + lam * (pts[j] - pts[i]))
        if not params:
            return None
        return min(params), max(params)

    i1 = interval(t1, d1)
    i2 = interval(t2, d2)
    if i1 is None or i2 is None:
        return False
    overlap = min(i1[1], i2[1]) - max(i1[0], i2[0])
    return overlap > tol


def facet_crossings(r: Realization, tol: float | None = None) -> list[tuple[str, str]]:
    """Pairs of non-adjacent facets whose closed triangles intersect.

    Facet pairs sharing an edge are excluded; pairs sharing only a vertex
    count as crossing when the intersection extends beyond the shared
    point.  Crossing facets are the signature of the concave, mutually
    piercing realizations traced out by flexible octahedra.
    """
    if tol is None:
        tol = 1e-9 * r.diameter()
    tris = {name: facet_points(r, name) for name in FACET_NAMES}
    out = []
    for i in range(len(FACET_NAMES)):
        for j in range(i + 1, len(FACET_NAMES)):
            f1, f2 = FACET_NAMES[i], FACET_NAMES[j]
            if len(set(f1) & set(f2)) >= 2:
                continue
            if _tri_tri_cross(tris[f1], tris[f2], tol):
                out.append((f1, f2))
    return out


# ---------------------------------------------------------------------------
# continuation


class _System:
    """Edge + pin constraint system in the 18 coordinates.

    Each squared-length residual is normalized by its own target, so the
    corrector tolerance bounds the relative length error of every edge
    uniformly, short edges included.
    """

    def __init__(self, r0: Realization, el: dict[str, float], pin: tuple[str, str, str]):
        self.x0 = r0.flat_vector()
        self.diam = r0.diameter()
        self.targets2 = np.array([el[e] ** 2 for e in EDGE_ORDER])
        self.target_len = np.sqrt(self.targets2)
        i0, i1, i2 = (_VIDX[v] for v in pin)
        p = r0.points
        e1 = p[i1] - p[i0]
        e1 = e1 / np.linalg.norm(e1)
        n = np.cross(e1, p[i2] - p[i0])
        nn = np.linalg.norm(n)
        if nn == 0.0:
            raise ValueError("pin vertices are collinear")
        n = n / nn
        e2 = np.cross(n, e1)
        rows = np.zeros((6, 18))
        for k in range(3):
            rows[k, 3 * i0 + k] = 1.0
        for k, vec in ((3, e2), (4, n)):
            rows[k, 3 * i1:3 * i1 + 3] = vec
            rows[k, 3 * i0:3 * i0 + 3] = -vec
        rows[5, 3 * i2:3 * i2 + 3] = n
        rows[5, 3 * i0:3 * i0 + 3] = -n
        self.pin_rows = rows / self.diam

    def edge_residual(self, x: np.ndarray) -> np.ndarray:
        p = x.reshape(6, 3)
        l2 = np.array([np.sum((p[i] - p[j]) ** 2) for i, j in _EDGE_IDX])
        return (l2 - self.targets2) / self.targets2

    def residual(self, x: np.ndarray) -> np.ndarray:
        return np.concatenate([self.edge_residual(x), self.pin_rows @ (x - self.x0)])

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        rows = rigidity_matrix(Realization.from_flat(x)) / self.targets2[:, None]
        return np.vstack([rows, self.pin_rows])

    def correct(self, x_pred: np.ndarray, x_ref: np.ndarray, tau: np.ndarray,
                h: float, tol: float, max_newton: int) -> tuple[np.ndarray, bool]:
        """Damped Gauss-Newton on constraints plus the arclength row."""
        x = x_pred.copy()
        arc_row = tau[None, :] / self.diam
        for it in range(max_newton):
            res = self.residual(x)
            if np.max(np.abs(res)) < tol and it > 0:
                return x, True
            fv = np.concatenate([res, [float(tau @ (x - x_ref)) / self.diam - h]])
            jac = np.vstack([self.jacobian(x), arc_row])
            dx = np.linalg.lstsq(jac, -fv, rcond=None)[0]
            base = float(np.linalg.norm(fv))
            lam = 1.0
            for _ in range(12):
                xn = x + lam * dx
                fn = np.concatenate([self.residual(xn),
                                     [float(tau @ (xn - x_ref)) / self.diam - h]])
                if np.linalg.norm(fn) < base:
                    break
                lam *= 0.5
            x = x + lam * dx
        return x, bool(np.max(np.abs(self.residual(x))) < tol)

    def null_space(self, x: np.ndarray, rank_tol: float) -> np.ndarray:
        _, sv, vt = np.linalg.svd(self.jacobian(x))
        if sv[0] == 0.0:
            return vt
        return vt[sv < rank_tol * sv[0]]

    def left_null(self, x: np.ndarray, rank_tol: float) -> np.ndarray:
        u, sv, _ = np.linalg.svd(self.jacobian(x))
        return u[:, sv < rank_tol * sv[0]].T

    def stress_quadric(self, lam: np.ndarray, basis: np.ndarray) -> np.ndarray:
        """Quadratic form of one self-stress restricted to a null-space basis."""
        k = basis.shape[0]
        m = np.zeros((k, k))
        for row, (i, j) in enumerate(_EDGE_IDX):
            wd = basis[:, 3 * i:3 * i + 3] - basis[:, 3 * j:3 * j + 3]
            m += lam[row] * 2.0 * (wd @ wd.T) / self.targets2[row]
        return m

    def acceleration(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Least-squares curve acceleration for the second-order predictor."""
        rhs = np.zeros(18)
        for row, (i, j) in enumerate(_EDGE_IDX):
            dv = v[3 * i:3 * i + 3] - v[3 * j:3 * j + 3]
            rhs[row] = -2.0 * float(dv @ dv) / self.targets2[row]
        return np.linalg.lstsq(self.jacobian(x), rhs, rcond=None)[0]


def _common_quadric_zero(mats: list[np.ndarray], rng_seed: int = 0) -> list[np.ndarray]:
    """Unit vectors annihilating every quadratic form in mats.

    With three forms in three unknowns, an indefinite form is parameterized
    as a cone and the next form is root-found along it; survivors are
    filtered by the rest.  Other shapes use a sampled Gauss-Newton search.
    """
    if not mats:
        return []
    k = mats[0].shape[0]
    norms = [max(np.linalg.norm(m), 1e-30) for m in mats]

    def polish(u):
        u = np.asarray(u, dtype=float)
        for _ in range(100):
            q = np.array([u @ m @ u for m in mats])
            jq = np.array([2.0 * m @ u for m in mats])
            du, *_ = np.linalg.lstsq(jq, -q, rcond=None)
            un = u + du
            nn = np.linalg.norm(un)
            if nn == 0.0:
                return None
            un = un / nn
            if np.linalg.norm(un - u) < 1e-15:
                u = un
                break
            u = un
        rel = max(abs(u @ m @ u) / n for m, n in zip(mats, norms))
        return u if rel < 1e-9 else None

    sols: list[np.ndarray] = []

    def push(u):
        if u is None:
            return
        if all(abs(float(s @ u)) < 1.0 - 1e-6 for s in sols):
            sols.append(u)

    if k == 3 and len(mats) >= 2:
        for first in range(len(mats)):
            w, vec = np.linalg.eigh(mats[first])
            pos = [i for i in range(3) if w[i] > 0]
            neg = [i for i in range(3) if w[i] < 0]
            if not pos or not neg:
                continue
            second = (first + 1) % len(mats)

            def on_cone(th):
                if len(pos) == 2:
                    return (math.cos(th) / math.sqrt(w[pos[0]]) * vec[:, pos[0]]
                            + math.sin(th) / math.sqrt(w[pos[1]]) * vec[:, pos[1]]
                            + vec[:, neg[0]] / math.sqrt(-w[neg[0]]))
                return (math.cos(th) / math.sqrt(-w[neg[0]]) * vec[:, neg[0]]
                        + math.sin(th) / math.sqrt(-w[neg[1]]) * vec[:, neg[1]]
                        + vec[:, pos[0]] / math.sqrt(w[pos[0]]))

            def g2(th):
                z = on_cone(th)
                return float(z @ mats[second] @ z)

            ths = np.linspace(0.0, 2.0 * math.pi, 2001)
            gv = np.array([g2(t) for t in ths])
            for i in range(len(ths) - 1):
                if gv[i] == 0.0 or gv[i] * gv[i + 1] < 0.0:
                    a, b = ths[i], ths[i + 1]
                    ga = gv[i]
                    for _ in range(80):
                        mid = 0.5 * (a + b)
                        gm = g2(mid)
                        if ga * gm <= 0.0:
                            b = mid
                        else:
                            a, ga = mid, gm
                    z = on_cone(0.5 * (a + b))
                    push(polish(z / np.linalg.norm(z)))
            if sols:
                return sols

    rng = np.random.default_rng(rng_seed)
    samples = rng.normal(size=(4096, k))
    samples /= np.linalg.norm(samples, axis=1, keepdims=True)
    score = np.zeros(len(samples))
    for m, n in zip(mats, norms):
        score += np.abs(np.einsum("ni,ij,nj->n", samples, m, samples)) / n
    for idx in np.argsort(score)[:24]:
        push(polish(samples[idx]))
    return sols


def _flat_start_tangent(sys: _System, x0: np.ndarray, null: np.ndarray,
                        drive: DriveSpec) -> tuple[np.ndarray, np.ndarray]:
    """Second-order tangent and acceleration for leaving a flat configuration."""
    stresses = sys.left_null(x0, drive.rank_tol)
    mats = [sys.stress_quadric(lam[:12], null) for lam in stresses]
    candidates = _common_quadric_zero(mats) if mats else [np.eye(null.shape[0])[0]]
    h = drive.initial_step
    best = None
    for u in candidates:
        v = null.T @ u
        v = v / np.linalg.norm(v)
        acc = sys.acceleration(x0, v)
        step = h * sys.diam
        x_pred = x0 + step * v + 0.5 * step * step * acc
        x_new, ok = sys.correct(x_pred, x0, v, h, drive.corrector_tol,
                                2 * drive.max_newton)
        if not ok:
            continue
        corr = float(np.linalg.norm(x_new - x_pred))
        if best is None or corr < best[0]:
            best = (corr, v, acc)
    if best is None:
        raise NotFlexible("flat configuration has no finite flex "
                          "(no first-order flex extends to second order)")
    return best[1], best[2]


def _wrap_angle(a: float) -> float:
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def _make_frame(sys: _System, x: np.ndarray, arc: float, flat_tol: float) -> PathFrame:
    r = Realization.from_flat(x)
    p = x.reshape(6, 3)
    lens = np.array([np.linalg.norm(p[i] - p[j]) for i, j in _EDGE_IDX])
    dev = float(np.max(np.abs(lens - sys.target_len) / sys.target_len))
    measure = coplanarity_measure(r)
    return PathFrame(realization=r, arclength=arc,
                     dihedrals=all_dihedrals(r), max_edge_deviation=dev,
                     flat_measure=measure, flat=measure <= flat_tol)


def flex_path(r0: Realization, el: dict[str, float] | None = None,
              drive: DriveSpec = DriveSpec()) -> FlexionPath:
    """Trace an edge-length-preserving deformation from r0.

    Raises NotFlexible when the start has no flex.  A corrector failure
    after step reduction to the floor raises ContinuationStall carrying the
    partial path; a tangent-space ambiguity away from flat configurations
    raises BranchAmbiguity the same way.
    """
    if el is None:
        el = edge_lengths(r0, check=False)
    report = flex_dimension(r0, el, rank_tol=drive.rank_tol)
    if report.flex_dimension < 1:
        raise NotFlexible(f"flex dimension {report.flex_dimension}; rank {report.rank}")

    sys = _System(r0, el, drive.pin)
    x = r0.flat_vector()
    path = FlexionPath(frames=[], drive=drive, meta={
        "corrector_tol": drive.corrector_tol,
        "max_newton": drive.max_newton,
        "rank_tol": drive.rank_tol,
        "initial_step": drive.initial_step,
        "min_step_factor": drive.min_step_factor,
        "pin": list(drive.pin)})
    frame0 = _make_frame(sys, x, 0.0, drive.flat_event_tol)
    path.frames.append(frame0)
    flat_events = 0
    if frame0.flat:
        path.events.append(PathEvent("flat", 0, {"measure": frame0.flat_measure}))
        flat_events += 1
        if drive.stop_after_flat_events is not None \
                and flat_events >= drive.stop_after_flat_events:
            path.termination = "flat_event_target"
            return path

    null = sys.null_space(x, drive.rank_tol)
    acc = None
    if null.shape[0] == 0:
        raise NotFlexible("pinned system has no tangent direction")
    if null.shape[0] == 1:
        tau = null[0]
    elif frame0.flat:
        tau, acc = _flat_start_tangent(sys, x, null, drive)
    else:
        raise BranchAmbiguity(
            f"tangent space dimension {null.shape[0]} at a non-flat start", path)

    if not frame0.flat:
        # orient so the driven dihedral initially moves with drive.direction
        eps = 1e-6 * sys.diam
        e = canonical_edge(drive.edge[0], drive.edge[1])
        d0 = dihedral_angle(Realization.from_flat(x), e)
        d1 = dihedral_angle(Realization.from_flat(x + eps * tau), e)
        delta = _wrap_angle(d1 - d0)
        if abs(delta) > 1e-12 and math.copysign(1.0, delta) != drive.direction:
            tau = -tau
            # acceleration is even in the tangent, nothing else to flip

    crossings = _facet_crossing_set(r0) if drive.track_facet_crossings else None

    h = drive.initial_step
    h_floor = drive.initial_step * drive.min_step_factor
    arc = 0.0
    lo, hi = drive.dihedral_range
    tangents = [tau]

    def refine_flat(idx: int) -> int:
        """Search the coplanarity dip bracketed around frame idx; insert the
        minimizing frame and return the event frame index."""
        base = path.frames[idx - 1]
        t_base = tangents[idx - 1]
        x_base = base.realization.flat_vector()
        if idx + 1 < len(path.frames):
            width = path.frames[idx + 1].arclength - base.arclength
        else:
            width = 2.0 * (path.frames[idx].arclength - base.arclength)
        cache: dict[float, tuple[float, np.ndarray | None]] = {}

        def probe(a: float) -> float:
            if a not in cache:
                xp = x_base + a * width * sys.diam * t_base
                xq, ok = sys.correct(xp, x_base, t_base, a * width,
                                     drive.corrector_tol, 2 * drive.max_newton)
                cache[a] = ((coplanarity_measure(Realization.from_flat(xq)), xq)
                            if ok else (math.inf, None))
            return cache[a][0]

        gr = (math.sqrt(5.0) - 1.0) / 2.0
        a_lo, a_hi = 0.0, 1.0
        c = a_hi - gr * (a_hi - a_lo)
        d = a_lo + gr * (a_hi - a_lo)
        fc, fd = probe(c), probe(d)
        for _ in range(60):
            if fc < fd:
                a_hi, d, fd = d, c, fc
                c = a_hi - gr * (a_hi - a_lo)
                fc = probe(c)
            else:
                a_lo, c, fc = c, d, fd
                d = a_lo + gr * (a_hi - a_lo)
                fd = probe(d)
        a_best = c if fc < fd else d
        m_best, x_best = cache[a_best]
        if x_best is None or m_best >= path.frames[idx].flat_measure:
            return idx
        arc_best = base.arclength + float(np.linalg.norm(x_best - x_base)) / sys.diam
        frame = _make_frame(sys, x_best, arc_best, drive.flat_event_tol)
        insert_at = idx if arc_best <= path.frames[idx].arclength else idx + 1
        path.frames.insert(insert_at, frame)
        tangents.insert(insert_at, t_base)
        for ev in path.events:
            if ev.frame_index >= insert_at:
                ev.frame_index += 1
        return insert_at

    step_count = 0
    while step_count < drive.max_steps:
        x_pred = x + h * sys.diam * tau
        if acc is not None:
            x_pred = x_pred + 0.5 * (h * sys.diam) ** 2 * acc
        x_new, ok = sys.correct(x_pred, x, tau, h, drive.corrector_tol,
                                drive.max_newton)
        if not ok:
            h *= 0.5
            if h < h_floor:
                path.termination = "stall"
                raise ContinuationStall(
                    f"corrector failed at step {step_count}, step size {h:g}", path)
            continue
        acc = None

        arc += float(np.linalg.norm(x_new - x)) / sys.diam
        step_count += 1
        frame = _make_frame(sys, x_new, arc, drive.flat_event_tol)
        path.frames.append(frame)

        null = sys.null_space(x_new, drive.rank_tol)
        if null.shape[0] == 0:
            path.termination = "rank_loss"
            break
        if null.shape[0] > 1:
            proj = null.T @ (null @ tau)
            nn = float(np.linalg.norm(proj))
            if frame.flat_measure > 10.0 * drive.flat_event_tol and nn < 0.9:
                path.events.append(PathEvent("branch_ambiguity", len(path.frames) - 1,
                                             {"dimension": int(null.shape[0])}))
                path.termination = "branch_ambiguity"
                raise BranchAmbiguity(
                    f"tangent dimension {null.shape[0]} at step {step_count}", path)
            tau_new = proj / nn
        else:
            tau_new = null[0]
        if float(tau_new @ tau) < 0.0:
            tau_new = -tau_new
        tau = tau_new
        x = x_new
        tangents.append(tau)

        mid = len(path.frames) - 2
        if (drive.refine_flat_events and mid >= 1
                and path.frames[mid].flat_measure < 1e-2
                and path.frames[mid].flat_measure < path.frames[mid - 1].flat_measure
                and path.frames[mid].flat_measure <= path.frames[mid + 1].flat_measure
                and not any(ev.kind == "flat" and abs(ev.frame_index - mid) <= 1
                            for ev in path.events)):
            ev_idx = refine_flat(mid)
            measure = path.frames[ev_idx].flat_measure
            if measure <= drive.flat_event_tol:
                path.events.append(PathEvent("flat", ev_idx, {"measure": measure}))
                flat_events += 1
                if drive.stop_after_flat_events is not None \
                        and flat_events >= drive.stop_after_flat_events:
                    path.termination = "flat_event_target"
                    break

        if crossings is not None:
            now = _facet_crossing_set(frame.realization)
            if now != crossings:
                path.events.append(PathEvent(
                    "facet_crossing_change", len(path.frames) - 1,
                    {"gained": sorted(map(list, now - crossings)),
                     "lost": sorted(map(list, crossings - now))}))
                crossings = now

        d = frame.dihedrals[canonical_edge(drive.edge[0], drive.edge[1])]
        if not (lo <= d <= hi):
            path.termination = "range_exit"
            break

        h = min(h * 1.4, drive.max_step)

    if not path.termination:
        path.termination = "max_steps"
    return path


def _facet_crossing_set(r: Realization) -> frozenset:
    return frozenset(facet_crossings(r))
