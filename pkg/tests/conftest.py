"""Shared fixtures: seeded rng and input samplers for the three builders.

The sampling seed is fixed by the FLEXOCT_SEED environment variable so the
randomized suite is reproducible.  Samplers use rejection: a draw counts
only when the builder's own well-posedness conditions hold (no degenerate
facets, vertices clear of the symmetry axis, the mirror assembly closes,
triangles scalene with the concurrency point off every bisector).
"""

import os

import numpy as np
import pytest

from flexoct import builders, flexion
from flexoct.octahedron import Realization

SEED = int(os.environ.get("FLEXOCT_SEED", "20260808"))


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


def sample_type1_inputs(rng, n, require_mirror=True):
    """Point triples (A, B, F) for the half-turn builders about the z axis."""
    out = []
    attempts = 0
    while len(out) < n:
        attempts += 1
        if attempts > 60 * n:
            raise RuntimeError("type 1 sampler failed to converge")
        pa, pb, pf = rng.uniform(-1.0, 1.0, (3, 3))
        if min(np.linalg.norm(pa[:2]), np.linalg.norm(pb[:2]),
               np.linalg.norm(pf[:2])) < 0.25:
            continue
        try:
            r = builders.build_type1(pa, pb, pf)
        except builders.DegenerateInput:
            continue
        if flexion.flex_dimension(r).flex_dimension != 1:
            continue
        if require_mirror:
            try:
                builders.build_type1_mirror(pa, pb, pf)
            except builders.DegenerateInput:
                continue
        out.append((pa, pb, pf))
    return out


def sample_type2_inputs(rng, n):
    """Tuples (C, F, A, E) with C, F on the y = 0 plane."""
    out = []
    attempts = 0
    while len(out) < n:
        attempts += 1
        if attempts > 60 * n:
            raise RuntimeError("type 2 sampler failed to converge")
        pc = np.array([rng.uniform(-1, 1), 0.0, rng.uniform(0.4, 1.2)])
        pf = np.array([rng.uniform(-1, 1), 0.0, rng.uniform(-1.2, -0.4)])
        pa = np.array([rng.uniform(0.2, 1.2), rng.uniform(0.3, 1.0),
                       rng.uniform(-0.5, 0.5)])
        pe = np.array([rng.uniform(-1.2, -0.2), rng.uniform(0.3, 1.0),
                       rng.uniform(-0.5, 0.5)])
        try:
            r = builders.build_type2(pc, pf, pa, pe)
        except (builders.DegenerateInput, builders.PointsNotOnPlane):
            continue
        if flexion.flex_dimension(r).flex_dimension != 1:
            continue
        out.append((pc, pf, pa, pe))
    return out


def sample_type3_triangles(rng, n):
    """Scalene triangles (A, B, C) in the plane; the centroid is the
    concurrency point."""
    out = []
    attempts = 0
    while len(out) < n:
        attempts += 1
        if attempts > 60 * n:
            raise RuntimeError("type 3 sampler failed to converge")
        pa = np.zeros(2)
        pb = np.array([rng.uniform(2.0, 4.0), 0.0])
        pc = np.array([rng.uniform(0.3, 3.0), rng.uniform(0.8, 3.0)])
        sides = sorted([np.linalg.norm(pb - pa), np.linalg.norm(pc - pb),
                        np.linalg.norm(pa - pc)])
        if sides[1] / sides[0] < 1.02 or sides[2] / sides[1] < 1.02:
            continue  # keep it scalene
        centroid = (pa + pb + pc) / 3.0
        try:
            builders.build_type3_flat(pa, pb, pc, centroid)
        except (builders.DegenerateInput, builders.DegenerateConcurrency,
                builders.UnboundedIntersection):
            continue
        out.append((pa, pb, pc))
    return out


def random_generic_realization(rng, tries=100) -> Realization:
    from flexoct.octahedron import check_facets
    for _ in range(tries):
        r = Realization(rng.uniform(-1.0, 1.0, (6, 3)))
        try:
            check_facets(r, tol=1e-4)
            return r
        except Exception:
            continue
    raise RuntimeError("could not sample a generic realization")
