#!/usr/bin/env python3
"""The articulated tetrahedral angle as a spherical four-bar linkage.

Walks through the input-output equation: coefficients from face angles,
solving for the conjugate dihedral, the decomposition classes, recovering
face angles from a coefficient vector, and the planar four-bar limit.
"""

import math

import numpy as np

from flexoct import (FaceAngles, TetraCoeffs, classify, decomposition_discriminant,
                     opposite_dihedral_line, planar_fourbar_coeffs,
                     reconstruct_angles, solve_conjugate, tetra_coeffs,
                     unicursal_constants)
from flexoct.linkage import NoRealRoot

print("=== coefficients of the half-tangent equation ===")
angles = FaceAngles(1.0, 1.1, 1.3, 0.7)
co = tetra_coeffs(angles)
print(f"faces {angles.as_tuple()}")
print(f"a t^2 u^2 + b t^2 + 2c t u + d u^2 + e = 0 with")
print(f"  (a, b, c, d, e) = {tuple(round(v, 6) for v in co.as_tuple())}")

print("\n=== solving for the conjugate dihedral ===")
for phi in (0.5, 1.5, 2.5):
    t = math.tan(phi / 2)
    try:
        roots = solve_conjugate(co, t)
    except NoRealRoot:
        print(f"  dihedral {phi:.2f} rad -> unreachable (radicand negative)")
        continue
    psis = [2 * math.atan(u) for u in roots]
    print(f"  dihedral {phi:.2f} rad -> conjugate candidates "
          f"{[round(p, 4) for p in psis]} rad")

print("\n=== the decomposition discriminant never vanishes ===")
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(2000):
    a4 = FaceAngles(*rng.uniform(0.3, math.pi - 0.3, 4))
    lhs = decomposition_discriminant(tetra_coeffs(a4))
    rhs = 16 * np.prod(np.sin(a4.as_tuple())) ** 2
    worst = max(worst, abs(lhs - rhs) / rhs)
print(f"  (c^2-ae-bd)^2 - 4abde = 16 sin^2(each face): max rel err {worst:.2e}")

print("\n=== three linkage classes ===")
for a4 in (FaceAngles(1.0, 1.1, 1.3, 0.7),
           FaceAngles(math.pi / 2, math.pi / 3, math.pi / 3, math.pi / 2),
           FaceAngles(math.pi / 3, math.pi / 2, math.pi / 3, math.pi / 2)):
    cls = classify(a4)
    line = f"  {tuple(round(v, 4) for v in a4.as_tuple())} -> {cls.tag}"
    if cls.branch:
        line += f" (pair {cls.branch}: {cls.relation})"
    print(line)

print("\n=== unicursal: one-to-one dihedral relation ===")
uni = FaceAngles(1.0, 0.8, 1.0, 0.8)
uc = unicursal_constants(uni)
print(f"  faces {uni.as_tuple()}: {uc.branch} branch, constants "
      f"k_a = {uc.k_a:.6f}, k_b = {uc.k_b:.6f}")
t = 0.9
print(f"  at t = {t}: roots {solve_conjugate(tetra_coeffs(uni), t)} "
      f"vs k_a/t = {uc.k_a / t:.6f}, k_b/t = {uc.k_b / t:.6f}")

print("\n=== face angles back from a coefficient vector ===")
first, second = reconstruct_angles(TetraCoeffs(1.5, 0.0, -1.5, 0.0, 0.0))
print(f"  (1.5, 0, -1.5, 0, 0) -> {tuple(round(v, 6) for v in first.as_tuple())}")
print(f"  second system          {tuple(round(v, 6) for v in second.as_tuple())}")

print("\n=== opposite dihedral cosines are linearly related ===")
line = opposite_dihedral_line(angles)
print(f"  {line.l:.4f} cos(phi) + {line.m:.4f} cos(theta) + {line.n:.4f} = 0")

print("\n=== planar four-bar limit ===")
co4 = planar_fourbar_coeffs(1, 1, 1, 1)
print(f"  unit rhombus: coefficients {co4.as_tuple()} (the relation t u = 1)")
a, b, c, d = 1.0, 2.0, 1.5, 1.2
co4 = planar_fourbar_coeffs(a, b, c, d)
lhs = decomposition_discriminant(co4)
print(f"  sides {(a, b, c, d)}: discriminant {lhs:.6f} = "
      f"256 (abcd)^2 = {256 * (a * b * c * d) ** 2:.6f}")
