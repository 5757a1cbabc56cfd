"""Fibering-map geometry of a single pair.

Every nonzero pair (u, v) generates a ray {(tu, tv) : t > 0}. The energy
along that ray is a scalar map phi(t) whose critical points are exactly
the scalings that land the pair on the constraint set. Depending on the
sign pattern of the concave weight A and the coupling weight B, phi has
zero, one, or two critical points; the two-critical-point case is the
engine behind the two-solution result.
"""

import numpy as np

import nehari
from nehari import NehariClass

mesh = nehari.build_mesh(1, (0.0, 1.0), 201)
one = nehari.sample_weight(mesh, "constant:1")
params = nehari.ProblemParams(
    p=2.0, q=1.5, r=3.0, s=3.0, lam=0.1, mu=0.1, f=one, g=one, h=one
)

pair = nehari.PairField(nehari.hat_field(mesh), nehari.hat_field(mesh))
diag = nehari.nehari_quantities(params, pair)
print("tent-pair diagnostics on the unit interval (n = 201)")
print(f"  K = |(u,v)|^p        = {diag.K:.6f}")
print(f"  A = lam f|u|^q + ... = {diag.A:.6f}")
print(f"  B = h|u|^r|v|^s      = {diag.B:.6f}")
print(f"  constraint K - A - B = {diag.constraint:.6f}  (not on the manifold)")

analysis = nehari.find_nehari_scalings(params, diag)
print(f"\ncase analysis: B > 0 and 0 < A < m(t_max) -> two scalings")
print(f"  t_max = {analysis.t_max:.6f}")
for root in analysis.roots:
    print(f"  {root.branch}: t = {root.t:.8f}, phi(t) = {root.phi:+.6e}")

print("\nphi(t) profile (energy along the ray):")
ts = np.geomspace(analysis.roots[0].t / 10.0, analysis.roots[1].t * 2.0, 12)
for t in ts:
    phi, dphi = nehari.fibering_phi(params, diag, float(t))
    marker = " <- local min" if abs(t - analysis.roots[0].t) / t < 0.15 else ""
    marker = " <- local max" if abs(t - analysis.roots[1].t) / t < 0.15 else marker
    print(f"  t = {t:10.6f}   phi = {phi:+.6e}   phi' = {dphi:+.3e}{marker}")

plus = nehari.project_to_branch(params, pair, NehariClass.PLUS)
print("\nprojected pair classification:", nehari.classify(params, plus))
print("scaling the projected pair by 2 leaves the manifold:",
      nehari.classify(params, plus.scaled(2.0)))
