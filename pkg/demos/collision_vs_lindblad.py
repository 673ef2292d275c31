"""The master equation earned, not assumed.

One collision with fresh units, differentiated at tau -> 0, reproduces the
Lindblad generator including the measurement dephasing; at finite tau the
defect is linear in tau and the collision fixed point approaches the
Lindblad stationary state at the same rate."""

from dataclasses import replace

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from dqdengine.collision import CollisionConfig, collision_ness, generator_residual
from dqdengine.lindblad import build_liouvillian, ness
from dqdengine.model import canonical_engine_params, canonical_qpc_params

p = canonical_engine_params(Gamma=0.3)
q = canonical_qpc_params()
rho_l = ness(build_liouvillian(p))

base = CollisionConfig(params=p, qpc=q, include_qpc=True)
taus = base.tau * 2.0 ** np.arange(2, -5, -1)

resid = [generator_residual(replace(base, tau=float(t), n_steps=1), rho_l)
         for t in taus]
slope = np.polyfit(np.log(taus), np.log(resid), 1)[0]
print(f"generator residual slope vs tau: {slope:.5f} (expect 1)")

dists = []
for t in taus:
    fixed = collision_ness(replace(base, tau=float(t), n_steps=None))
    dists.append(0.5 * np.abs(np.linalg.eigvalsh(fixed - rho_l)).sum())
print(f"fixed-point trace distance at tau={taus[-1]:.2e}: {dists[-1]:.3e}")

fig, ax = plt.subplots(figsize=(6, 4))
ax.loglog(taus, resid, "o-", label=f"generator residual (slope {slope:.3f})")
ax.loglog(taus, dists, "s-", label="fixed point vs stationary state")
ax.set_xlabel(r"collision duration $\tau$")
ax.set_ylabel("deviation")
ax.legend()
fig.tight_layout()
fig.savefig("collision_vs_lindblad.png", dpi=150)
print("wrote collision_vs_lindblad.png")
