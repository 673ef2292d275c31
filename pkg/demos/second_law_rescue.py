"""Two bookkeepings for the hot heat flow, one of them wrong.

Assigning Tr[H_sys L_H(rho)] as heat looks harmless but double counts the
interaction energy of the local coupling; scanning the upper dot level at
fixed baths drives the resulting "entropy production" negative.  Charging
the energy to the reservoir unit instead (the repeated-interactions rate)
keeps sigma >= 0 everywhere, with no fitted ingredient."""

from dataclasses import replace

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from dqdengine.model import EngineParams
from dqdengine.thermo import naive_heat_current, steady_report

base = EngineParams(eps1=3.0, eps2=0.5, t_hop=0.1, gamma_H=0.05,
                    gamma_C=0.05, T_H=3.0, T_C=1.0, mu_H=0.0, mu_C=0.0)

eps1_grid = np.linspace(0.2, 4.0, 120)
sig_naive, sig_ri = [], []
for e1 in eps1_grid:
    p = replace(base, eps1=float(e1))
    sig_naive.append(naive_heat_current(p)[1])
    sig_ri.append(steady_report(p).sigma_DQD)
sig_naive = np.array(sig_naive)
sig_ri = np.array(sig_ri)

neg = eps1_grid[sig_naive < 0]
print(f"naive sigma < 0 for eps1 in [{neg.min():.3f}, {neg.max():.3f}]")
print(f"repeated-interaction sigma minimum: {sig_ri.min():.3e}")
assert sig_ri.min() > -1e-12, "second law actually violated, investigate"

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(eps1_grid, sig_naive, label=r"$\sigma$ from bare $H_{\rm sys}$ bookkeeping")
ax.plot(eps1_grid, sig_ri, label=r"$\sigma$ from unit-energy bookkeeping")
ax.axhline(0.0, c="k", lw=0.8)
ax.set_xlabel(r"upper level $\varepsilon_1$")
ax.set_ylabel(r"entropy production rate")
ax.legend()
fig.tight_layout()
fig.savefig("second_law_rescue.png", dpi=150)
print("wrote second_law_rescue.png")
