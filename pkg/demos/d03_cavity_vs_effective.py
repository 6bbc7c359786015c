"""
A cavity realization of the diamond machine
===========================================

Two incoherently pumped qubits share a lossy cavity mode. When the cavity
decays fast (kappa > g) it can be eliminated, leaving a collective decay
``Gamma = 4 g^2 / kappa`` on the symmetric channel while the antisymmetric
state stays dark. The pump then acts as a negative-temperature bath for A.

We compare the full Tavis-Cummings steady state (cavity truncated with a
convergence ladder) with the closed form at the mapped temperatures.
"""

# %%
from steadyent import CavitySpec, adiabatic_map
from steadyent.cavity import effective_concurrence, solve_point

g = 1e-3
sp = CavitySpec(g=g, kappa=10 * g, p=2e-4 * g, gamma=0.0)
m = adiabatic_map(sp)
print("mapped betas:", m.beta_A, round(m.beta_S, 3), " valid:", m.valid)
pt = solve_point(sp)
print("full model :", round(pt.concurrence, 5), "with", pt.n_used, "photon levels")
print("effective  :", round(effective_concurrence(sp), 5))

# %%
# Sweep kappa: agreement above kappa ~ g, breakdown below.
from steadyent.config import parse_config
from steadyent.sweeps import run_cavity_kappa_scan, write_csv
from steadyent.svgplot import emit_plot

from _common import out

res = run_cavity_kappa_scan(parse_config("""
mode = cavity-kappa-scan
kappa_over_g = 0.05, 100, 21, log
gamma_over_g = 0
p_over_g = 2e-4
"""))
for r in res.rows[::4]:
    print(f"kappa/g = {r['kappa_over_g']:8.3f}  full {r['C_full']:.4f}  effective {r['C_effective_mapped']:.4f}")
write_csv(res, out("kappa_scan.csv"), timestamp=False)
emit_plot(out("kappa_scan.csv"), "line", ["kappa_over_g", "C_full", "C_effective_mapped"],
          out("kappa_scan.svg"), logx=True, title="full vs adiabatically eliminated model")
