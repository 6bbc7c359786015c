"""
Heat currents and entropy production
====================================

In the steady state the two baths exchange heat through the qubits. The
currents cancel (first law) and the entropy production rate
``-sum_i beta_i Qdot_i / omega0`` is never negative (second law). The rate
is largest where the concurrence is largest.
"""

# %%
from steadyent import build_diamond, entropy_rate, rates_from_betas, steady_state

for ba, bs in [(1.0, 1.0), (0.0, 3.0), (-2.0, 3.0), (-5.0, 8.0)]:
    sys = build_diamond(rates_from_betas(ba, bs))
    rho = steady_state(sys).rho
    rep = entropy_rate(sys, rho, {"A": ba, "S": bs})
    qa, qs = rep.heat_currents["A"], rep.heat_currents["S"]
    print(f"({ba:5.1f}, {bs:4.1f})  Qdot_A = {qa:+.5f}  Qdot_A + Qdot_S = {qa + qs:+.1e}  Sdot = {rep.entropy_rate:.5f}")

# %%
# Entropy production map next to the concurrence map.
from steadyent.config import parse_config
from steadyent.sweeps import run_effective_grid, write_csv
from steadyent.svgplot import emit_plot

from _common import out

res = run_effective_grid(parse_config("""
mode = effective-grid
beta_A = -5, 8, 53, linear
beta_S = -5, 8, 53, linear
"""))
write_csv(res, out("entropy_map.csv"), timestamp=False)
top = max(res.rows, key=lambda r: r["sdot"])
print("largest Sdot", round(top["sdot"], 3), "at", (top["beta_A"], top["beta_S"]),
      "where C =", round(top["concurrence_analytic"], 4))
print("smallest Sdot on the grid:", min(r["sdot"] for r in res.rows))
emit_plot(out("entropy_map.csv"), "heatmap", ["beta_A", "beta_S", "sdot_norm"], out("entropy_map.svg"),
          title="entropy production rate / gamma_plus")
