"""
Quantum jumps and the fluctuation theorem
=========================================

The diamond dynamics unravels into jumps between the four collective
levels. Each jump exchanges one quantum with a bath and carries entropy
``-beta dQ / omega0``; adding the boundary term ``ln p(initial) - ln
p(final)`` gives the trajectory entropy production ``dS``.

Its mean grows at the steady-state entropy production rate, and
``<exp(-dS)> = 1`` holds exactly. The exponential average is however
dominated by exponentially rare trajectories, so it can only be *estimated*
over short windows: once ``<dS>`` exceeds a few units, no practical ensemble
contains the trajectories that carry the average.
"""

# %%
from steadyent import build_diamond, entropy_rate, rates_from_betas, steady_state
from steadyent.trajectories import ExactJumpSampler, ensemble_estimators, run_ensemble

ba, bs = -1.0, 2.0
sys = build_diamond(rates_from_betas(ba, bs))
ss = steady_state(sys)
sdot = entropy_rate(sys, ss.rho, {"A": ba, "S": bs}).entropy_rate
sampler = ExactJumpSampler(sys, ss)
print("steady-state entropy production rate:", round(sdot, 4))

# %%
# Mean entropy production: the ensemble reproduces the steady-state rate.
st = ensemble_estimators(run_ensemble(sampler, 20.0, 10000, base_seed=0))
print(f"T = 20: <dS>/T = {st.rate_estimate:.4f} +/- {st.se_rate:.4f}")

# %%
# The exponential average over growing windows.
for T in (0.1, 0.3, 1.0, 3.0, 20.0):
    st = ensemble_estimators(run_ensemble(sampler, T, 20000, base_seed=1))
    print(f"T = {T:5.1f}: <dS> = {st.mean_dS:7.3f}   <exp(-dS)> = {st.mean_exp_neg_dS:.4g} +/- {st.se_exp_neg_dS:.2g}")
