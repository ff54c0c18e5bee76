# Overload bound for a single cell where the gain depends on distance only.
import numpy as np

from ofdmaloss import compute_thresholds, class_masses, moments_from_classes, p_sup, invert_p_sup
from ofdmaloss.config import load_scenario

scenario, _ = load_scenario("paper_sec3")

# Demand steps up at fixed radii: one subcarrier near the antenna, three at the edge
th = compute_thresholds(scenario)
print("n_max:", th.n_max)
print("step radii (m):", np.round(th.radii, 2))

# Users per demand class, then the mean and quadratic characteristic of total demand
lam = class_masses(scenario)
mom = moments_from_classes(lam)
print("users per class:", np.round(lam.lambdas, 3), "total", round(lam.total, 3))
print(f"m_N = {mom.m:.3f}  v_N = {mom.v:.3f}")

# Budget N0 = alpha * m_N; the bound falls off fast once alpha passes 1.5
for alpha in np.arange(1.5, 2.01, 0.1):
    print(f"alpha={alpha:.1f}  N0={alpha * mom.m:6.2f}  P_sup={p_sup(alpha, mom, lam.n_max):.4f}")

# Dimensioning the other way round: how many subcarriers for a 1% guarantee?
alpha = invert_p_sup(0.01, mom, lam.n_max)
print(f"1% overload needs alpha={alpha:.3f}, i.e. {np.ceil(alpha * mom.m):.0f} subcarriers")
