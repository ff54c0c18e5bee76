# Log-normal shadowing: compare the concentration bound with the exact loss.
import math

import numpy as np

from ofdmaloss import class_masses, exact_loss, moments_from_classes, p_sup
from ofdmaloss.config import load_scenario, scenario_from_values
from ofdmaloss.moments import a_j_closed, a_j_quadrature

scenario, values = load_scenario("paper_sec4")

# The area-like masses A_j have a closed form; check it against plain quadrature
for j in range(1, 3):
    print(f"A_{j}: closed {a_j_closed(j, scenario):.6f}  quadrature {a_j_quadrature(j, scenario):.6f}")

lam = class_masses(scenario)
mom = moments_from_classes(lam)
print("class masses:", np.round(lam.lambdas, 4))

# Class counts are independent Poisson variables, so the total is compound Poisson
# and its tail can be computed exactly by convolution
print(" alpha   P_sup     P_exact   delta")
for alpha in (1.2, 1.5, 1.8, 2.0, 2.5):
    bound = p_sup(alpha, mom, lam.n_max)
    exact = exact_loss(lam, alpha * mom.m)
    print(f" {alpha:4.1f}  {bound:.2e}  {exact:.2e}  {math.log10(bound / exact):.2f}")

# Without the explicit cap the ceiling rule allows four subcarriers per user
ceiling = scenario_from_values({k: v for k, v in values.items() if k != "n_max"})
lam4 = class_masses(ceiling)
mom4 = moments_from_classes(lam4)
print(f"ceiling rule: n_max={lam4.n_max}, m_N={mom4.m:.3f}, v_N={mom4.v:.3f}, "
      f"P_sup(2)={p_sup(2.0, mom4, lam4.n_max):.4f}")
