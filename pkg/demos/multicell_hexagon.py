# Seven antennas in a hexagon: moments of the demand carried by the centre one.
import numpy as np

from ofdmaloss import moments_from_classes, p_sup
from ofdmaloss.config import load_scenario, multicell_from_values
from ofdmaloss.multicell import (best_server_probability, cell_area, multicell_class_masses,
                                 simulate_total_demand_multicell)

_, values = load_scenario("paper_sec5")
scen = multicell_from_values(values)
print("serving hexagon area (m^2):", round(cell_area(scen.layout), 1))

# Probability that the centre antenna is the best server along the x axis
x = np.column_stack([np.linspace(0, 300, 7), np.zeros(7)])
print("best-server probability:", np.round(best_server_probability(x, scen), 4))

# Quadrature moments for each association rule and user region
for region in ("cell", "disk"):
    for assoc in ("max_sir", "paper_literal"):
        lam = multicell_class_masses(scen.with_(region=region, association=assoc))
        mom = moments_from_classes(lam)
        print(f"{region:4s} {assoc:13s} m_N={mom.m:8.4f} v_N={mom.v:8.4f} "
              f"P_sup(2)={p_sup(2.0, mom, lam.n_max):.4f}")

# Simulation agrees with the quadrature mean
mom = moments_from_classes(multicell_class_masses(scen))
totals = simulate_total_demand_multicell(scen, 50_000, seed=3)
print(f"simulated mean {totals.mean():.3f} vs quadrature {mom.m:.3f}")
