# Monte Carlo check of the exact loss, and reproducibility across workers.
import numpy as np

from ofdmaloss import class_masses, exact_loss, moments_from_classes
from ofdmaloss.config import load_scenario
from ofdmaloss.montecarlo import estimate_from_totals, simulate_total_demand

scenario, _ = load_scenario("paper_sec3")
lam = class_masses(scenario)
mom = moments_from_classes(lam)

# Each replication is one equilibrium snapshot of the cell
totals = simulate_total_demand(scenario, 200_000, seed=7)
print(f"sample mean {totals.mean():.3f} vs m_N {mom.m:.3f}")
print(f"sample variance {totals.var(ddof=1):.3f} vs v_N {mom.v:.3f}")

for alpha in (1.3, 1.5, 1.8):
    n0 = alpha * mom.m
    est = estimate_from_totals(totals, n0, seed=7)
    truth = exact_loss(lam, n0)
    print(f"alpha={alpha}: p_hat={est.p_hat:.4f} [{est.ci_low:.4f}, {est.ci_high:.4f}] "
          f"exact={truth:.4f} covered={est.contains(truth)}")

# Blocks of replications draw from their own streams, so the worker count is irrelevant
again = simulate_total_demand(scenario, 200_000, seed=7, workers=4)
print("identical with 4 workers:", np.array_equal(totals, again))
