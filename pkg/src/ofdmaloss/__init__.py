"""Overload probability bounds for OFDMA cells with Poisson-distributed users."""

from .exactloss import demand_distribution, exact_loss
from .model import (CellGeometry, DemandThresholds, RadioParams, Scenario, Shadowing,
                    TrafficParams, compute_thresholds, demand_deterministic,
                    demand_shadowed, n_max_from_beta_min)
from .moments import (ClassMasses, MomentPair, a_j_closed, a_j_quadrature, class_masses,
                      class_masses_deterministic, class_masses_shadowed,
                      moments_from_classes)
from .tailbound import BoundInput, concentration_tail, invert_p_sup, p_sup

__version__ = "0.1.0"
