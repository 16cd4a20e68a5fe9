"""Wake-up-receiver based downlink access: semi-Markov power/delay model,
closed-form delay-constrained optimization, discrete-event validation, and
an optimized-DRX baseline."""

from .core import (ChannelErrorModel, EmptyFeasibleSetError, InfeasibleError,
                   NoRootError, PowerProfile, SemiMarkovSummary,
                   SingularChainError, TimingParams, TrafficModel,
                   ValidationError, WakeupModelError, WuConfig, analyze_chain,
                   expected_holding_times, steady_state,
                   transition_probabilities)
from .drx import (DrxConfig, DrxGrid, DrxPowerTable, DrxSearchResult,
                  approximate_drx, optimize_drx_exhaustive,
                  relative_power_saving, simulate_drx)
from .metrics import (DelayEstimate, Gradient2, PowerDelayPoint,
                      average_delay_full, average_delay_simplified,
                      average_power_full, average_power_simplified,
                      delay_gradient, power_gradient)
from .optimizer import (AppendixConstants, BoundaryCase, BoundaryCoefficients,
                        Constraint, OptimizationResult, Regime,
                        appendix_constants, boundary_coefficients,
                        boundary_inactivity_timer, boundary_power,
                        classify_boundary_case, grid_search_oracle,
                        min_boundary_wakeup_cycle, optimize,
                        turnoff_arrival_rate)
from .specfun import Bracket, find_root, lambert_w0
from .wusim import (SimConfig, SimulationReport, SweepPoint, derive_seed,
                    energy_share_sweep, simulate)

__version__ = "0.1.0"
