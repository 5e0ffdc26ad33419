"""Monitored two-qubit dimer toolkit: quantum-jump, Gutzwiller and diffusion
trajectory ensembles, the angle-pair grid master equation, and fixed-point
analysis of the post-selected no-click flow."""

__version__ = "0.1.0"

from .errors import (BoundaryIndeterminateError, CflError, EmptyHistogramError,
                     NumericalError, ParseError, QdimerError,
                     ShapeMismatchError, UndefinedAngleError, ValidationError)
from .exact import (EnsembleStats, TrajectorySample, ensemble_averages,
                    gutzwiller_fidelity, jump_step, run_exact_ensemble,
                    run_exact_trajectory)
from .flow import (FixedPoint, PhaseLabel, Stability, classify_phase,
                   diagonal_root_condition, find_fixed_points, flow_field,
                   phase_diagram)
from .fokker_planck import FpResult, PdfGrid, delta_grid, fp_stationary, fp_step
from .gutzwiller import (drift, gw_readout_probs, gw_step, meanfield_ode_check,
                         run_gw_ensemble, run_gw_trajectory, wrap_angle)
from .observables import (Histogram2D, Marginal1D, bin_angles, conditional_cuts,
                          marginal, occupied_fraction, splitting_floor,
                          tv_distance)
from .params import SimParams
from .quantum import (KrausSet, ReducedBloch, bloch_angle, born_probabilities,
                      build_kraus, detector_kraus, entanglement_entropy,
                      product_state, propagator, reduced_bloch)
from .sse import SseParams, run_sse_ensemble, run_sse_trajectory, sse_step
