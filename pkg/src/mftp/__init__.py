"""Measurement-free topological protection, desk scale.

Surface/toric-code memory under i.i.d. Pauli noise, corrected each
cycle by cooling a syndrome-coupled classical spin system and feeding
the equilibrium configuration back, plus the matching analytic bounds,
decay-rate fitting and parameter-budget arithmetic.
"""

from .analytics import (BoundInputs, FailureSeries, FitResult, ResourceParams,
                        analytic_threshold, fit_gamma_eff, logical_error_bound,
                        resource_estimate, saw_chain_bound)
from .decoder_ref import (MatchingResult, decode_and_classify, match_and_correct,
                          min_weight_matching, pairwise_distance)
from .digital_cooling import (AncillaState, DigitalCoolingParams, RateMode,
                              field_pump_step, plaquette_pump_step, rate_pair,
                              trotter_cool, verify_pumping_identity)
from .harness import (ExperimentConfig, ThresholdEstimate, TrialRecord,
                      aggregate_series, bootstrap_gamma, estimate_threshold,
                      mftp_cycle, run_cell, run_sweep, run_trial, write_csv)
from .lattice import (Boundary, LatticeGeometry, adjacent_faces,
                      adjacent_plaquettes, build_lattice, edges_of_face,
                      edges_of_vertex)
from .pauli_frame import (LogicalClass, PauliFrame, SyndromeField,
                          apply_correction, apply_stabilizer, compute_syndrome,
                          homology_class, inject_errors)
from .rpgm_cooler import (CoolingParams, CouplingMode, anneal,
                          correction_from_spins, energy, exact_gibbs,
                          local_field_delta, metropolis_sweep, nishimori_beta)

__version__ = "0.1.0"
