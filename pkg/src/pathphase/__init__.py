"""Path-phase information complementarity in qubit state discrimination."""
from .bloch import (BlochVector, EnsembleGeometry, GeometryError, InputLabel,
                    geometry_from_angles, input_bloch, trace_distance, validate_geometry)
from .discrimination import (GuessProbabilities, JointDistribution, closed_form_probabilities,
                             frontier_lhs, guess_probabilities, joint_correct_probability,
                             joint_distribution)
from .information import (InfoReport, binary_entropy, conditional_mutual_information,
                          holevo_bound, indicator_distribution, info_report,
                          mutual_information, shannon_entropy)
from .oracle import (GameResult, SweepReport, maximize_joint_correct, monte_carlo_game,
                     pareto_sweep, random_povm)
from .povm import (Povm, PovmElement, PovmError, optimal_family, refine, two_detector_scheme,
                   validate_povm, vn_scheme, ww_detector_scheme)

__version__ = "0.1.0"
