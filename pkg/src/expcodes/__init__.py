"""Optimal prefix codes for infinite alphabets under exponential and minimax penalties."""

from .codec import (EncodedStream, decode, encode, read_container, spec_from_dict,
                    spec_from_json, write_container)
from .errors import (CodingError, CorruptStream, DegenerateRegime, DivergentEntropy,
                     DivergentPenalty, InvalidParameter, NonStabilized, NotVerifiablyLightTailed,
                     OracleLimit, StreamError, TruncatedStream, UnsortedWeights)
from .exp_huffman import FiniteCode, exp_huffman, exp_huffman_sorted, unary_like_lengths
from .golomb import (ONES, ZEROS, GolombCode, geometric_renyi_entropy, golomb_penalty_closed_form,
                     optimal_k, unary_code)
from .light_tail import (UnaryEndedCode, build_unary_ended, find_r, poisson_r, reduced_weights,
                         verify_r)
from .minimax import (d_redundancy, max_pointwise_redundancy, minimax_golomb_k,
                      minimax_light_tail_r, minimax_reduced_code)
from .model import (CodeLengths, FiniteWeights, GeometricSource, PenaltyParam, PoissonSource,
                    Regime, SourceModel, classify, renyi_order, source_from_dict, source_from_json)
from .oracle import brute_force_optimal, golomb_sandwich_check, m_reduced_source
from .penalty_eval import (avg_redundancy, expected_length, penalty, renyi_entropy,
                           shannon_entropy)

__version__ = "0.1.0"
