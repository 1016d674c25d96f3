"""Authentication with conjugate-coded tags: simulation and analysis.

The package covers the full loop: key material (true random or a weak
linear congruential stream), an explicitly enumerable family of
almost-strongly-universal hash functions, conjugate coding of tags into
qubits, eavesdropping strategies against that encoding, and the
entropy/trace-distance bounds that say how little the adversary learns.
"""

from .errors import (QauthError, ConfigError, CapacityError, InvariantError,
                     KeyExhaustedError)
from .bitsource import (BitBlock, LcgParams, lcg_step, lcg_values,
                        lcg_bitstream, derive_rng, fair_bitstream,
                        BitGenerator, LcgGenerator, FairGenerator,
                        FixedGenerator, generator_from_config,
                        BlockDistribution, uniform_distribution,
                        point_mass_distribution, distribution_with_bias,
                        block_distribution, bias)
from .hashing import (HashFamilyShape, HashFunction, toeplitz_matrix,
                      hash_eval, hash_from_key_bits, hash_to_hex,
                      hash_from_hex, random_hash, verify_condition1,
                      verify_condition2)
from .linalg import hermitian_eigenvalues
from .quantum import (PureState, DensityMatrix, Povm, encode_qubit,
                      encode_block, density_for_message, density_for_block,
                      spectrum, von_neumann_entropy, trace_distance,
                      breidbart_measurement, computational_measurement,
                      povm_tensor, povm_power, apply_povm, measure_qubit,
                      measure_in_bases, tensor_product, BREIDBART_ANGLE)
from .bounds import (BoundReport, shannon_entropy, binary_entropy, JointTable,
                     conditional_entropy, mutual_information,
                     conjugate_coding_entropy, holevo_floor,
                     verify_holevo_against_povm, breidbart_information,
                     proposition2_check, fannes_bound, theorem2_bound,
                     theorem2_check, max_block_length,
                     max_block_length_simple, asymptotic_gap_sweep,
                     sample_biased_distribution, xor_scheme_joint,
                     wegman_carter_joint, wegman_carter_equivalence,
                     quantum_tag_joint, tag_equivocation_identity)
from .protocol import (SchemeConfig, KeyCursor, AuthenticatedMessage, Verdict,
                       RoundRecord, SessionTranscript, alice_round, bob_round,
                       run_session, key_cost_per_message, VARIANTS,
                       VARIANT_CLASSICAL, VARIANT_QUANTUM_FIXED,
                       VARIANT_SINGLE_KEY, VARIANT_REUSED_HASH)
from .attacks import (InterceptRecord, random_basis_intercept,
                      hoeffding_failure_bound, hoeffding_standard_bound,
                      exact_failure_probability, intercept_success_experiment,
                      breidbart_attack, breidbart_attack_experiment,
                      lcg_delta, lcg_recover, RecoveredLcgSeed,
                      degraded_lcg_recover, DegradedRecovery,
                      corollary1_pipeline, PipelineResult,
                      RandomTagSubstitution, MessageTamper, InterceptResend)
from .report import canonical_json, flatten, to_csv, write_atomic

__version__ = "0.1.0"
