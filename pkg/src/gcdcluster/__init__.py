"""Exact greedy correlation clustering of the integers under the gcd rule.

Two integers are friends when they share a prime factor and enemies
otherwise; a clustering of [2, n] is scored by its conflicts (enemy pairs
kept together plus friend pairs split apart).  This package implements the
natural greedy clustering of 2, 3, ..., n, the exact counting machinery that
makes it fast, and the threshold analysis that locates the first integer the
greedy places irregularly: 111_546_435 = 3*5*7*11*13*17*19*23.
"""

from .counts import (ClassTally, SieveTermSum, class_size, coprime_count,
                     floor_identity_lhs_rhs, size_S_exact, tally_even_class,
                     tally_exact, tally_fast, tally_wheel_oracle)
from .errors import (BudgetExceededError, DegenerateThresholdError,
                     GcdClusterError, OutOfRangeError, ResourceGuardError,
                     TallyInconsistencyError, UnsupportedCaseError)
from .greedy import (GreedyState, VerifyRecord, VerifyReport, greedy_step,
                     initial_state, run_accelerated, run_reference,
                     verify_range, verify_single)
from .partition import (Partition, canonical_partition, conflict_delta_of_move,
                        count_conflicts, exceptional_partition,
                        partition_to_csv, read_partition_csv, similar,
                        write_partition_csv)
from .primes import (DEFAULT_SIEVE_LIMIT, Factorization, PrimeTable,
                     build_prime_table, factorize, load_prime_cache, pi_exact,
                     rosser_schoenfeld_bounds, save_prime_cache, totient)
from .thresholds import (FIRST_IRREGULAR, CandidateCensus, ThresholdRecord,
                         census_report, census_three_factor, even_class_criterion,
                         prime_count_inequality, find_n0, n1_remark_candidate, n1_table,
                         proposition_census, table1_records,
                         three_factor_candidates)

__version__ = "0.1.0"
