#pragma once

// Bulk enumeration of primitive numbers, the prime order table, the
// infinite family of incomplete numbers (4^(n+1) - 1) / 3 and the scans for
// the two conjectures about primitive numbers.

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "spectral/classify.hpp"
#include "spectral/cycles.hpp"
#include "spectral/modmath.hpp"

namespace spectral {

using BigInt = boost::multiprecision::cpp_int;

/// Rules the sieve records in SieveReport::filter_stats, in evaluation order.
namespace sieve_rule {
inline constexpr std::string_view multiple_of_3 = "multiple-of-3";
inline constexpr std::string_view prime_power = rule::prime_power;
inline constexpr std::string_view family = rule::family;
inline constexpr std::string_view primitive_divisor = "primitive-divisor";
inline constexpr std::string_view order_bound = rule::order_bound;
inline constexpr std::string_view gmembership = rule::gmembership;
inline constexpr std::string_view interval_oracle = "interval-oracle";
}  // namespace sieve_rule

struct PrimitiveRecord {
    u64 modulus = 0;
    FactoredInteger factors;
    std::vector<u64> prime_orders;  // o4(p) for each prime, in factor order
    ExtremeCycle witness;

    friend bool operator==(const PrimitiveRecord&, const PrimitiveRecord&) = default;
};

struct SieveReport {
    u64 max_bound = 0;
    std::vector<PrimitiveRecord> primitives;  // ascending
    std::map<std::string, u64> filter_stats;
    std::chrono::duration<double> elapsed{0};
    unsigned worker_count = 1;

    std::vector<u64> moduli() const;
    /// Number of odd moduli in [3, max_bound]; filter_stats sums to this.
    u64 examined() const;
    PrimitiveCache to_cache() const;
};

struct SieveOptions {
    unsigned workers = 1;
    /// Line-delimited record file; resumes from its largest checkpoint not
    /// above max_bound and appends what the run adds.
    std::optional<std::filesystem::path> cache_path;
    /// Called from the coordinating thread after each block with
    /// (last modulus finished, max_bound).
    std::function<void(u64, u64)> progress;
};

/// Every primitive number up to max_bound, each with its factorization, prime
/// orders and one witness cycle. Moduli are processed in blocks [L, 5L): a
/// proper primitive divisor of any m in the block is at most m/5 < L, so all
/// of them are known before the block starts and the result (including
/// filter_stats) does not depend on the worker count. Moduli no rule settles
/// go to interval_cycle_search, and every reported primitive is re-verified
/// with the exhaustive walk. Throws DomainError when max_bound < 3 or
/// workers == 0.
SieveReport sieve_primitives(u64 max_bound, unsigned workers = 1);
SieveReport sieve_primitives(u64 max_bound, const SieveOptions& opts);

struct PrimeOrder {
    u64 prime = 0;
    u64 order = 0;

    friend bool operator==(const PrimeOrder&, const PrimeOrder&) = default;
};

/// (p, o4(p)) for every odd prime p <= max_prime, ascending.
std::vector<PrimeOrder> prime_order_table(u64 max_prime);

struct InfinitudeWitness {
    unsigned n = 0;
    BigInt modulus;
    bool verified = false;
    std::size_t cycle_length = 0;
};

/// m = (4^(n+1) - 1) / 3 in arbitrary precision, verified incomplete by
/// walking from 7 until the walk returns to 7. 4^(n+1) = 1 (mod m), so the
/// cycle through 7 has length dividing n + 1 and the walk is capped there.
/// Throws DomainError for n < 3.
InfinitudeWitness infinitude_witness(unsigned n);

struct ConjectureViolation {
    u64 modulus = 0;
    std::string evidence;
};

struct ConjectureReport {
    u64 max_bound = 0;
    /// Primitive numbers that are not square-free.
    std::vector<ConjectureViolation> conjecture1_squarefree;
    /// Primitive numbers whose lcm of prime orders is not attained at a prime.
    std::vector<ConjectureViolation> conjecture1_lcm;
    /// Incomplete m (odd, 3 not dividing m, composite) whose prime orders and
    /// primes are pairwise coprime.
    std::vector<ConjectureViolation> conjecture2;
    u64 primitives_checked = 0;
    u64 coprime_candidates = 0;

    bool clean() const {
        return conjecture1_squarefree.empty() && conjecture1_lcm.empty() && conjecture2.empty();
    }
};

ConjectureReport scan_conjectures(u64 max_bound, unsigned workers = 1);
/// Same scan reusing an existing sieve report for the primitive list.
ConjectureReport scan_conjectures(const SieveReport& sieve);

}  // namespace spectral
