#pragma once

// Complete / incomplete / primitive verdicts for odd moduli.
//
// m is complete when the only extreme cycle for the digits {0, m} is the
// trivial one {0}; incomplete otherwise. Incompleteness passes to every odd
// multiple (scale the cycle), so the incomplete numbers are exactly the odd
// multiples of the primitive ones: incomplete numbers whose proper divisors
// are all complete.
//
// classify() runs a cascade of sufficient conditions, cheapest first, and
// falls back to the exhaustive cycle walk. Every incomplete verdict carries a
// validated witness cycle.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spectral/cycles.hpp"
#include "spectral/modmath.hpp"

namespace spectral {

/// Identifiers reported in FilterOutcome::rule and Classification::decided_by.
namespace rule {
inline constexpr std::string_view trivial = "trivial";
inline constexpr std::string_view prime_power = "prime-power";
inline constexpr std::string_view divisor_witness = "divisor-witness";
inline constexpr std::string_view sieve_cache = "sieve-cache";
inline constexpr std::string_view family = "family";
inline constexpr std::string_view gmembership = "gmembership";
inline constexpr std::string_view oracle = "oracle";
inline constexpr std::string_view order_bound = "order-bound";
inline constexpr std::string_view product_ratio = "product-ratio";
inline constexpr std::string_view product_interval = "product-interval";
// Advisory family; never used to settle a verdict.
inline constexpr std::string_view bounded_exponent = "bounded-exponent";
inline constexpr std::string_view table_conditioned = "table-conditioned";
inline constexpr std::string_view simple_lcm = "simple-lcm";
inline constexpr std::string_view pairwise_lcm = "pairwise-lcm";
inline constexpr std::string_view coprime_orders = "coprime-orders";
inline constexpr std::string_view prime_extension = "prime-extension";
inline constexpr std::string_view totient_index = "totient-index";
}  // namespace rule

enum class Verdict { complete, incomplete };

const char* to_string(Verdict v);

enum class FilterResult { proves_complete, proves_not_primitive, inconclusive };

const char* to_string(FilterResult r);

struct FilterOutcome {
    std::string rule;
    FilterResult result = FilterResult::inconclusive;
    std::string detail;

    bool proves_complete() const { return result == FilterResult::proves_complete; }
    bool proves_not_primitive() const { return result == FilterResult::proves_not_primitive; }
    bool inconclusive() const { return result == FilterResult::inconclusive; }
};

struct Classification {
    u64 modulus = 1;
    Verdict verdict = Verdict::complete;
    std::optional<ExtremeCycle> witness;  // set iff incomplete
    bool primitive = false;
    std::string decided_by;

    bool incomplete() const { return verdict == Verdict::incomplete; }
};

/// Known primitive numbers with their witnesses, plus the bound up to which
/// the list is known to be exhaustive. Immutable once built; the sieve hands
/// out snapshots.
class PrimitiveCache {
public:
    struct Entry {
        u64 modulus = 0;
        FactoredInteger factors;
        ExtremeCycle witness;
    };

    PrimitiveCache() = default;
    PrimitiveCache(std::vector<Entry> entries, u64 verified_through);

    u64 verified_through() const { return verified_through_; }
    std::span<const Entry> entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    /// Smallest cached primitive dividing m, if any.
    const Entry* find_divisor(u64 m) const;
    /// True when some cached primitive has all of its primes among `primes`.
    bool contains_prime_set_of_some_primitive(std::span<const u64> primes) const;

private:
    std::vector<Entry> entries_;
    u64 verified_through_ = 0;
};

struct ClassifyOptions {
    const PrimitiveCache* cache = nullptr;
    /// Run the cycle oracle behind every rule-settled verdict and throw
    /// InconsistencyError on disagreement.
#ifdef SPECTRAL_CROSS_CHECK
    bool cross_check = true;
#else
    bool cross_check = false;
#endif
    /// Advisory rules skip auxiliary moduli above this size instead of walking them.
    u64 advisory_oracle_limit = 10'000'000;
};

// --- filters ---------------------------------------------------------------

/// Completeness from membership of -1, -2, 2, 3 (and 5..12 when m > 12) in
/// G_m. Requires m odd, m > 3, 3 not dividing m.
FilterOutcome gmembership_filter(u64 m);
FilterOutcome gmembership_filter(const Coset& group);

/// Completeness for m of the forms 4^n + 1, 4^n - 3, 2*4^n - 1, 2*4^n + 1
/// (n >= 1) and 4^n - 5, -7, -9, -11, 2*4^n - 3, 2*4^n - 5 (n >= 3). The
/// forms 2*4^n + 1, 4^n - 7 and 2*4^n - 5 are always multiples of 3 and are
/// reported inconclusive: the membership argument behind the families needs
/// 3 not dividing m.
FilterOutcome family_filter(u64 m);

/// Completeness of p^k for a prime p > 3. Powers of 3 are incomplete.
FilterOutcome prime_power_filter(const FactoredInteger& f);

/// Non-primitivity when o4(m) exceeds cycle_point_count_bound(m): a primitive
/// number's cycle has exactly o4(m) points. This also covers the weaker
/// square-root form o4(m) > sqrt(4m/3). Requires m odd > 3, 3 not dividing m.
FilterOutcome order_bound_filter(u64 m);
FilterOutcome order_bound_filter(u64 m, u64 order);

/// Non-primitivity of m = a*b from the order ratio o4(ab)/o4(b), via either
///   12 * o4(ab) >= (2a + 15) * o4(b)                  (product-ratio)
///   o4(ab) > 2^ceil(log2 sqrt(a/3)) * o4(b)            (product-interval)
/// Requires a, b odd and a > 1.
FilterOutcome product_lemma_filter(u64 a, u64 b);
FilterOutcome product_lemma_filter(u64 a, u64 b, u64 order_ab, u64 order_b);

/// Smallest n >= 0 with 3 * 4^n >= a, i.e. ceil(log2 sqrt(a/3)) clamped at 0.
unsigned half_log_ceiling(u64 a);

/// The checkpoint modulus prod p_i^(iota(p_i) + j_i), j_i the p_i-adic
/// valuation of lcm(o4(p_1), ..., o4(p_r)). If it is complete then every
/// product of powers of these primes is complete. Throws DomainError for
/// repeated primes, primes <= 3, or overflow.
u64 bounded_exponent_reduction(std::span<const u64> primes);

/// The corollary family: conditions on prime orders, simplicity and sub-products
/// that imply completeness or non-primitivity. Reported for information and
/// cross-checking only; classify() never uses them.
std::vector<FilterOutcome> advisory_filters(const FactoredInteger& f, const ClassifyOptions& opts = {});

// --- verdicts --------------------------------------------------------------

/// Cascade: trivial / prime power -> multiple of 3 -> cached primitive divisor
/// -> family / G_m membership -> cycle oracle. `primitive` is set by checking
/// that every m/p (p | m prime) is complete. Throws DomainError for even m.
Classification classify(u64 m, const ClassifyOptions& opts = {});

/// Incomplete with all proper divisors complete. Requires m odd >= 3.
bool is_primitive(u64 m, const ClassifyOptions& opts = {});

}  // namespace spectral
