#pragma once

// Exact modular arithmetic on odd moduli below 2^63: factorization, the
// multiplicative order of 4, the simplicity index of a prime and the cyclic
// group generated by 4 together with its cosets.

#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "spectral/error.hpp"

namespace spectral {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

/// Largest modulus any operation accepts.
inline constexpr u64 kMaxModulus = (u64{1} << 63) - 1;

struct PrimePower {
    u64 prime = 0;
    unsigned exponent = 0;

    friend auto operator<=>(const PrimePower&, const PrimePower&) = default;
};

/// An odd positive integer together with its prime-power decomposition.
/// Primes are strictly increasing; the value 1 has no factors.
class FactoredInteger {
public:
    FactoredInteger() = default;

    /// Builds from an explicit decomposition, checking that every prime is
    /// odd, the list is strictly increasing and the product fits in 63 bits.
    /// Primality of the listed bases is the caller's responsibility.
    static FactoredInteger from_factors(std::vector<PrimePower> factors);

    u64 value() const { return value_; }
    std::span<const PrimePower> factors() const { return factors_; }
    std::vector<u64> primes() const;

    bool is_one() const { return factors_.empty(); }
    bool is_prime() const { return factors_.size() == 1 && factors_[0].exponent == 1; }
    bool is_prime_power() const { return factors_.size() == 1; }
    bool is_square_free() const;
    bool divisible_by(u64 prime) const;

    friend bool operator==(const FactoredInteger&, const FactoredInteger&) = default;

private:
    u64 value_ = 1;
    std::vector<PrimePower> factors_;
};

/// Deterministic trial division. Throws DomainError for even or zero input.
FactoredInteger factorize(u64 n);

/// Smallest-prime-factor table for bulk factorization of every integer up to
/// a fixed limit.
class SmallestFactorTable {
public:
    explicit SmallestFactorTable(u64 limit);

    u64 limit() const { return spf_.empty() ? 0 : spf_.size() - 1; }
    /// Smallest prime factor of n (n itself when prime). Requires 2 <= n <= limit.
    u64 smallest(u64 n) const { return spf_[n]; }
    bool is_prime(u64 n) const { return n >= 2 && spf_[n] == n; }
    /// Factorization of an odd n in [1, limit].
    FactoredInteger factorize(u64 n) const;
    /// Factorization of any n in [1, limit], including the prime 2. Returned as
    /// a raw list since FactoredInteger is reserved for odd values.
    std::vector<PrimePower> factorize_any(u64 n) const;

private:
    std::vector<std::uint32_t> spf_;
};

inline u64 mul_mod(u64 a, u64 b, u64 m) {
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

inline u64 pow_mod(u64 base, u64 exp, u64 m) {
    if (m == 1) return 0;
    u64 result = 1;
    base %= m;
    while (exp != 0) {
        if (exp & 1) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

/// Exponent of the prime p in n (n > 0).
unsigned valuation(u64 n, u64 p);

/// o4(m) together with the size of the group it generates.
struct OrderRecord {
    u64 modulus = 1;
    u64 order = 1;
    u64 group_size = 1;

    friend bool operator==(const OrderRecord&, const OrderRecord&) = default;
};

/// o4(m) by repeated multiplication. O(o4(m)) time.
u64 order_of_4_iterative(u64 m);

/// o4(m) by refining the Carmichael exponent lambda(m) one prime at a time.
/// `factor_even` must return the full factorization (including 2) of p - 1 for
/// each prime p of m.
template <typename FactorFn>
u64 order_of_4_refined(const FactoredInteger& f, FactorFn&& factor_even);

/// Same, factoring each p - 1 by trial division.
u64 order_of_4_refined(const FactoredInteger& f);

/// Minimal a with 4^a = 1 (mod m). Iterates for m <= 2^24 and refines the
/// Carmichael exponent above that; with SPECTRAL_CROSS_CHECK both routes run
/// and must agree. o4(1) is 1.
OrderRecord order_of_4(u64 m);
OrderRecord order_of_4(const FactoredInteger& f);

/// Largest l with o4(p^l) = o4(p). Throws DomainError for composite p, for
/// p < 3, or when p^(l+1) would not fit in 63 bits.
unsigned simplicity_index(u64 p);

/// o4 of f.value() assembled purely from per-prime data: the prime orders,
/// their lcm L, the simplicity indices and the p-adic valuations of L.
///
///   o4(prod p_i^k_i) = prod p_i^max(k_i - j_i - iota(p_i), 0) * L
///
/// Note that the prime-power step uses o4(p) (not o4(m)) as the base factor:
/// o4(p^k) = p^(k - iota(p)) * o4(p) for k >= iota(p).
u64 order_by_formula(const FactoredInteger& f);

/// A coset x * G_m of the subgroup generated by 4 in the units mod m.
/// Elements are sorted ascending and the representative is the smallest.
struct Coset {
    u64 modulus = 1;
    u64 representative = 1;
    std::vector<u64> elements;

    bool contains(u64 x) const;
    u64 max_element() const { return elements.back(); }
    std::size_t size() const { return elements.size(); }

    friend bool operator==(const Coset&, const Coset&) = default;
};

/// G_m = {4^j mod m}. Requires m odd >= 3.
Coset group_of_4(u64 m);

/// x * G_m. Throws DomainError when gcd(x, m) > 1.
Coset coset_of(u64 m, u64 x);

/// Every coset of G_m in the units mod m, ordered by representative.
std::vector<Coset> unit_cosets(u64 m);

u64 totient(const FactoredInteger& f);

// ---------------------------------------------------------------------------

namespace detail {

// Merge factorizations of the p-1 and the p^(k-1) into lambda(m).
inline void raise(std::map<u64, unsigned>& into, u64 prime, unsigned exponent) {
    auto& e = into[prime];
    if (exponent > e) e = exponent;
}

}  // namespace detail

template <typename FactorFn>
u64 order_of_4_refined(const FactoredInteger& f, FactorFn&& factor_even) {
    if (f.is_one()) return 1;
    std::map<u64, unsigned> lambda;
    for (const auto& [p, k] : f.factors()) {
        if (k > 1) detail::raise(lambda, p, k - 1);
        for (const auto& [q, e] : factor_even(p - 1)) detail::raise(lambda, q, e);
    }
    const u64 m = f.value();
    u64 order = 1;
    for (const auto& [q, e] : lambda)
        for (unsigned i = 0; i < e; ++i) order *= q;
    if (pow_mod(4, order, m) != 1)
        throw InconsistencyError("4^lambda(m) != 1 mod m");
    for (const auto& [q, e] : lambda) {
        for (unsigned i = 0; i < e; ++i) {
            if (pow_mod(4, order / q, m) != 1) break;
            order /= q;
        }
    }
    return order;
}

}  // namespace spectral
