#include "spectral/modmath.hpp"

#include <algorithm>
#include <string>

namespace spectral {

namespace {

bool mul_overflows(u64 a, u64 b) {
    return a != 0 && b > kMaxModulus / a;
}

void require_odd(u64 m, const char* op) {
    if (m == 0 || m % 2 == 0)
        throw DomainError(std::string(op) + ": modulus must be odd and positive, got " +
                          std::to_string(m));
    if (m > kMaxModulus) throw DomainError(std::string(op) + ": modulus exceeds 2^63-1");
}

// Trial-division factorization including the prime 2.
std::vector<PrimePower> trial_factor_any(u64 n) {
    std::vector<PrimePower> out;
    if (n % 2 == 0) {
        unsigned e = 0;
        while (n % 2 == 0) { n /= 2; ++e; }
        out.push_back({2, e});
    }
    for (u64 d = 3; d <= n / d; d += 2) {
        if (n % d != 0) continue;
        unsigned e = 0;
        while (n % d == 0) { n /= d; ++e; }
        out.push_back({d, e});
    }
    if (n > 1) out.push_back({n, 1});
    return out;
}

constexpr u64 kIterationLimit = u64{1} << 24;

}  // namespace

// --- FactoredInteger -------------------------------------------------------

FactoredInteger FactoredInteger::from_factors(std::vector<PrimePower> factors) {
    FactoredInteger f;
    u64 value = 1;
    u64 previous = 0;
    for (const auto& [p, k] : factors) {
        if (p < 3 || p % 2 == 0) throw DomainError("factor " + std::to_string(p) + " is not an odd prime");
        if (p <= previous) throw DomainError("factors must be strictly increasing");
        if (k == 0) throw DomainError("exponents must be positive");
        for (unsigned i = 0; i < k; ++i) {
            if (mul_overflows(value, p)) throw DomainError("factored value exceeds 2^63-1");
            value *= p;
        }
        previous = p;
    }
    f.value_ = value;
    f.factors_ = std::move(factors);
    return f;
}

std::vector<u64> FactoredInteger::primes() const {
    std::vector<u64> out;
    out.reserve(factors_.size());
    for (const auto& pp : factors_) out.push_back(pp.prime);
    return out;
}

bool FactoredInteger::is_square_free() const {
    return std::all_of(factors_.begin(), factors_.end(),
                       [](const PrimePower& pp) { return pp.exponent == 1; });
}

bool FactoredInteger::divisible_by(u64 prime) const {
    return std::any_of(factors_.begin(), factors_.end(),
                       [prime](const PrimePower& pp) { return pp.prime == prime; });
}

FactoredInteger factorize(u64 n) {
    require_odd(n, "factorize");
    return FactoredInteger::from_factors(trial_factor_any(n));
}

// --- SmallestFactorTable ---------------------------------------------------

SmallestFactorTable::SmallestFactorTable(u64 limit) : spf_(limit + 1, 0) {
    if (limit > 0xFFFFFFFFu) throw DomainError("factor table limit too large");
    std::vector<std::uint32_t> primes;
    for (u64 i = 2; i <= limit; ++i) {
        if (spf_[i] == 0) {
            spf_[i] = static_cast<std::uint32_t>(i);
            primes.push_back(static_cast<std::uint32_t>(i));
        }
        for (std::uint32_t p : primes) {
            if (p > spf_[i] || i * p > limit) break;
            spf_[i * p] = p;
        }
    }
    if (limit >= 1) spf_[1] = 1;
}

std::vector<PrimePower> SmallestFactorTable::factorize_any(u64 n) const {
    if (n == 0 || n > limit()) throw DomainError("value outside factor table range");
    std::vector<PrimePower> out;
    while (n > 1) {
        const u64 p = spf_[n];
        unsigned e = 0;
        while (n % p == 0) { n /= p; ++e; }
        out.push_back({p, e});
    }
    return out;
}

FactoredInteger SmallestFactorTable::factorize(u64 n) const {
    require_odd(n, "factorize");
    return FactoredInteger::from_factors(factorize_any(n));
}

// --- orders ------------------------------------------------------------------

unsigned valuation(u64 n, u64 p) {
    unsigned v = 0;
    while (n % p == 0) { n /= p; ++v; }
    return v;
}

u64 order_of_4_iterative(u64 m) {
    require_odd(m, "order_of_4");
    if (m == 1) return 1;
    u64 x = 4 % m;
    u64 order = 1;
    while (x != 1) {
        x = mul_mod(x, 4, m);
        ++order;
    }
    return order;
}

u64 order_of_4_refined(const FactoredInteger& f) {
    return order_of_4_refined(f, [](u64 n) { return trial_factor_any(n); });
}

OrderRecord order_of_4(const FactoredInteger& f) {
    const u64 m = f.value();
    u64 order = 0;
#ifdef SPECTRAL_CROSS_CHECK
    const u64 refined = order_of_4_refined(f);
    if (m <= kIterationLimit) {
        order = order_of_4_iterative(m);
        if (order != refined)
            throw InconsistencyError("o4(" + std::to_string(m) + "): iteration gives " +
                                     std::to_string(order) + ", refinement gives " +
                                     std::to_string(refined));
    } else {
        order = refined;
    }
#else
    order = m <= kIterationLimit ? order_of_4_iterative(m) : order_of_4_refined(f);
#endif
    return {m, order, order};
}

OrderRecord order_of_4(u64 m) {
    require_odd(m, "order_of_4");
    if (m == 1) return {1, 1, 1};
    return order_of_4(factorize(m));
}

unsigned simplicity_index(u64 p) {
    if (p < 3 || p % 2 == 0) throw DomainError("simplicity_index: need an odd prime >= 3");
    const FactoredInteger f = factorize(p);
    if (!f.is_prime()) throw DomainError("simplicity_index: " + std::to_string(p) + " is composite");
    const auto factor = [](u64 n) { return trial_factor_any(n); };
    const u64 base_order = order_of_4_refined(f, factor);
    unsigned index = 1;
    u64 power = p;
    for (;;) {
        if (mul_overflows(power, p))
            throw DomainError("simplicity_index: p^(index+1) exceeds 2^63-1 for p = " + std::to_string(p));
        power *= p;
        const auto next = FactoredInteger::from_factors({{p, index + 1}});
        if (order_of_4_refined(next, factor) != base_order) return index;
        ++index;
    }
}

u64 order_by_formula(const FactoredInteger& f) {
    if (f.is_one()) return 1;
    std::vector<u64> prime_orders;
    u64 lcm_all = 1;
    for (const auto& pp : f.factors()) {
        const u64 o = order_of_4_refined(FactoredInteger::from_factors({{pp.prime, 1}}));
        prime_orders.push_back(o);
        lcm_all = std::lcm(lcm_all, o);
    }
    u64 result = lcm_all;
    for (const auto& [p, k] : f.factors()) {
        const int lifted = static_cast<int>(k) - static_cast<int>(valuation(lcm_all, p)) -
                           static_cast<int>(simplicity_index(p));
        for (int i = 0; i < lifted; ++i) result *= p;
    }
    return result;
}

// --- cosets ------------------------------------------------------------------

bool Coset::contains(u64 x) const {
    return std::binary_search(elements.begin(), elements.end(), x % modulus);
}

Coset coset_of(u64 m, u64 x) {
    require_odd(m, "coset_of");
    if (m < 3) throw DomainError("coset_of: modulus must be >= 3");
    x %= m;
    if (std::gcd(x, m) != 1)
        throw DomainError("coset_of: " + std::to_string(x) + " is not a unit mod " + std::to_string(m));
    Coset c;
    c.modulus = m;
    u64 y = x;
    do {
        c.elements.push_back(y);
        y = mul_mod(y, 4, m);
    } while (y != x);
    std::sort(c.elements.begin(), c.elements.end());
    c.representative = c.elements.front();
    return c;
}

Coset group_of_4(u64 m) { return coset_of(m, 1); }

std::vector<Coset> unit_cosets(u64 m) {
    require_odd(m, "unit_cosets");
    std::vector<Coset> out;
    std::vector<bool> seen(m, false);
    for (u64 x = 1; x < m; ++x) {
        if (seen[x] || std::gcd(x, m) != 1) continue;
        Coset c = coset_of(m, x);
        for (u64 e : c.elements) seen[e] = true;
        out.push_back(std::move(c));
    }
    return out;
}

u64 totient(const FactoredInteger& f) {
    u64 phi = 1;
    for (const auto& [p, k] : f.factors()) {
        phi *= p - 1;
        for (unsigned i = 1; i < k; ++i) phi *= p;
    }
    return phi;
}

}  // namespace spectral
