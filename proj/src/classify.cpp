#include "spectral/classify.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <numeric>
#include <sstream>

namespace spectral {

namespace {

FilterOutcome outcome(std::string_view rule, FilterResult result, std::string detail) {
    return FilterOutcome{std::string(rule), result, std::move(detail)};
}

FilterOutcome inconclusive(std::string_view rule, std::string detail = {}) {
    return outcome(rule, FilterResult::inconclusive, std::move(detail));
}

void require_odd(u64 m, const char* op) {
    if (m == 0 || m % 2 == 0)
        throw DomainError(std::string(op) + ": modulus must be odd, got " + std::to_string(m));
}

void require_filter_domain(u64 m, const char* op) {
    require_odd(m, op);
    if (m <= 3) throw DomainError(std::string(op) + ": modulus must exceed 3");
    if (m % 3 == 0) throw DomainError(std::string(op) + ": modulus must not be divisible by 3");
}

u64 prime_order(u64 p) { return order_of_4_refined(FactoredInteger::from_factors({{p, 1}})); }

const ExtremeCycle& three_cycle() {
    static const ExtremeCycle c{3, {1}, {3}};
    return c;
}

struct Settled {
    Verdict verdict = Verdict::complete;
    std::optional<ExtremeCycle> witness;
    std::string_view rule;
};

Settled complete_by(std::string_view rule) { return {Verdict::complete, std::nullopt, rule}; }

Settled incomplete_by(std::string_view rule, ExtremeCycle witness) {
    return {Verdict::incomplete, std::move(witness), rule};
}

Settled settle(u64 m, const ClassifyOptions& opts) {
    if (m == 1) return complete_by(rule::trivial);
    const FactoredInteger f = factorize(m);
    if (prime_power_filter(f).proves_complete()) return complete_by(rule::prime_power);

    if (m % 3 == 0) {
        if (m == 3) return incomplete_by(rule::oracle, find_cycles(3).cycles.front());
        return incomplete_by(rule::divisor_witness, scaled(three_cycle(), m / 3));
    }

    if (opts.cache != nullptr) {
        if (const auto* entry = opts.cache->find_divisor(m)) {
            if (entry->modulus == m) return incomplete_by(rule::sieve_cache, entry->witness);
            return incomplete_by(rule::divisor_witness, scaled(entry->witness, m / entry->modulus));
        }
        if (m <= opts.cache->verified_through()) return complete_by(rule::sieve_cache);
    }

    if (family_filter(m).proves_complete()) return complete_by(rule::family);
    if (gmembership_filter(m).proves_complete()) return complete_by(rule::gmembership);

    CycleInventory inv = find_cycles(m);
    if (inv.empty()) return complete_by(rule::oracle);
    return incomplete_by(rule::oracle, std::move(inv.cycles.front()));
}

void check_settled(u64 m, const Settled& s, const ClassifyOptions& opts) {
    if (s.witness) {
        const CycleCheck check = validate_cycle(*s.witness);
        if (!check || s.witness->is_trivial() || s.witness->modulus != m)
            throw InconsistencyError("witness for " + std::to_string(m) + " from rule " +
                                     std::string(s.rule) + " is invalid: " + check.detail);
    }
    if (!opts.cross_check || s.rule == rule::oracle) return;
    const bool oracle_incomplete = !find_cycles(m).empty();
    if (oracle_incomplete != (s.verdict == Verdict::incomplete))
        throw InconsistencyError("rule " + std::string(s.rule) + " says " + to_string(s.verdict) +
                                 " for " + std::to_string(m) + " but the cycle oracle disagrees");
}

Settled settle_checked(u64 m, const ClassifyOptions& opts) {
    Settled s = settle(m, opts);
    check_settled(m, s, opts);
    return s;
}

u64 pow_u64(u64 base, unsigned exp) {
    u64 r = 1;
    for (unsigned i = 0; i < exp; ++i) {
        if (base != 0 && r > kMaxModulus / base) throw DomainError("power exceeds 2^63-1");
        r *= base;
    }
    return r;
}

// Advisory rules only handle primes below this size so every comparison fits
// in 128 bits.
constexpr u64 kAdvisoryPrimeLimit = u64{1} << 31;

struct PrimeData {
    u64 prime;
    unsigned exponent;
    u64 order;
    unsigned iota;
};

std::string join(std::span<const u64> xs) {
    std::ostringstream os;
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
    return os.str();
}

u64 lcm_of_orders(std::span<const PrimeData> ps) {
    u64 l = 1;
    for (const auto& p : ps) l = std::lcm(l, p.order);
    return l;
}

bool orders_avoid_primes(std::span<const PrimeData> ps) {
    for (const auto& a : ps)
        for (const auto& b : ps)
            if (a.order % b.prime == 0) return false;
    return true;
}

bool all_simple_above_3(std::span<const PrimeData> ps) {
    return std::all_of(ps.begin(), ps.end(), [](const PrimeData& p) { return p.prime > 3 && p.iota == 1; });
}

u64 product_of_primes(std::span<const PrimeData> ps) {
    u64 prod = 1;
    for (const auto& p : ps) prod *= p.prime;
    return prod;
}

// Completeness of every product of powers of the given primes, established
// through the checkpoint modulus when it is small enough to classify.
std::optional<bool> all_powers_complete(std::span<const u64> primes, const ClassifyOptions& opts) {
    if (primes.size() <= 1) return true;
    u64 checkpoint = 0;
    try {
        checkpoint = bounded_exponent_reduction(primes);
    } catch (const DomainError&) {
        return std::nullopt;
    }
    if (checkpoint > opts.advisory_oracle_limit) return std::nullopt;
    return classify(checkpoint, opts).verdict == Verdict::complete;
}

FilterOutcome simple_lcm_rule(std::span<const PrimeData> ps, const ClassifyOptions& opts) {
    if (!all_simple_above_3(ps)) return inconclusive(rule::simple_lcm, "needs distinct simple primes > 3");
    if (!orders_avoid_primes(ps)) return inconclusive(rule::simple_lcm, "an order is divisible by one of the primes");
    const u64 l = lcm_of_orders(ps);
    const u64 prod = product_of_primes(ps);
    const u64 threshold = u64{1} << half_log_ceiling(prod);
    if (l <= threshold)
        return inconclusive(rule::simple_lcm, "lcm " + std::to_string(l) + " <= " + std::to_string(threshold));
    const std::size_t r = ps.size();
    for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << r); ++mask) {
        std::vector<u64> subset;
        for (std::size_t i = 0; i < r; ++i)
            if (mask >> i & 1) subset.push_back(ps[i].prime);
        const auto ok = all_powers_complete(subset, opts);
        if (!ok) return inconclusive(rule::simple_lcm, "sub-product {" + join(subset) + "} not checked");
        if (!*ok) return inconclusive(rule::simple_lcm, "sub-product {" + join(subset) + "} incomplete");
    }
    return outcome(rule::simple_lcm, FilterResult::proves_complete,
                   "lcm " + std::to_string(l) + " > " + std::to_string(threshold));
}

FilterOutcome pairwise_lcm_rule(std::span<const PrimeData> ps) {
    if (!all_simple_above_3(ps)) return inconclusive(rule::pairwise_lcm, "needs distinct simple primes > 3");
    if (!orders_avoid_primes(ps)) return inconclusive(rule::pairwise_lcm, "an order is divisible by one of the primes");
    const std::size_t r = ps.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << r); ++mask) {
        if (std::popcount(mask) < 2) continue;
        u128 l = 1;
        u128 prod = 1;
        for (std::size_t i = 0; i < r; ++i) {
            if (!(mask >> i & 1)) continue;
            l = std::lcm(static_cast<u64>(l), ps[i].order);
            prod *= ps[i].prime;
        }
        // lcm > sqrt(4/3 * prod)  <=>  3 * lcm^2 > 4 * prod
        if (3 * l * l <= 4 * prod) return inconclusive(rule::pairwise_lcm, "a sub-product fails the lcm bound");
    }
    return outcome(rule::pairwise_lcm, FilterResult::proves_complete, "every sub-product satisfies the lcm bound");
}

FilterOutcome coprime_orders_rule(std::span<const PrimeData> ps) {
    if (!all_simple_above_3(ps)) return inconclusive(rule::coprime_orders, "needs distinct simple primes > 3");
    std::vector<u64> numbers;
    for (const auto& p : ps) {
        numbers.push_back(p.order);
        numbers.push_back(p.prime);
    }
    for (std::size_t i = 0; i < numbers.size(); ++i)
        for (std::size_t j = i + 1; j < numbers.size(); ++j)
            if (std::gcd(numbers[i], numbers[j]) != 1)
                return inconclusive(rule::coprime_orders, "orders and primes are not mutually prime");
    for (const auto& p : ps) {
        // o > sqrt(sqrt(4/3) p)  <=>  3 o^4 > 4 p^2
        const u128 o2 = static_cast<u128>(p.order) * p.order;
        const u128 p2 = static_cast<u128>(p.prime) * p.prime;
        if (3 * o2 * o2 <= 4 * p2)
            return inconclusive(rule::coprime_orders, "o4(" + std::to_string(p.prime) + ") too small");
    }
    return outcome(rule::coprime_orders, FilterResult::proves_complete, "orders and primes mutually prime");
}

FilterOutcome prime_extension_rule(const FactoredInteger& f, std::span<const PrimeData> ps,
                                   const ClassifyOptions& opts) {
    for (const auto& p : ps) {
        if (p.prime <= 3 || p.iota != 1) continue;
        if (p.order <= (u64{1} << half_log_ceiling(p.prime))) continue;
        const u64 a = f.value() / pow_u64(p.prime, p.exponent);
        const u64 order_a = a == 1 ? 1 : order_of_4_refined(factorize(a));
        if (std::gcd(p.order, order_a) != 1) continue;
        if (a > opts.advisory_oracle_limit) continue;
        if (a != 1 && classify(a, opts).verdict != Verdict::complete) continue;
        return outcome(rule::prime_extension, FilterResult::proves_complete,
                       "p = " + std::to_string(p.prime) + " extends complete a = " + std::to_string(a));
    }
    return inconclusive(rule::prime_extension, "no prime extends a complete cofactor");
}

FilterOutcome totient_index_rule(const FactoredInteger& f) {
    const u64 m = f.value();
    const u64 phi = totient(f);
    const u64 order = order_of_4_refined(f);
    const u64 index = phi / order;
    // phi / sqrt(4m/3) > index  <=>  o4 > sqrt(4m/3)  <=>  3 o4^2 > 4m
    if (3 * static_cast<u128>(order) * order > 4 * static_cast<u128>(m))
        return outcome(rule::totient_index, FilterResult::proves_not_primitive,
                       "index " + std::to_string(index) + " of G_m is small");
    return inconclusive(rule::totient_index, "index " + std::to_string(index));
}

}  // namespace

const char* to_string(Verdict v) { return v == Verdict::complete ? "complete" : "incomplete"; }

const char* to_string(FilterResult r) {
    switch (r) {
        case FilterResult::proves_complete: return "proves-complete";
        case FilterResult::proves_not_primitive: return "proves-not-primitive";
        case FilterResult::inconclusive: return "inconclusive";
    }
    return "unknown";
}

// --- PrimitiveCache ----------------------------------------------------------

PrimitiveCache::PrimitiveCache(std::vector<Entry> entries, u64 verified_through)
    : entries_(std::move(entries)), verified_through_(verified_through) {
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.modulus < b.modulus; });
}

const PrimitiveCache::Entry* PrimitiveCache::find_divisor(u64 m) const {
    for (const auto& e : entries_) {
        if (e.modulus > m) break;
        if (m % e.modulus == 0) return &e;
    }
    return nullptr;
}

bool PrimitiveCache::contains_prime_set_of_some_primitive(std::span<const u64> primes) const {
    for (const auto& e : entries_) {
        const auto ps = e.factors.primes();
        const bool subset = std::all_of(ps.begin(), ps.end(), [&](u64 p) {
            return std::find(primes.begin(), primes.end(), p) != primes.end();
        });
        if (subset) return true;
    }
    return false;
}

// --- filters -----------------------------------------------------------------

FilterOutcome gmembership_filter(const Coset& group) {
    const u64 m = group.modulus;
    require_filter_domain(m, "gmembership_filter");
    std::vector<std::pair<u64, std::string>> candidates = {
        {m - 1, "-1"}, {m - 2, "-2"}, {2, "2"}, {3, "3"}};
    if (m > 12)
        for (u64 c = 5; c <= 12; ++c) candidates.emplace_back(c, std::to_string(c));
    for (const auto& [value, label] : candidates) {
        if (group.contains(value))
            return outcome(rule::gmembership, FilterResult::proves_complete,
                           "c = " + label + " (" + std::to_string(value % m) + ") lies in G_m");
    }
    return inconclusive(rule::gmembership, "G_m has " + std::to_string(group.size()) +
                                               " elements and none of the test values");
}

FilterOutcome gmembership_filter(u64 m) {
    require_filter_domain(m, "gmembership_filter");
    return gmembership_filter(group_of_4(m));
}

FilterOutcome family_filter(u64 m) {
    require_odd(m, "family_filter");
    if (m <= 3) throw DomainError("family_filter: modulus must exceed 3");
    struct Form {
        u64 scale;
        int offset;
        unsigned min_n;
        const char* name;
    };
    static constexpr std::array<Form, 10> forms{{
        {1, +1, 1, "4^n+1"},  {1, -3, 1, "4^n-3"},  {2, -1, 1, "2*4^n-1"}, {2, +1, 1, "2*4^n+1"},
        {1, -5, 3, "4^n-5"},  {1, -7, 3, "4^n-7"},  {1, -9, 3, "4^n-9"},   {1, -11, 3, "4^n-11"},
        {2, -3, 3, "2*4^n-3"}, {2, -5, 3, "2*4^n-5"},
    }};
    for (const auto& form : forms) {
        u128 power = 1;
        for (unsigned i = 0; i < form.min_n; ++i) power *= 4;
        for (unsigned n = form.min_n; power * form.scale <= static_cast<u128>(m) + 11; ++n, power *= 4) {
            const u128 candidate = power * form.scale + form.offset;
            if (candidate != m) continue;
            const std::string what = std::to_string(m) + " = " + form.name + " with n = " + std::to_string(n);
            if (m % 3 == 0) return inconclusive(rule::family, what + ", but 3 divides it");
            return outcome(rule::family, FilterResult::proves_complete, what);
        }
    }
    return inconclusive(rule::family, "no family matches");
}

FilterOutcome prime_power_filter(const FactoredInteger& f) {
    if (f.is_prime_power() && f.factors()[0].prime > 3)
        return outcome(rule::prime_power, FilterResult::proves_complete,
                       std::to_string(f.factors()[0].prime) + "^" + std::to_string(f.factors()[0].exponent));
    if (f.is_prime_power()) return inconclusive(rule::prime_power, "power of 3");
    return inconclusive(rule::prime_power, std::to_string(f.factors().size()) + " distinct primes");
}

FilterOutcome order_bound_filter(u64 m, u64 order) {
    require_filter_domain(m, "order_bound_filter");
    const u64 bound = cycle_point_count_bound(m);
    const std::string detail = "o4 = " + std::to_string(order) + ", cycle point bound = " + std::to_string(bound);
    if (order > bound) return outcome(rule::order_bound, FilterResult::proves_not_primitive, detail);
    return inconclusive(rule::order_bound, detail);
}

FilterOutcome order_bound_filter(u64 m) {
    require_filter_domain(m, "order_bound_filter");
    return order_bound_filter(m, order_of_4(m).order);
}

unsigned half_log_ceiling(u64 a) {
    unsigned n = 0;
    u128 three_four_n = 3;
    while (three_four_n < a) {
        three_four_n *= 4;
        ++n;
    }
    return n;
}

FilterOutcome product_lemma_filter(u64 a, u64 b, u64 order_ab, u64 order_b) {
    require_odd(a, "product_lemma_filter");
    require_odd(b, "product_lemma_filter");
    if (a <= 1) throw DomainError("product_lemma_filter: a must exceed 1");
    const std::string orders = "o4(ab) = " + std::to_string(order_ab) + ", o4(b) = " + std::to_string(order_b);
    if (12 * static_cast<u128>(order_ab) >= (2 * static_cast<u128>(a) + 15) * order_b)
        return outcome(rule::product_ratio, FilterResult::proves_not_primitive,
                       orders + " >= (2a+15)/12 * o4(b)");
    const unsigned n = half_log_ceiling(a);
    if (static_cast<u128>(order_ab) > (static_cast<u128>(1) << n) * order_b)
        return outcome(rule::product_interval, FilterResult::proves_not_primitive,
                       orders + " > 2^" + std::to_string(n) + " * o4(b)");
    return inconclusive(rule::product_interval, orders);
}

FilterOutcome product_lemma_filter(u64 a, u64 b) {
    require_odd(a, "product_lemma_filter");
    require_odd(b, "product_lemma_filter");
    if (a <= 1) throw DomainError("product_lemma_filter: a must exceed 1");
    if (b > kMaxModulus / a) throw DomainError("product_lemma_filter: a*b exceeds 2^63-1");
    return product_lemma_filter(a, b, order_of_4(a * b).order, order_of_4(b).order);
}

u64 bounded_exponent_reduction(std::span<const u64> primes) {
    std::vector<u64> sorted(primes.begin(), primes.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw DomainError("bounded_exponent_reduction: repeated prime");
    u64 l = 1;
    for (u64 p : sorted) {
        if (p <= 3 || !factorize(p).is_prime())
            throw DomainError("bounded_exponent_reduction: " + std::to_string(p) + " is not a prime > 3");
        l = std::lcm(l, prime_order(p));
    }
    u64 result = 1;
    for (u64 p : sorted) {
        const u64 part = pow_u64(p, simplicity_index(p) + valuation(l, p));
        if (result > kMaxModulus / part) throw DomainError("bounded_exponent_reduction: result exceeds 2^63-1");
        result *= part;
    }
    return result;
}

std::vector<FilterOutcome> advisory_filters(const FactoredInteger& f, const ClassifyOptions& opts) {
    std::vector<FilterOutcome> out;
    if (f.value() <= 3) return out;
    const bool in_range = std::all_of(f.factors().begin(), f.factors().end(),
                                      [](const PrimePower& pp) { return pp.prime < kAdvisoryPrimeLimit; });
    if (!in_range) return out;

    std::vector<PrimeData> ps;
    for (const auto& [p, k] : f.factors()) ps.push_back({p, k, prime_order(p), simplicity_index(p)});
    const std::vector<u64> primes = f.primes();
    const bool has_three = f.divisible_by(3);

    out.push_back(totient_index_rule(f));

    if (has_three) {
        for (auto id : {rule::bounded_exponent, rule::table_conditioned, rule::simple_lcm, rule::pairwise_lcm,
                        rule::coprime_orders, rule::prime_extension})
            out.push_back(inconclusive(id, "3 divides m"));
        return out;
    }

    std::optional<u64> checkpoint;
    try {
        checkpoint = bounded_exponent_reduction(primes);
    } catch (const DomainError&) {
    }
    if (!checkpoint) {
        out.push_back(inconclusive(rule::bounded_exponent, "checkpoint modulus overflows"));
    } else if (*checkpoint > opts.advisory_oracle_limit) {
        out.push_back(inconclusive(rule::bounded_exponent, "checkpoint " + std::to_string(*checkpoint) + " too large"));
    } else if (classify(*checkpoint, opts).verdict == Verdict::complete) {
        out.push_back(outcome(rule::bounded_exponent, FilterResult::proves_complete,
                              "checkpoint " + std::to_string(*checkpoint) + " is complete"));
    } else {
        out.push_back(inconclusive(rule::bounded_exponent, "checkpoint " + std::to_string(*checkpoint) + " is incomplete"));
    }

    if (opts.cache == nullptr || !checkpoint) {
        out.push_back(inconclusive(rule::table_conditioned, "no primitive table"));
    } else if (*checkpoint > opts.cache->verified_through()) {
        out.push_back(inconclusive(rule::table_conditioned, "checkpoint beyond the verified table"));
    } else if (opts.cache->contains_prime_set_of_some_primitive(primes)) {
        out.push_back(inconclusive(rule::table_conditioned, "primes contain a primitive's prime set"));
    } else {
        out.push_back(outcome(rule::table_conditioned, FilterResult::proves_complete,
                              "checkpoint " + std::to_string(*checkpoint) + " avoids every tabulated primitive"));
    }

    out.push_back(simple_lcm_rule(ps, opts));
    out.push_back(pairwise_lcm_rule(ps));
    out.push_back(coprime_orders_rule(ps));
    out.push_back(prime_extension_rule(f, ps, opts));
    return out;
}

// --- verdicts ----------------------------------------------------------------

Classification classify(u64 m, const ClassifyOptions& opts) {
    require_odd(m, "classify");
    Settled s = settle_checked(m, opts);
    Classification c;
    c.modulus = m;
    c.verdict = s.verdict;
    c.witness = std::move(s.witness);
    c.decided_by = std::string(s.rule);
    if (c.incomplete()) {
        c.primitive = true;
        for (u64 p : factorize(m).primes()) {
            const u64 d = m / p;
            if (d > 1 && settle_checked(d, opts).verdict == Verdict::incomplete) {
                c.primitive = false;
                break;
            }
        }
    }
    return c;
}

bool is_primitive(u64 m, const ClassifyOptions& opts) {
    require_odd(m, "is_primitive");
    if (m < 3) throw DomainError("is_primitive: modulus must be >= 3");
    return classify(m, opts).primitive;
}

}  // namespace spectral
