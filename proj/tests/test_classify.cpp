#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "spectral/classify.hpp"

using namespace spectral;

namespace {

constexpr u64 kScan = 100001;

// Oracle verdicts for every odd m <= kScan.
struct Truth {
    std::vector<bool> incomplete;
    std::vector<bool> primitive;

    Truth() : incomplete(kScan + 1, false), primitive(kScan + 1, false) {
        for (u64 m = 3; m <= kScan; m += 2) incomplete[m] = !find_cycles(m).empty();
        for (u64 m = 3; m <= kScan; m += 2) {
            if (!incomplete[m]) continue;
            bool all_complete = true;
            for (const auto& [p, k] : oracle::factor(m))
                if (m / p > 1 && incomplete[m / p]) all_complete = false;
            primitive[m] = all_complete;
        }
    }
};

const Truth& truth() {
    static const Truth t;
    return t;
}

std::vector<u64> divisors(u64 m) {
    std::vector<u64> out;
    for (u64 d = 1; d * d <= m; ++d)
        if (m % d == 0) {
            out.push_back(d);
            if (d * d != m) out.push_back(m / d);
        }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("gmembership_filter examples") {
    CHECK(gmembership_filter(5).proves_complete());
    CHECK(gmembership_filter(85).inconclusive());
    CHECK(gmembership_filter(13).proves_complete());
    CHECK(gmembership_filter(13).rule == rule::gmembership);
    CHECK_THROWS_AS(gmembership_filter(9), DomainError);
    CHECK_THROWS_AS(gmembership_filter(3), DomainError);
    CHECK_THROWS_AS(gmembership_filter(10), DomainError);
}

TEST_CASE("family_filter examples") {
    CHECK(family_filter(17).proves_complete());
    CHECK(family_filter(127).proves_complete());
    CHECK(family_filter(85).inconclusive());
    CHECK(family_filter(4 * 4 * 4 - 11).proves_complete());
    // 2*4^n + 1 is a multiple of 3.
    CHECK(family_filter(33).inconclusive());
    CHECK(family_filter(4 * 4 * 4 * 4 - 7).inconclusive());
    CHECK(family_filter(2 * 64 - 5).inconclusive());
    for (u64 n = 1; n <= 20; ++n) {
        u64 p = 1;
        for (u64 i = 0; i < n; ++i) p *= 4;
        CHECK((2 * p + 1) % 3 == 0);
        if (n >= 3) CHECK((p - 7) % 3 == 0);
        if (n >= 3) CHECK((2 * p - 5) % 3 == 0);
    }
}

TEST_CASE("prime_power_filter examples") {
    CHECK(prime_power_filter(factorize(25)).proves_complete());
    CHECK(prime_power_filter(factorize(9)).inconclusive());
    CHECK(prime_power_filter(factorize(35)).inconclusive());
}

TEST_CASE("order_bound_filter examples") {
    CHECK(order_bound_filter(55).proves_not_primitive());
    CHECK(order_bound_filter(275).inconclusive());
    CHECK(order_bound_filter(85).inconclusive());
    CHECK_THROWS_AS(order_bound_filter(15), DomainError);
}

TEST_CASE("product_lemma_filter examples") {
    CHECK(product_lemma_filter(5, 11).inconclusive());
    CHECK(product_lemma_filter(25, 11).inconclusive());
    CHECK(product_lemma_filter(5, 7).inconclusive());
    CHECK_THROWS_AS(product_lemma_filter(1, 7), DomainError);
    CHECK(half_log_ceiling(1) == 0);
    CHECK(half_log_ceiling(3) == 0);
    CHECK(half_log_ceiling(5) == 1);
    CHECK(half_log_ceiling(12) == 1);
    CHECK(half_log_ceiling(13) == 2);
}

TEST_CASE("bounded_exponent_reduction examples") {
    const std::vector<u64> a{5, 11}, b{5, 7}, c{5, 17};
    CHECK(bounded_exponent_reduction(a) == 275);
    CHECK(bounded_exponent_reduction(b) == 35);
    CHECK(bounded_exponent_reduction(c) == 85);
    CHECK(classify(85).incomplete());
    CHECK(classify(275).verdict == Verdict::complete);
    const std::vector<u64> repeated{5, 5};
    CHECK_THROWS_AS(bounded_exponent_reduction(repeated), DomainError);
    const std::vector<u64> with3{3, 5};
    CHECK_THROWS_AS(bounded_exponent_reduction(with3), DomainError);
}

TEST_CASE("classify examples") {
    const auto c3 = classify(3);
    CHECK(c3.incomplete());
    CHECK(c3.primitive);
    CHECK(c3.witness->points == std::vector<u64>{1});
    CHECK(c3.decided_by == rule::oracle);

    const auto c5461 = classify(5461);
    CHECK(c5461.incomplete());
    CHECK(c5461.primitive);

    const auto c25 = classify(25);
    CHECK(c25.verdict == Verdict::complete);
    CHECK(c25.decided_by == rule::prime_power);

    const auto c15 = classify(15);
    CHECK(c15.incomplete());
    CHECK_FALSE(c15.primitive);
    CHECK(c15.witness->points == std::vector<u64>{5});

    CHECK(classify(1).verdict == Verdict::complete);
    CHECK(classify(1).decided_by == rule::trivial);
    CHECK_THROWS_AS(classify(8), DomainError);
}

TEST_CASE("is_primitive examples") {
    CHECK(is_primitive(85));
    CHECK_FALSE(is_primitive(255));
    CHECK(is_primitive(341));
    CHECK_THROWS_AS(is_primitive(1), DomainError);
    CHECK_THROWS_AS(is_primitive(6), DomainError);
}

TEST_CASE("completeness filters are sound for odd m <= 1e5") {
    const auto& t = truth();
    std::size_t fired = 0;
    for (u64 m = 5; m <= kScan; m += 2) {
        std::vector<FilterOutcome> outs{prime_power_filter(factorize(m)), family_filter(m)};
        if (m % 3 != 0) outs.push_back(gmembership_filter(m));
        for (const auto& o : outs) {
            if (!o.proves_complete()) continue;
            ++fired;
            INFO(m, " ", o.rule, " ", o.detail);
            REQUIRE_FALSE(t.incomplete[m]);
        }
    }
    CHECK(fired > 10000);
}

TEST_CASE("non-primitivity filters are sound for odd m <= 1e5") {
    const auto& t = truth();
    std::size_t fired = 0;
    for (u64 m = 5; m <= kScan; m += 2) {
        if (m % 3 != 0 && order_bound_filter(m).proves_not_primitive()) {
            ++fired;
            REQUIRE_FALSE(t.primitive[m]);
        }
        const u64 om = order_of_4(m).order;
        for (u64 b : divisors(m)) {
            if (b == m) continue;
            const auto o = product_lemma_filter(m / b, b, om, order_of_4(b).order);
            if (!o.proves_not_primitive()) continue;
            ++fired;
            INFO(m, " = ", m / b, " * ", b, " ", o.rule, " ", o.detail);
            REQUIRE_FALSE(t.primitive[m]);
        }
    }
    CHECK(fired > 10000);
}

TEST_CASE("advisory filters are sound for odd m <= 2e4") {
    const auto& t = truth();
    ClassifyOptions opts;
    opts.advisory_oracle_limit = kScan;
    std::size_t fired = 0;
    for (u64 m = 5; m <= 20001; m += 2) {
        for (const auto& o : advisory_filters(factorize(m), opts)) {
            INFO(m, " ", o.rule, " ", o.detail);
            if (o.proves_complete()) REQUIRE_FALSE(t.incomplete[m]);
            if (o.proves_not_primitive()) REQUIRE_FALSE(t.primitive[m]);
            if (!o.inconclusive()) ++fired;
        }
    }
    CHECK(fired > 1000);
}

TEST_CASE("classify matches the oracle for odd m <= 2e4") {
    const auto& t = truth();
    ClassifyOptions opts;
    opts.cross_check = true;
    for (u64 m = 3; m <= 20001; m += 2) {
        const auto c = classify(m, opts);
        REQUIRE(c.incomplete() == t.incomplete[m]);
        REQUIRE(c.primitive == t.primitive[m]);
        if (c.incomplete()) {
            CHECK(validate_cycle(*c.witness).ok());
            CHECK(c.witness->modulus == m);
        }
    }
}

TEST_CASE("odd multiples of incomplete numbers are incomplete") {
    const auto& t = truth();
    for (u64 m = 3; m <= 30001; m += 2) {
        if (!t.incomplete[m]) continue;
        for (u64 k = 3; k * m <= kScan; k += 2) REQUIRE(t.incomplete[k * m]);
    }
    ClassifyOptions opts;
    opts.cross_check = false;
    for (u64 m : {85ULL, 341ULL, 455ULL, 1285ULL, 4369ULL, 5461ULL, 6355ULL, 9709ULL, 28679ULL}) {
        for (u64 k = 3; k * m <= kScan; k += 2) {
            const auto c = classify(k * m, opts);
            REQUIRE(c.incomplete());
            CHECK_FALSE(c.primitive);
        }
    }
}

TEST_CASE("sieve-cache rule uses a primitive list and its verified bound") {
    std::vector<PrimitiveCache::Entry> entries;
    for (u64 m : {3ULL, 85ULL, 341ULL, 455ULL})
        entries.push_back({m, factorize(m), find_cycles(m).cycles.front()});
    const PrimitiveCache cache(entries, 500);
    ClassifyOptions opts;
    opts.cache = &cache;
    opts.cross_check = true;

    const auto c85 = classify(85, opts);
    CHECK(c85.decided_by == rule::sieve_cache);
    CHECK(c85.primitive);
    const auto c425 = classify(425, opts);
    CHECK(c425.decided_by == rule::divisor_witness);
    CHECK(c425.witness->points.front() == 35);
    CHECK(classify(451, opts).decided_by == rule::sieve_cache);
    CHECK(classify(451, opts).verdict == Verdict::complete);
    CHECK(classify(1285, opts).decided_by == rule::oracle);
    CHECK(cache.find_divisor(1705)->modulus == 341);
    CHECK(cache.find_divisor(1275)->modulus == 3);
    CHECK(cache.find_divisor(1021) == nullptr);
    const std::vector<u64> ps{5, 11, 31}, qs{5, 11};
    CHECK(cache.contains_prime_set_of_some_primitive(ps));
    CHECK_FALSE(cache.contains_prime_set_of_some_primitive(qs));
}

TEST_CASE("inequality between the two product lemmas fails only at 13 and 15") {
    std::vector<u64> exceptions;
    for (u64 a = 5; a <= 10000; a += 2)
        if (!(12 * (u64{1} << half_log_ceiling(a)) < 2 * a + 15)) exceptions.push_back(a);
    CHECK(exceptions == std::vector<u64>{13, 15});
}
