#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "oracles.hpp"
#include "spectral/cycles.hpp"

using namespace spectral;

namespace {

std::set<u64> points_of(const CycleInventory& inv) {
    std::set<u64> out;
    for (const auto& c : inv.cycles) out.insert(c.points.begin(), c.points.end());
    return out;
}

ExtremeCycle rotated(ExtremeCycle c, std::size_t k) {
    std::rotate(c.points.begin(), c.points.begin() + k, c.points.end());
    std::rotate(c.digits.begin(), c.digits.begin() + k, c.digits.end());
    return c;
}

}  // namespace

TEST_CASE("step examples") {
    CHECK(step(1, 3) == Step{1, 3});
    CHECK(step(28, 85) == Step{7, 0});
    CHECK_FALSE(step(2, 5).has_value());
    CHECK(step(0, 7) == Step{0, 0});
}

TEST_CASE("find_cycles examples") {
    const auto inv3 = find_cycles(3);
    REQUIRE(inv3.cycles.size() == 1);
    CHECK(inv3.cycles[0].points == std::vector<u64>{1});
    CHECK(inv3.cycles[0].digits == std::vector<u64>{3});

    CHECK(find_cycles(5).empty());
    CHECK(find_cycles(1).empty());

    const auto inv85 = find_cycles(85);
    REQUIRE(inv85.cycles.size() == 1);
    CHECK(inv85.cycles[0].points == std::vector<u64>{7, 23, 27, 28});
    CHECK(inv85.cycles[0].digits == std::vector<u64>{85, 85, 85, 0});
    CHECK(inv85.point_count == 4);

    const auto inv341 = find_cycles(341);
    REQUIRE(inv341.cycles.size() == 2);
    CHECK(inv341.cycles[0].points == std::vector<u64>{7, 87, 107, 112, 28});
    CHECK(inv341.cycles[1].points == std::vector<u64>{23, 91, 108, 27, 92});
    CHECK(inv341.cycles[1].digits == std::vector<u64>{341, 341, 0, 341, 0});

    CHECK_THROWS_AS(find_cycles(10), DomainError);
}

TEST_CASE("find_cycles agrees with unmemoized walks for odd m <= 3001") {
    for (u64 m = 1; m <= 3001; m += 2) {
        const auto inv = find_cycles(m);
        REQUIRE(points_of(inv) == oracle::cycle_points(m));
    }
}

TEST_CASE("interval_cycle_search equals find_cycles for odd m <= 1e5") {
    for (u64 m = 1; m <= 100001; m += 2) {
        const auto a = find_cycles(m);
        const auto b = interval_cycle_search(m);
        REQUIRE(a.cycles == b.cycles);
        REQUIRE(a.point_count == b.point_count);
    }
    CHECK(interval_cycle_search(6973057).cycles == find_cycles(6973057).cycles);
    CHECK_THROWS_AS(interval_cycle_search(4), DomainError);
}

TEST_CASE("cycle invariants for odd m <= 1e4") {
    for (u64 m = 1; m <= 10001; m += 2) {
        const auto inv = find_cycles(m);
        std::size_t total = 0;
        std::set<u64> seen;
        for (const auto& c : inv.cycles) {
            REQUIRE(validate_cycle(c).ok());
            CHECK_FALSE(c.is_trivial());
            CHECK(c.points.front() == c.min_point());
            total += c.length();
            for (u64 x : c.points) CHECK(seen.insert(x).second);
            if (m > 3 && m % 3 != 0) CHECK(c.max_point() % 4 == 0);
        }
        CHECK(total == inv.point_count);
        for (std::size_t i = 1; i < inv.cycles.size(); ++i)
            CHECK(inv.cycles[i - 1].points[0] < inv.cycles[i].points[0]);
        if (m > 3 && m % 3 != 0) CHECK(inv.point_count < cycle_point_count_bound(m));
        if (m % 3 == 0) {
            CHECK(step(m / 3, m) == Step{m / 3, m});
            CHECK_FALSE(inv.empty());
        }
    }
}

TEST_CASE("validate_cycle examples and diagnostics") {
    CHECK(validate_cycle({3, {1}, {3}}).ok());
    CHECK(validate_cycle({7, {0}, {0}}).ok());
    CHECK(validate_cycle({3, {2}, {3}}).defect == CycleDefect::recurrence);
    CHECK(validate_cycle({3, {}, {}}).defect == CycleDefect::empty);
    CHECK(validate_cycle({3, {1}, {}}).defect == CycleDefect::shape);
    CHECK(validate_cycle({3, {1}, {4}}).defect == CycleDefect::digit);
    CHECK(validate_cycle({85, {7, 23, 27, 28, 7, 23, 27, 28}, {85, 85, 85, 0, 85, 85, 85, 0}}).defect ==
          CycleDefect::repeated);
    CHECK(validate_cycle({15, {5}, {15}}).ok());
    CHECK(validate_cycle({5, {2, 3}, {5, 6}}).defect == CycleDefect::digit);
    CHECK(std::string(to_string(CycleDefect::range)) == "range");
}

TEST_CASE("validation is invariant under rotation") {
    for (u64 m : {85ULL, 341ULL, 455ULL, 5461ULL, 28679ULL}) {
        for (const auto& c : find_cycles(m).cycles)
            for (std::size_t k = 0; k < c.length(); ++k) {
                CHECK(validate_cycle(rotated(c, k)).ok());
                CHECK(canonical(rotated(c, k)) == c);
            }
    }
    ExtremeCycle bad{85, {7, 23, 27, 29}, {85, 85, 85, 0}};
    for (std::size_t k = 0; k < 4; ++k) CHECK_FALSE(validate_cycle(rotated(bad, k)).ok());
}

TEST_CASE("scaling by an odd factor keeps a cycle valid") {
    for (u64 m : {3ULL, 85ULL}) {
        const auto c = find_cycles(m).cycles.front();
        for (u64 k : {3ULL, 5ULL, 7ULL, 9ULL}) {
            const auto s = scaled(c, k);
            CHECK(s.modulus == m * k);
            CHECK(validate_cycle(s).ok());
        }
    }
    CHECK_THROWS_AS(scaled(find_cycles(3).cycles.front(), 2), DomainError);
}

TEST_CASE("coset_cycle_test examples") {
    const auto c = coset_cycle_test(coset_of(85, 7));
    REQUIRE(c.has_value());
    CHECK(c->points == std::vector<u64>{7, 23, 27, 28});
    CHECK(c->digits == std::vector<u64>{85, 85, 85, 0});
    CHECK_FALSE(coset_cycle_test(group_of_4(85)).has_value());
    CHECK_FALSE(coset_cycle_test(group_of_4(5)).has_value());
    CHECK_THROWS_AS(coset_cycle_test(group_of_4(3)), DomainError);
}

TEST_CASE("low cosets with integral walks stay below m/3") {
    for (u64 m = 5; m <= 3001; m += 2) {
        if (m % 3 == 0) continue;
        const auto inv = find_cycles(m);
        std::set<std::vector<u64>> from_cosets;
        for (const auto& coset : unit_cosets(m)) {
            const auto c = coset_cycle_test(coset);
            if (!c) continue;
            CHECK(3 * coset.max_element() <= m);
            CHECK(validate_cycle(*c).ok());
            from_cosets.insert(c->points);
        }
        for (const auto& c : inv.cycles)
            if (std::gcd(c.points[0], m) == 1) CHECK(from_cosets.count(c.points) == 1);
    }
}

TEST_CASE("cycle_point_count_bound") {
    CHECK(cycle_point_count_bound(85) == 8);
    CHECK(cycle_point_count_bound(55) == 8);
    CHECK(cycle_point_count_bound(5) == 2);
    CHECK_THROWS_AS(cycle_point_count_bound(9), DomainError);
    CHECK_THROWS_AS(cycle_point_count_bound(3), DomainError);
}
