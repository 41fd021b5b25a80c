#pragma once

// Extreme cycles for the digit set {0, m}: finite orbits of the partial map
// x -> x/4 or (x+m)/4 that stay on the integers. These are exactly the
// integer points of the attractor of {x/4, (x+m)/4}, so an exhaustive walk
// over [1, m/3] finds all of them.

#include <optional>
#include <string>
#include <vector>

#include "spectral/modmath.hpp"

namespace spectral {

/// A cyclic orbit x_0 -> x_1 -> ... -> x_{r-1} -> x_0 with
/// 4 * x_{i+1} = x_i + digits[i] and every digit in {0, m}.
struct ExtremeCycle {
    u64 modulus = 1;
    std::vector<u64> points;
    std::vector<u64> digits;

    std::size_t length() const { return points.size(); }
    bool is_trivial() const { return points.size() == 1 && points[0] == 0; }
    u64 min_point() const;
    u64 max_point() const;

    friend bool operator==(const ExtremeCycle&, const ExtremeCycle&) = default;
};

/// Rotates so the smallest point comes first.
ExtremeCycle canonical(ExtremeCycle c);

/// The cycle k*C for the digits {0, k*m}. Requires k odd.
ExtremeCycle scaled(const ExtremeCycle& c, u64 k);

struct Step {
    u64 next = 0;
    u64 digit = 0;

    friend bool operator==(const Step&, const Step&) = default;
};

/// One move of the walk. Empty when neither x nor x + m is divisible by 4,
/// in which case x cannot lie on an extreme cycle.
std::optional<Step> step(u64 x, u64 m);

/// All non-trivial extreme cycles of one modulus, each in canonical form and
/// sorted by smallest point.
struct CycleInventory {
    u64 modulus = 1;
    std::vector<ExtremeCycle> cycles;
    std::size_t point_count = 0;

    bool empty() const { return cycles.empty(); }
};

/// Exhaustive walk from every start in [1, floor(m/3)] with a shared
/// resolution map, so every point is walked at most once. Uses no
/// number-theoretic shortcuts. Throws DomainError for even m.
CycleInventory find_cycles(u64 m);

/// The same inventory found from the other side. Every cycle point x
/// satisfies 4^j * x mod m <= m/3 for all j, so for any n it lies in one of
/// the 2^n intervals [m W / 4^n, m (1 + 3W) / (3 * 4^n)], W ranging over
/// base-4 numbers with n digits in {0, 1}. Only integers in those intervals
/// are tested, with n chosen to minimize their count; the work is
/// O(sqrt(m)) candidates instead of O(m) starts.
CycleInventory interval_cycle_search(u64 m);

enum class CycleDefect {
    none,
    empty,
    shape,       // digits and points differ in length
    digit,       // a digit outside {0, m}
    recurrence,  // 4 * x_{i+1} != x_i + l_i
    range,       // a point above m/3
    residue,     // a point with x != 0 and x != -m (mod 4)
    repeated,    // two equal points
};

struct CycleCheck {
    CycleDefect defect = CycleDefect::none;
    std::string detail;

    bool ok() const { return defect == CycleDefect::none; }
    explicit operator bool() const { return ok(); }
};

const char* to_string(CycleDefect d);

/// Checks every structural property of an extreme cycle; the diagnostics name
/// the first violation found. For integer points the unimodularity condition
/// |(1 + e^{4 pi i x}) / 2| = 1 holds automatically.
CycleCheck validate_cycle(const ExtremeCycle& c);

/// If every element of the coset is below m/2, orders it by the inverse-4
/// dynamics, reconstructs the digits and returns the resulting cycle provided
/// it validates. Empty otherwise. Requires m > 3.
std::optional<ExtremeCycle> coset_cycle_test(const Coset& c);

/// min over 0 <= n <= ceil(log4 m) of 2^n * ceil(m / (3 * 4^n)); strictly
/// exceeds the number of non-trivial cycle points. Requires m odd >= 5 and
/// 3 not dividing m.
u64 cycle_point_count_bound(u64 m);

}  // namespace spectral
