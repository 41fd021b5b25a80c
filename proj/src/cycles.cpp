#include "spectral/cycles.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace spectral {

namespace {

enum Resolution : std::uint8_t {
    kUnvisited = 0,
    kOnPath,
    kInCycle,
    kLeadsToCycle,
    kDead,
};

// Flat array for moduli that fit comfortably in memory, hash map above.
constexpr u64 kFlatLimit = u64{1} << 26;

class FlatResolution {
public:
    explicit FlatResolution(u64 top) : state_(top + 1, kUnvisited) {}
    std::uint8_t get(u64 x) const { return state_[x]; }
    void set(u64 x, std::uint8_t r) { state_[x] = r; }

private:
    std::vector<std::uint8_t> state_;
};

class SparseResolution {
public:
    explicit SparseResolution(u64) {}
    std::uint8_t get(u64 x) const {
        auto it = state_.find(x);
        return it == state_.end() ? std::uint8_t{kUnvisited} : it->second;
    }
    void set(u64 x, std::uint8_t r) { state_[x] = r; }

private:
    std::unordered_map<u64, std::uint8_t> state_;
};

template <typename Map>
CycleInventory walk_all(u64 m) {
    CycleInventory inv;
    inv.modulus = m;
    const u64 top = m / 3;
    Map state(top);
    std::vector<u64> path;

    for (u64 start = 1; start <= top; ++start) {
        if (state.get(start) != kUnvisited) continue;
        path.clear();
        u64 x = start;
        std::uint8_t outcome = kDead;
        for (;;) {
            state.set(x, kOnPath);
            path.push_back(x);
            const auto s = step(x, m);
            if (!s) break;
            x = s->next;
            const std::uint8_t seen = state.get(x);
            if (seen == kUnvisited) continue;
            if (seen == kOnPath) {
                const auto first = std::find(path.rbegin(), path.rend(), x).base() - 1;
                ExtremeCycle c;
                c.modulus = m;
                for (auto it = first; it != path.end(); ++it) {
                    c.points.push_back(*it);
                    state.set(*it, kInCycle);
                }
                for (std::size_t i = 0; i < c.points.size(); ++i) {
                    const u64 next = c.points[(i + 1) % c.points.size()];
                    c.digits.push_back(4 * next - c.points[i]);
                }
                inv.point_count += c.points.size();
                inv.cycles.push_back(canonical(std::move(c)));
                outcome = kLeadsToCycle;
            } else {
                outcome = seen == kDead ? kDead : kLeadsToCycle;
            }
            break;
        }
        for (u64 p : path)
            if (state.get(p) == kOnPath) state.set(p, outcome);
    }
    std::sort(inv.cycles.begin(), inv.cycles.end(),
              [](const ExtremeCycle& a, const ExtremeCycle& b) { return a.points[0] < b.points[0]; });
    return inv;
}

u64 inverse_of_4(u64 m) {
    return m % 4 == 3 ? (m + 1) / 4 : static_cast<u64>((static_cast<u128>(m) * 3 + 1) / 4);
}

}  // namespace

u64 ExtremeCycle::min_point() const { return *std::min_element(points.begin(), points.end()); }
u64 ExtremeCycle::max_point() const { return *std::max_element(points.begin(), points.end()); }

ExtremeCycle canonical(ExtremeCycle c) {
    if (c.points.empty()) return c;
    const auto shift = std::min_element(c.points.begin(), c.points.end()) - c.points.begin();
    std::rotate(c.points.begin(), c.points.begin() + shift, c.points.end());
    if (c.digits.size() == c.points.size())
        std::rotate(c.digits.begin(), c.digits.begin() + shift, c.digits.end());
    return c;
}

ExtremeCycle scaled(const ExtremeCycle& c, u64 k) {
    if (k == 0 || k % 2 == 0) throw DomainError("scaled: factor must be odd");
    if (k > kMaxModulus / c.modulus) throw DomainError("scaled: modulus overflow");
    ExtremeCycle out;
    out.modulus = c.modulus * k;
    for (u64 x : c.points) out.points.push_back(x * k);
    for (u64 l : c.digits) out.digits.push_back(l * k);
    return out;
}

std::optional<Step> step(u64 x, u64 m) {
    if (x % 4 == 0) return Step{x / 4, 0};
    const u128 shifted = static_cast<u128>(x) + m;
    if (shifted % 4 == 0) return Step{static_cast<u64>(shifted / 4), m};
    return std::nullopt;
}

CycleInventory find_cycles(u64 m) {
    if (m == 0 || m % 2 == 0) throw DomainError("find_cycles: modulus must be odd, got " + std::to_string(m));
    if (m / 3 <= kFlatLimit) return walk_all<FlatResolution>(m);
    return walk_all<SparseResolution>(m);
}

CycleInventory interval_cycle_search(u64 m) {
    if (m == 0 || m % 2 == 0)
        throw DomainError("interval_cycle_search: modulus must be odd, got " + std::to_string(m));
    CycleInventory inv;
    inv.modulus = m;
    if (m == 1) return inv;

    unsigned depth = 0;
    u128 best = m;  // n = 0: ceil(m / 3) <= m
    for (unsigned n = 0; n <= 32 && (u128{1} << (2 * n)) <= u128{4} * m; ++n) {
        const u128 span = u128{3} << (2 * n);
        const u128 count = (u128{1} << n) * ((m + span - 1) / span);
        if (count < best) best = count, depth = n;
    }

    const u128 scale = u128{1} << (2 * depth);
    std::unordered_set<u64> found;
    std::vector<u64> orbit;
    for (u64 bits = 0; bits < (u64{1} << depth); ++bits) {
        u128 w = 0;
        for (unsigned k = 0; k < depth; ++k)
            if (bits >> k & 1) w |= u128{1} << (2 * k);
        const u64 lo = static_cast<u64>((m * w + scale - 1) / scale);
        const u64 hi = static_cast<u64>(m * (1 + 3 * w) / (3 * scale));
        for (u64 x = std::max<u64>(lo, 1); x <= hi; ++x) {
            if (found.count(x)) continue;
            orbit.assign(1, x);
            u64 y = x;
            bool closed = true;
            for (;;) {
                y = static_cast<u64>(static_cast<u128>(y) * 4 % m);
                if (y == x) break;
                if (static_cast<u128>(y) * 3 > m) {
                    closed = false;
                    break;
                }
                orbit.push_back(y);
            }
            if (!closed) continue;
            // orbit follows x -> 4x mod m, the reverse of the walk.
            ExtremeCycle c;
            c.modulus = m;
            c.points.assign(orbit.rbegin(), orbit.rend());
            for (std::size_t i = 0; i < c.points.size(); ++i)
                c.digits.push_back(4 * c.points[(i + 1) % c.points.size()] - c.points[i]);
            found.insert(orbit.begin(), orbit.end());
            inv.point_count += c.points.size();
            inv.cycles.push_back(canonical(std::move(c)));
        }
    }
    std::sort(inv.cycles.begin(), inv.cycles.end(),
              [](const ExtremeCycle& a, const ExtremeCycle& b) { return a.points[0] < b.points[0]; });
    return inv;
}

const char* to_string(CycleDefect d) {
    switch (d) {
        case CycleDefect::none: return "none";
        case CycleDefect::empty: return "empty";
        case CycleDefect::shape: return "shape";
        case CycleDefect::digit: return "digit";
        case CycleDefect::recurrence: return "recurrence";
        case CycleDefect::range: return "range";
        case CycleDefect::residue: return "residue";
        case CycleDefect::repeated: return "repeated";
    }
    return "unknown";
}

CycleCheck validate_cycle(const ExtremeCycle& c) {
    const auto fail = [](CycleDefect d, std::string detail) { return CycleCheck{d, std::move(detail)}; };
    const u64 m = c.modulus;
    const std::size_t r = c.points.size();
    if (r == 0) return fail(CycleDefect::empty, "cycle has no points");
    if (c.digits.size() != r)
        return fail(CycleDefect::shape, std::to_string(r) + " points but " +
                                            std::to_string(c.digits.size()) + " digits");
    for (std::size_t i = 0; i < r; ++i) {
        if (c.digits[i] != 0 && c.digits[i] != m)
            return fail(CycleDefect::digit, "digit " + std::to_string(i) + " = " +
                                                std::to_string(c.digits[i]) + " not in {0, m}");
    }
    for (std::size_t i = 0; i < r; ++i) {
        const u128 lhs = static_cast<u128>(c.points[(i + 1) % r]) * 4;
        const u128 rhs = static_cast<u128>(c.points[i]) + c.digits[i];
        if (lhs != rhs)
            return fail(CycleDefect::recurrence, "4*x[" + std::to_string((i + 1) % r) + "] != x[" +
                                                     std::to_string(i) + "] + l[" + std::to_string(i) + "]");
    }
    for (std::size_t i = 0; i < r; ++i) {
        if (static_cast<u128>(c.points[i]) * 3 > m)
            return fail(CycleDefect::range, "x[" + std::to_string(i) + "] = " +
                                                std::to_string(c.points[i]) + " exceeds m/3");
        const u64 x = c.points[i];
        if (x % 4 != 0 && (static_cast<u128>(x) + m) % 4 != 0)
            return fail(CycleDefect::residue, "x[" + std::to_string(i) + "] is neither 0 nor -m mod 4");
    }
    std::unordered_set<u64> seen;
    for (u64 x : c.points)
        if (!seen.insert(x).second) return fail(CycleDefect::repeated, "point " + std::to_string(x) + " repeats");
    return {};
}

std::optional<ExtremeCycle> coset_cycle_test(const Coset& c) {
    const u64 m = c.modulus;
    if (m <= 3 || m % 2 == 0) throw DomainError("coset_cycle_test: modulus must be odd and > 3");
    if (c.elements.empty()) return std::nullopt;
    if (static_cast<u128>(c.max_element()) * 2 >= m) return std::nullopt;

    const u64 inv4 = inverse_of_4(m);
    ExtremeCycle cycle;
    cycle.modulus = m;
    u64 x = c.representative;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const u64 next = mul_mod(x, inv4, m);
        const u128 four_next = static_cast<u128>(next) * 4;
        if (four_next < x) return std::nullopt;
        const u128 digit = four_next - x;
        if (digit != 0 && digit != m) return std::nullopt;
        cycle.points.push_back(x);
        cycle.digits.push_back(static_cast<u64>(digit));
        x = next;
    }
    if (x != c.representative) return std::nullopt;
    if (!validate_cycle(cycle)) return std::nullopt;
    return canonical(std::move(cycle));
}

u64 cycle_point_count_bound(u64 m) {
    if (m < 5 || m % 2 == 0) throw DomainError("cycle_point_count_bound: need odd m >= 5");
    if (m % 3 == 0) throw DomainError("cycle_point_count_bound: m must not be divisible by 3");
    u128 best = ~u128{0};
    u128 four_n = 1;
    u128 two_n = 1;
    for (;;) {
        const u128 denom = four_n * 3;
        const u128 value = two_n * ((m + denom - 1) / denom);
        best = std::min(best, value);
        if (four_n >= m) break;
        four_n *= 4;
        two_n *= 2;
    }
    return static_cast<u64>(best);
}

}  // namespace spectral
