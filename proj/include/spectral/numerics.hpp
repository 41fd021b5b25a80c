#pragma once

// Floating-point checks connecting the integer machinery to the measure.
//
// The quarter-Cantor measure mu satisfies
//     int f dmu = 1/2 (int f(x/4) dmu + int f((x+2)/4) dmu),
// and applying this to f = e^{2 pi i t x} repeatedly gives its Fourier
// transform as an infinite product
//     mu_hat(t) = prod_{k>=1} (1 + e^{2 pi i 2t / 4^k}) / 2.
// Each factor equals e^{pi i f} cos(pi f) with f = frac(2t / 4^k), so it
// vanishes exactly when f = 1/2. Phases are reduced mod 1 before any
// trigonometric call; 2t / 4^k is a power-of-two rescaling and frac() of a
// binary float is exact, so structural zeros stay exact.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "spectral/error.hpp"

namespace spectral {

inline constexpr int kDefaultDepth = 40;

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

// frac(2t / 4^k) in [0, 1).
template <typename Scalar>
Scalar factor_phase(Scalar t, int k) {
    const Scalar scaled = std::ldexp(t, 1 - 2 * k);
    return scaled - std::floor(scaled);
}

}  // namespace detail

/// The partial product prod_{k=1..depth} (1 + e^{2 pi i 2t/4^k}) / 2.
template <typename Scalar>
class TruncatedTransform {
public:
    explicit TruncatedTransform(int depth) : depth_(depth) {
        if (depth < 1) throw DomainError("TruncatedTransform: depth must be >= 1");
    }

    int depth() const { return depth_; }

    std::complex<Scalar> operator()(Scalar t) const {
        Scalar magnitude = 1;
        Scalar half_turns = 0;  // total argument in units of pi, kept in [0, 2)
        for (int k = 1; k <= depth_; ++k) {
            const Scalar f = detail::factor_phase(t, k);
            if (f == Scalar(0.5)) return {0, 0};
            magnitude *= std::cos(std::numbers::pi_v<Scalar> * f);
            half_turns += f;
            if (half_turns >= 2) half_turns -= 2;
        }
        if (half_turns == 0) return {magnitude, 0};
        const Scalar angle = std::numbers::pi_v<Scalar> * half_turns;
        return {magnitude * std::cos(angle), magnitude * std::sin(angle)};
    }

    /// |value| as the product of |cos(pi f_k)|; non-increasing in depth.
    Scalar magnitude(Scalar t) const {
        Scalar m = 1;
        for (int k = 1; k <= depth_; ++k) {
            const Scalar f = detail::factor_phase(t, k);
            if (f == Scalar(0.5)) return 0;
            m *= std::abs(std::cos(std::numbers::pi_v<Scalar> * f));
        }
        return m;
    }

private:
    int depth_;
};

template <typename Scalar>
std::complex<Scalar> mu_hat(Scalar t, int depth = kDefaultDepth) {
    return TruncatedTransform<Scalar>(depth)(t);
}

/// |(1 + e^{2 pi i 2x}) / 2| = |cos(2 pi x)|, with 2x reduced mod 1 first.
template <typename Scalar>
Scalar cycle_modulus(Scalar x) {
    const Scalar twice = 2 * x;
    const Scalar f = twice - std::floor(twice);
    if (f == 0) return 1;
    if (f == Scalar(0.5)) return 0;
    return std::abs(std::cos(std::numbers::pi_v<Scalar> * f));
}

/// The frequencies sum_{k < level} 4^k l_k with l_k in {0, m}, listed by the
/// binary index of the digit choice (ascending).
struct SpectrumTruncation {
    std::uint64_t m = 1;
    int level = 0;
    std::vector<std::uint64_t> elements;

    SpectrumTruncation(std::uint64_t modulus, int lvl) : m(modulus), level(lvl) {
        if (m == 0 || m % 2 == 0) throw DomainError("SpectrumTruncation: m must be odd");
        if (lvl < 0 || lvl > 24) throw DomainError("SpectrumTruncation: level must be in [0, 24]");
        const std::uint64_t count = std::uint64_t{1} << lvl;
        elements.reserve(count);
        for (std::uint64_t bits = 0; bits < count; ++bits) {
            std::uint64_t value = 0;
            for (int k = 0; k < lvl; ++k)
                if (bits >> k & 1) value += m << (2 * k);
            elements.push_back(value);
        }
    }

    std::size_t size() const { return elements.size(); }
};

/// Smallest depth at which every off-diagonal Gram entry has an exactly
/// vanishing factor. A nonzero difference d = 4^v * w with w odd vanishes at
/// factor k = v + 1. Throws DomainError when some difference has no vanishing
/// factor (w = 2 mod 4), which cannot happen for odd m.
int minimal_gram_depth(const SpectrumTruncation& s);

/// Entries mu_hat(lambda - gamma). Diagonal entries are exactly 1. Throws
/// DomainError when depth is below minimal_gram_depth(s).
template <typename Scalar = double>
ComplexMatrix<Scalar> gram_matrix(const SpectrumTruncation& s, int depth = kDefaultDepth) {
    if (depth < minimal_gram_depth(s))
        throw DomainError("gram_matrix: depth " + std::to_string(depth) + " below the vanishing depth " +
                          std::to_string(minimal_gram_depth(s)));
    const auto n = static_cast<Eigen::Index>(s.size());
    const TruncatedTransform<Scalar> transform(depth);
    ComplexMatrix<Scalar> g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const Scalar diff = static_cast<Scalar>(s.elements[i]) - static_cast<Scalar>(s.elements[j]);
            g(i, j) = transform(diff);
        }
    }
    return g;
}

/// Largest |entry| off the diagonal.
template <typename Derived>
typename Derived::RealScalar max_off_diagonal(const Eigen::MatrixBase<Derived>& g) {
    typename Derived::RealScalar worst = 0;
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j)
            if (i != j) worst = std::max(worst, std::abs(g(i, j)));
    return worst;
}

}  // namespace spectral
