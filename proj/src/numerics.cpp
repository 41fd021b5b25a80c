#include "spectral/numerics.hpp"

#include <algorithm>
#include <bit>

namespace spectral {

int minimal_gram_depth(const SpectrumTruncation& s) {
    int depth = 1;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            const std::uint64_t d = s.elements[j] > s.elements[i] ? s.elements[j] - s.elements[i]
                                                                  : s.elements[i] - s.elements[j];
            const int twos = std::countr_zero(d);
            if (twos % 2 != 0)
                throw DomainError("difference " + std::to_string(d) + " has no exactly vanishing factor");
            depth = std::max(depth, twos / 2 + 1);
        }
    }
    return depth;
}

}  // namespace spectral
