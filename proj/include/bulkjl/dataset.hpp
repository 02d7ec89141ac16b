#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bulkjl {

/// N points in R^D, row-major, with a provenance note.
struct Dataset {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> points;  // n * d, row-major
    std::string source;

    std::span<const double> point(std::size_t i) const { return {points.data() + i * d, d}; }
    double* point_mut(std::size_t i) { return points.data() + i * d; }

    /// Validates N >= 2, D >= 1, finite entries, size consistency.
    void validate() const;
};

}  // namespace bulkjl
