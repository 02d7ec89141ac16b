#include "bulkjl/dataset.hpp"

#include <cmath>

#include "bulkjl/errors.hpp"

namespace bulkjl {

void Dataset::validate() const {
    if (n < 2) throw input_error("dataset: need at least 2 points");
    if (d < 1) throw input_error("dataset: need dimension >= 1");
    if (points.size() != n * d) throw input_error("dataset: points size != N*D");
    for (double v : points) {
        if (!std::isfinite(v)) throw input_error("dataset: non-finite entry");
    }
}

}  // namespace bulkjl
