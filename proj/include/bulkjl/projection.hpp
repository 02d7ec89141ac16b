#pragma once

#include <cstdint>
#include <string>

#include "bulkjl/matrix.hpp"

namespace bulkjl::projection {

/// Entry laws for the projection matrix; all have mean 0 and variance 1.
enum class EntryDist : std::uint8_t {
    gaussian,       // N(0,1), Box-Muller on the counter stream
    rademacher,     // +-1 with equal probability
    uniform_sqrt3,  // uniform on [-sqrt(3), sqrt(3)]
};

EntryDist entry_dist_from_name(const std::string& name);
const char* entry_dist_name(EntryDist dist);

/// Documented sub-gaussian (psi_2) norm per entry law; enters the bounds as
/// an opaque parameter K. Gaussian: sqrt(8/3) (exact); rademacher:
/// 1/sqrt(ln 2) (exact); uniform_sqrt3: sqrt(3/ln 2) (bounded-support
/// upper bound).
double psi2_bound(EntryDist dist);

struct ProjectionSpec {
    std::size_t k = 0;
    std::size_t d = 0;
    EntryDist dist = EntryDist::gaussian;
    std::uint64_t seed = 0;
};

struct ProjectionMatrix {
    ProjectionSpec spec;
    DenseMatrix matrix;  // k x D, row-major
};

/// Draws the k x D matrix. Entry (r, c) is indexed by r*D + c on the
/// counter stream, so the result does not depend on generation order.
ProjectionMatrix generate(const ProjectionSpec& spec);

/// sqrt(gamma/k) * Z * Y for a D x m matrix Y of column vectors.
DenseMatrix apply_scaled(const ProjectionMatrix& z, const DenseMatrix& y, double gamma);

}  // namespace bulkjl::projection
