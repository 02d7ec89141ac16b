#include "bulkjl/projection.hpp"

#include <cmath>

#include "bulkjl/errors.hpp"
#include "bulkjl/kernels.hpp"
#include "bulkjl/rng.hpp"

namespace bulkjl::projection {

EntryDist entry_dist_from_name(const std::string& name) {
    if (name == "gaussian") return EntryDist::gaussian;
    if (name == "rademacher") return EntryDist::rademacher;
    if (name == "uniform_sqrt3" || name == "uniform") return EntryDist::uniform_sqrt3;
    throw input_error("unknown entry distribution: " + name);
}

const char* entry_dist_name(EntryDist dist) {
    switch (dist) {
        case EntryDist::gaussian: return "gaussian";
        case EntryDist::rademacher: return "rademacher";
        case EntryDist::uniform_sqrt3: return "uniform_sqrt3";
    }
    return "?";
}

double psi2_bound(EntryDist dist) {
    switch (dist) {
        case EntryDist::gaussian:
            return std::sqrt(8.0 / 3.0);  // E exp(g^2 (3/8)) = 2 exactly
        case EntryDist::rademacher:
            return 1.0 / std::sqrt(std::log(2.0));  // exp(1/K^2) = 2 exactly
        case EntryDist::uniform_sqrt3:
            return std::sqrt(3.0 / std::log(2.0));  // |u| <= sqrt(3) a.s.
    }
    return 0.0;
}

ProjectionMatrix generate(const ProjectionSpec& spec) {
    if (spec.k < 1 || spec.d < 1) throw input_error("generate: need k >= 1 and D >= 1");
    ProjectionMatrix out;
    out.spec = spec;
    out.matrix = DenseMatrix(spec.k, spec.d);
    double* data = out.matrix.data();
    const std::uint64_t total = static_cast<std::uint64_t>(spec.k) * spec.d;
    const rng::Philox gen(spec.seed);
    switch (spec.dist) {
        case EntryDist::gaussian:
            for (std::uint64_t i = 0; i < total; i += 2) {
                const auto pair = gen.gaussian_pair(i / 2);
                data[i] = pair[0];
                if (i + 1 < total) data[i + 1] = pair[1];
            }
            break;
        case EntryDist::rademacher:
            for (std::uint64_t i = 0; i < total; ++i) data[i] = gen.rademacher_at(i);
            break;
        case EntryDist::uniform_sqrt3:
            for (std::uint64_t i = 0; i < total; ++i) data[i] = gen.uniform_sqrt3_at(i);
            break;
    }
    return out;
}

DenseMatrix apply_scaled(const ProjectionMatrix& z, const DenseMatrix& y, double gamma) {
    if (gamma <= 0.0) throw input_error("apply_scaled: gamma must be positive");
    if (y.rows() != z.spec.d) {
        throw input_error("apply_scaled: Y has " + std::to_string(y.rows()) +
                          " rows, expected D = " + std::to_string(z.spec.d));
    }
    DenseMatrix out = matmul(z.matrix, y);
    const double factor = std::sqrt(gamma / static_cast<double>(z.spec.k));
    kernels::scale(factor, out.data(), z.spec.k * y.cols());
    return out;
}

}  // namespace bulkjl::projection
