#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bulkjl/dataset.hpp"
#include "bulkjl/matrix.hpp"
#include "bulkjl/walecki.hpp"

namespace bulkjl::batching {

/// One batch of difference-vector edges drawn from a single 1-regular
/// subgraph. The difference matrices are materialized on demand from the
/// dataset; the plan itself holds only edges and bookkeeping, which keeps
/// large plans cheap.
struct Batch {
    std::vector<walecki::Edge> edges;
    walecki::SubgraphKind source_kind;
    int source_cycle = -1;
    std::size_t subgraph_id = 0;
    int eta_m = 0;  // eta_effective * m() == eta_m == eta * M_requested exactly

    std::size_t m() const noexcept { return edges.size(); }
    double eta_effective() const noexcept {
        return static_cast<double>(eta_m) / static_cast<double>(m());
    }

    /// D x m matrix with columns x_u - x_v.
    DenseMatrix difference_matrix(const Dataset& data) const;
    /// Same with unit-normalized columns.
    DenseMatrix unit_matrix(const Dataset& data) const;
};

struct BatchPlan {
    std::vector<Batch> batches;
    std::vector<std::size_t> batches_per_subgraph;  // n per subgraph, decomposition order
    std::vector<double> zeta_effective;             // per subgraph; empty when zeta unset
    std::size_t m_requested = 0;                    // M
    int eta_m = 0;                                  // eta * M, exact integer
    double eta = 0.0;
    std::optional<double> zeta;

    std::size_t total_edges() const noexcept;
};

/// Validates that eta*M is a strictly positive integer (within 1e-9 of one);
/// throws input_error naming the nearest valid eta otherwise.
int validated_eta_m(double eta, std::size_t m_requested);

/// Partitions every subgraph's edges into floor(|W|/M) batches of size in
/// [M, 2M-1]; remainder edges are spread round-robin, one per batch.
/// Difference vectors are validated against duplicate points (zero vectors
/// are an input error listing the offending edges). Requires
/// M <= min subgraph size. When zeta is given, per-subgraph zeta_effective
/// satisfies zeta_eff * floor(|W|/M) = zeta * floor((N-1)/(4M)) exactly.
BatchPlan build_batches(const Dataset& data, const walecki::EdgeDecomposition& decomp,
                        std::size_t m_requested, double eta,
                        std::optional<double> zeta = std::nullopt);

/// Lexicographic enumerator over size-j subsets of {0,...,m-1}. Refuses at
/// construction when C(m,j) > 10^6.
class SubsetEnumerator {
public:
    SubsetEnumerator(std::size_t m, std::size_t j);

    /// Writes the next subset into `out`; false when exhausted.
    bool next(std::vector<std::size_t>& out);
    std::uint64_t count() const noexcept { return count_; }

    /// C(m, j) with saturation at 2^63.
    static std::uint64_t binomial(std::size_t m, std::size_t j) noexcept;

private:
    std::size_t m_;
    std::size_t j_;
    std::vector<std::size_t> state_;
    bool done_ = false;
    bool started_ = false;
    std::uint64_t count_ = 0;
};

/// Enumerator over the eta*M-sized column subsets of a batch.
SubsetEnumerator minibatch_enumerate(const Batch& batch, double eta);

}  // namespace bulkjl::batching
