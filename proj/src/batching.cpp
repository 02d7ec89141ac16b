#include "bulkjl/batching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bulkjl/errors.hpp"
#include "bulkjl/kernels.hpp"

namespace bulkjl::batching {

DenseMatrix Batch::difference_matrix(const Dataset& data) const {
    const std::size_t d = data.d;
    DenseMatrix out(d, edges.size());
    for (std::size_t c = 0; c < edges.size(); ++c) {
        const double* xu = data.points.data() + edges[c].u * d;
        const double* xv = data.points.data() + edges[c].v * d;
        for (std::size_t r = 0; r < d; ++r) out(r, c) = xu[r] - xv[r];
    }
    return out;
}

DenseMatrix Batch::unit_matrix(const Dataset& data) const {
    DenseMatrix out = difference_matrix(data);
    const std::size_t d = out.rows();
    for (std::size_t c = 0; c < out.cols(); ++c) {
        double norm_sq = 0.0;
        for (std::size_t r = 0; r < d; ++r) norm_sq += out(r, c) * out(r, c);
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (std::size_t r = 0; r < d; ++r) out(r, c) *= inv;
    }
    return out;
}

std::size_t BatchPlan::total_edges() const noexcept {
    std::size_t t = 0;
    for (const Batch& b : batches) t += b.m();
    return t;
}

int validated_eta_m(double eta, std::size_t m_requested) {
    const double product = eta * static_cast<double>(m_requested);
    const double rounded = std::round(product);
    if (rounded < 1.0 || std::abs(product - rounded) > 1e-9) {
        const double lower = std::max(1.0, std::floor(product));
        const double upper = std::max(1.0, std::ceil(product));
        std::ostringstream msg;
        msg << "eta*M = " << product << " must be a strictly positive integer; nearest valid eta: "
            << lower / static_cast<double>(m_requested);
        if (upper != lower) {
            msg << " or " << upper / static_cast<double>(m_requested);
        }
        throw input_error(msg.str());
    }
    return static_cast<int>(rounded);
}

BatchPlan build_batches(const Dataset& data, const walecki::EdgeDecomposition& decomp,
                        std::size_t m_requested, double eta, std::optional<double> zeta) {
    data.validate();
    if (data.n != decomp.n) {
        throw input_error("build_batches: dataset has " + std::to_string(data.n) +
                          " points but decomposition is over N = " + std::to_string(decomp.n));
    }
    if (m_requested < 1) throw input_error("build_batches: M must be >= 1");

    BatchPlan plan;
    plan.m_requested = m_requested;
    plan.eta = eta;
    plan.eta_m = validated_eta_m(eta, m_requested);
    plan.zeta = zeta;

    // Duplicate points make the unit normalization undefined.
    std::vector<walecki::Edge> zero_edges;
    for (const auto& sg : decomp.subgraphs) {
        for (const auto& e : sg.edges) {
            const double* xu = data.points.data() + e.u * data.d;
            const double* xv = data.points.data() + e.v * data.d;
            if (kernels::sqdist(xu, xv, data.d) == 0.0) zero_edges.push_back(e);
        }
    }
    if (!zero_edges.empty()) {
        std::ostringstream msg;
        msg << "build_batches: " << zero_edges.size()
            << " zero difference vector(s) from duplicate points; offending edges:";
        for (std::size_t i = 0; i < std::min<std::size_t>(zero_edges.size(), 16); ++i) {
            msg << " (" << zero_edges[i].u << "," << zero_edges[i].v << ")";
        }
        if (zero_edges.size() > 16) msg << " ...";
        throw input_error(msg.str());
    }

    std::size_t min_subgraph = std::numeric_limits<std::size_t>::max();
    for (const auto& sg : decomp.subgraphs) min_subgraph = std::min(min_subgraph, sg.edges.size());
    if (m_requested > min_subgraph) {
        throw input_error("build_batches: M = " + std::to_string(m_requested) +
                          " exceeds the smallest subgraph size " + std::to_string(min_subgraph));
    }

    // zeta_eff * floor(|W|/M) = zeta * floor((N-1)/(4M)) must be exact; the
    // right-hand side must itself be an integer.
    const std::size_t n_ref = (decomp.n - 1) / (4 * m_requested);
    double zeta_n = 0.0;
    if (zeta.has_value()) {
        zeta_n = *zeta * static_cast<double>(n_ref);
        if (std::abs(zeta_n - std::round(zeta_n)) > 1e-9 || std::round(zeta_n) < 1.0) {
            throw input_error("build_batches: zeta * floor((N-1)/(4M)) = " + std::to_string(zeta_n) +
                              " must be a strictly positive integer");
        }
        zeta_n = std::round(zeta_n);
    }

    for (std::size_t sg_id = 0; sg_id < decomp.subgraphs.size(); ++sg_id) {
        const auto& sg = decomp.subgraphs[sg_id];
        const std::size_t w = sg.edges.size();
        const std::size_t n_batches = w / m_requested;
        const std::size_t remainder = w % m_requested;

        // Base slices of size M, then the remainder round-robin, one edge
        // per batch per pass; sizes stay within [M, 2M-1].
        std::vector<Batch> local(n_batches);
        std::size_t pos = 0;
        for (std::size_t b = 0; b < n_batches; ++b) {
            local[b].source_kind = sg.kind;
            local[b].source_cycle = sg.cycle_index;
            local[b].subgraph_id = sg_id;
            local[b].eta_m = plan.eta_m;
            local[b].edges.assign(sg.edges.begin() + pos, sg.edges.begin() + pos + m_requested);
            pos += m_requested;
        }
        for (std::size_t r = 0; r < remainder; ++r) {
            local[r % n_batches].edges.push_back(sg.edges[pos + r]);
        }

        plan.batches_per_subgraph.push_back(n_batches);
        if (zeta.has_value()) {
            plan.zeta_effective.push_back(zeta_n / static_cast<double>(n_batches));
        }
        for (auto& b : local) plan.batches.push_back(std::move(b));
    }
    return plan;
}

std::uint64_t SubsetEnumerator::binomial(std::size_t m, std::size_t j) noexcept {
    if (j > m) return 0;
    j = std::min(j, m - j);
    constexpr std::uint64_t kCap = std::uint64_t{1} << 63;
    std::uint64_t result = 1;
    for (std::size_t i = 1; i <= j; ++i) {
        // result * (m - j + i) / i is always integral at this point.
        const std::uint64_t numer = m - j + i;
        if (result > kCap / numer) return kCap;
        result = result * numer / i;
    }
    return result;
}

SubsetEnumerator::SubsetEnumerator(std::size_t m, std::size_t j) : m_(m), j_(j) {
    if (j_ > m_) throw input_error("subset enumeration: subset size exceeds set size");
    count_ = binomial(m_, j_);
    if (count_ > 1000000) {
        throw input_error("subset enumeration refused: C(" + std::to_string(m_) + "," +
                          std::to_string(j_) + ") > 10^6");
    }
    state_.resize(j_);
    for (std::size_t i = 0; i < j_; ++i) state_[i] = i;
}

bool SubsetEnumerator::next(std::vector<std::size_t>& out) {
    if (done_) return false;
    if (!started_) {
        started_ = true;
        out = state_;
        if (j_ == 0) done_ = true;
        return true;
    }
    // Advance the lexicographically-least position that can move right.
    std::size_t i = j_;
    while (i > 0) {
        --i;
        if (state_[i] != i + m_ - j_) {
            ++state_[i];
            for (std::size_t l = i + 1; l < j_; ++l) state_[l] = state_[l - 1] + 1;
            out = state_;
            return true;
        }
    }
    done_ = true;
    return false;
}

SubsetEnumerator minibatch_enumerate(const Batch& batch, double eta) {
    if (eta <= 0.0 || eta > 1.0) throw input_error("minibatch_enumerate: eta must be in (0,1]");
    // The subset size is the exact integer eta*M carried by the batch; for
    // expanded batches this equals eta_tilde * m by construction.
    return SubsetEnumerator(batch.m(), static_cast<std::size_t>(batch.eta_m));
}

}  // namespace bulkjl::batching
