#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "bulkjl/batching.hpp"
#include "bulkjl/bounds.hpp"
#include "bulkjl/dataset.hpp"
#include "bulkjl/projection.hpp"

namespace bulkjl::harness {

enum class SynthKind : std::uint8_t {
    simplex,
    iid_gaussian,
    iid_rademacher,
    iid_cauchy,
    low_rank_plus_noise,
    cluster_smallball,
};

SynthKind synth_kind_from_name(const std::string& name);
const char* synth_kind_name(SynthKind kind);

struct SynthParams {
    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t rank = 1;            // low_rank_plus_noise: strong directions
    double noise = 0.1;              // low_rank_plus_noise: residual scale
    double cluster_fraction = 0.1;   // cluster_smallball: mass near e1
    double cluster_norm = 0.01;      // cluster_smallball: small cluster radius
    double cluster_jitter = 0.05;    // cluster_smallball: angular spread
};

/// Deterministic synthetic datasets; entry (i, j) is indexed on the counter
/// stream of `seed`. simplex ignores params.n and returns the D basis
/// vectors.
Dataset synth(SynthKind kind, const SynthParams& params, std::uint64_t seed);

/// Per-batch order-statistic record in the squared form: values are
/// ||Z y_hat||^2 / k, compared against [1 - eps_minus, 1 + eps_plus].
struct BatchRecord {
    std::size_t batch_id = 0;
    std::size_t m = 0;
    int eta_m = 0;
    std::size_t count_within = 0;
    std::size_t above_count = 0;
    std::size_t below_count = 0;
    bool upper_violation = false;  // sorted[(1-eta~)m] > 1 + eps_plus
    bool lower_violation = false;  // sorted[eta M - 1] < 1 - eps_minus
    double orderstat_lower = 0.0;  // value at index eta M - 1
    double orderstat_upper = 0.0;  // value at index m - eta M
};

BatchRecord measure_batch(const projection::ProjectionMatrix& z, const batching::Batch& batch,
                          const Dataset& data, const bounds::EpsilonSplit& split);

struct ExperimentConfig {
    std::optional<std::string> data_path;  // loaded dataset; else synthetic
    SynthKind kind = SynthKind::iid_gaussian;
    SynthParams params;

    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t m = 0;  // batch size M; 0 picks the smallest subgraph size
    double eta = 0.1;
    double zeta = 0.0;
    double eps = 0.5;
    double delta = 0.05;

    enum class Theorem : std::uint8_t {
        free_decomp,
        unit_decomp,
        simplex,
        subgaussian_iid,
        unit_sphere,
        iid_coords,
    };
    Theorem theorem = Theorem::simplex;

    projection::EntryDist dist = projection::EntryDist::gaussian;
    std::size_t trials = 10;
    std::uint64_t master_seed = 0;
    int threads = 1;

    double alpha = 2.0;    // unit_sphere / subgaussian_iid
    double t = 0.5;        // subgaussian_iid
    double psi2_xi = 1.0;  // subgaussian_iid: ||xi_1||_psi2
    std::optional<double> r_hat;       // unit_sphere: estimated when unset
    std::optional<double> r_override;  // free/unit: stable-rank parameter
    std::optional<int> k_override;

    static ExperimentConfig from_json(const nlohmann::json& j);
};

struct DistortionReport {
    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t m_requested = 0;
    int k_used = 0;
    double gamma = 1.0;
    double eta = 0.0;
    double eta_effective = 0.0;
    double zeta = 0.0;
    double zeta_effective = 0.0;
    double eps = 0.0;
    double delta = 0.0;
    double threshold = 0.0;  // (1 - 2 eta)(1 - zeta)

    std::vector<BatchRecord> per_batch;  // first trial
    std::vector<double> trial_fractions;
    double global_fraction = 0.0;  // first trial
    double mean_fraction = 0.0;
    double failure_rate = 0.0;
    std::size_t failures = 0;
    std::size_t trials = 0;

    std::vector<std::tuple<std::string, double, double>> bound_comparisons;  // name, theory, empirical
    std::vector<bounds::Constraint> constraints;
    std::vector<std::pair<std::string, double>> constants_used;
    std::vector<std::string> notes;

    nlohmann::json to_json() const;
    /// Per-batch order statistics as CSV; the header names the two order
    /// statistic indices (etaM-1 and (1-eta)M).
    void write_orderstats_csv(const std::string& path) const;
};

DistortionReport run_experiment(const ExperimentConfig& cfg);

struct TailRates {
    double upper_rate = 0.0;
    double lower_rate = 0.0;
    std::size_t upper_count = 0;
    std::size_t lower_count = 0;
    std::size_t trials = 0;
    std::array<double, 2> upper_wilson{0.0, 0.0};  // 5-sigma score interval
    std::array<double, 2> lower_wilson{0.0, 0.0};
};

/// Frequency of ||Z A||_F^2 escaping (1 +- eps) k ||A||_F^2 over fresh
/// draws of Z. Requires trials >= 10^4 so the Wilson intervals mean
/// something.
TailRates empirical_tail(const DenseMatrix& a, int k, double eps, std::size_t trials,
                         std::uint64_t seed, projection::EntryDist dist);

/// Wilson score interval for a binomial proportion at z standard errors.
std::array<double, 2> wilson_interval(std::size_t successes, std::size_t trials, double z);

}  // namespace bulkjl::harness
