#include "bulkjl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "bulkjl/errors.hpp"
#include "bulkjl/estimation.hpp"
#include "bulkjl/io.hpp"
#include "bulkjl/kernels.hpp"
#include "bulkjl/rng.hpp"
#include "bulkjl/walecki.hpp"

namespace bulkjl::harness {

namespace {

// Purpose tags mixed into the master seed so the dataset, the estimation
// sample and the per-trial projections draw from disjoint streams.
constexpr std::uint64_t kSeedData = 0x0DA7A;
constexpr std::uint64_t kSeedEstimate = 0xE577;
constexpr std::uint64_t kSeedTrialBase = 0x7121A15;

double pair_count(std::size_t n) {
    return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
}

}  // namespace

SynthKind synth_kind_from_name(const std::string& name) {
    if (name == "simplex") return SynthKind::simplex;
    if (name == "iid_gaussian") return SynthKind::iid_gaussian;
    if (name == "iid_rademacher") return SynthKind::iid_rademacher;
    if (name == "iid_cauchy") return SynthKind::iid_cauchy;
    if (name == "low_rank_plus_noise") return SynthKind::low_rank_plus_noise;
    if (name == "cluster_smallball") return SynthKind::cluster_smallball;
    throw input_error("unknown synthetic dataset kind: " + name);
}

const char* synth_kind_name(SynthKind kind) {
    switch (kind) {
        case SynthKind::simplex: return "simplex";
        case SynthKind::iid_gaussian: return "iid_gaussian";
        case SynthKind::iid_rademacher: return "iid_rademacher";
        case SynthKind::iid_cauchy: return "iid_cauchy";
        case SynthKind::low_rank_plus_noise: return "low_rank_plus_noise";
        case SynthKind::cluster_smallball: return "cluster_smallball";
    }
    return "?";
}

Dataset synth(SynthKind kind, const SynthParams& params, std::uint64_t seed) {
    Dataset ds;
    ds.d = params.d;
    if (ds.d < 1) throw input_error("synth: need d >= 1");

    std::ostringstream src;
    src << "synth:" << synth_kind_name(kind) << ":seed=" << seed;
    const rng::Philox gen(seed);

    switch (kind) {
        case SynthKind::simplex: {
            ds.n = ds.d;
            ds.points.assign(ds.n * ds.d, 0.0);
            for (std::size_t i = 0; i < ds.n; ++i) ds.points[i * ds.d + i] = 1.0;
            break;
        }
        case SynthKind::iid_gaussian:
        case SynthKind::iid_rademacher:
        case SynthKind::iid_cauchy: {
            ds.n = params.n;
            if (ds.n < 2) throw input_error("synth: need n >= 2");
            ds.points.resize(ds.n * ds.d);
            for (std::size_t i = 0; i < ds.points.size(); ++i) {
                switch (kind) {
                    case SynthKind::iid_gaussian: ds.points[i] = gen.gaussian_at(i); break;
                    case SynthKind::iid_rademacher: ds.points[i] = gen.rademacher_at(i); break;
                    default: ds.points[i] = gen.cauchy_at(i); break;
                }
            }
            break;
        }
        case SynthKind::low_rank_plus_noise: {
            ds.n = params.n;
            if (ds.n < 2) throw input_error("synth: need n >= 2");
            const std::size_t rank = std::min(params.rank, ds.d);
            ds.points.resize(ds.n * ds.d);
            for (std::size_t i = 0; i < ds.n; ++i) {
                for (std::size_t j = 0; j < ds.d; ++j) {
                    const double g = gen.gaussian_at(i * ds.d + j);
                    ds.points[i * ds.d + j] = (j < rank) ? g : params.noise * g;
                }
            }
            break;
        }
        case SynthKind::cluster_smallball: {
            ds.n = params.n;
            if (ds.n < 2) throw input_error("synth: need n >= 2");
            ds.points.resize(ds.n * ds.d);
            const std::size_t n_cluster =
                static_cast<std::size_t>(std::llround(params.cluster_fraction * ds.n));
            for (std::size_t i = 0; i < ds.n; ++i) {
                double* p = ds.points.data() + i * ds.d;
                for (std::size_t j = 0; j < ds.d; ++j) p[j] = gen.gaussian_at(i * ds.d + j);
                if (i < n_cluster) {
                    // Small-norm points near the e1 direction.
                    for (std::size_t j = 0; j < ds.d; ++j) p[j] *= params.cluster_jitter;
                    p[0] += 1.0;
                }
                const double norm = std::sqrt(kernels::sum_sq(p, ds.d));
                const double target = (i < n_cluster) ? params.cluster_norm : 1.0;
                if (norm == 0.0) {
                    p[0] = target;
                } else {
                    kernels::scale(target / norm, p, ds.d);
                }
            }
            break;
        }
    }
    ds.source = src.str();
    ds.validate();
    return ds;
}

namespace {

BatchRecord record_from_values(std::vector<double>& values, std::size_t batch_id, int eta_m,
                               const bounds::EpsilonSplit& split) {
    BatchRecord rec;
    rec.batch_id = batch_id;
    rec.m = values.size();
    rec.eta_m = eta_m;

    const double lo = 1.0 - split.eps_minus;
    const double hi = 1.0 + split.eps_plus;
    for (double v : values) {
        if (v > hi) {
            ++rec.above_count;
        } else if (v < lo) {
            ++rec.below_count;
        }
    }
    rec.count_within = rec.m - rec.above_count - rec.below_count;

    std::sort(values.begin(), values.end());
    const std::size_t lower_idx = static_cast<std::size_t>(eta_m - 1);
    const std::size_t upper_idx = rec.m - static_cast<std::size_t>(eta_m);
    rec.orderstat_lower = values[lower_idx];
    rec.orderstat_upper = values[upper_idx];
    rec.lower_violation = rec.orderstat_lower < lo;
    rec.upper_violation = rec.orderstat_upper > hi;
    return rec;
}

}  // namespace

BatchRecord measure_batch(const projection::ProjectionMatrix& z, const batching::Batch& batch,
                          const Dataset& data, const bounds::EpsilonSplit& split) {
    const DenseMatrix unit = batch.unit_matrix(data);
    if (unit.rows() != z.spec.d) throw input_error("measure_batch: dimension mismatch");
    const DenseMatrix projected = matmul(z.matrix, unit);

    // ||Z y_hat||^2 / k per column; accumulate row-by-row so the row-major
    // layout streams.
    std::vector<double> values(unit.cols(), 0.0);
    for (std::size_t i = 0; i < projected.rows(); ++i) {
        const double* row = projected.row(i);
        for (std::size_t c = 0; c < values.size(); ++c) values[c] += row[c] * row[c];
    }
    const double inv_k = 1.0 / static_cast<double>(z.spec.k);
    for (double& v : values) v *= inv_k;

    return record_from_values(values, 0, batch.eta_m, split);
}

namespace {

struct TrialOutcome {
    double fraction = 0.0;
    std::size_t upper_violations = 0;
    std::size_t lower_violations = 0;
    std::vector<BatchRecord> records;  // filled for trial 0 only
};

// Measurement through projected points: ||Z(x_u - x_v)||^2 / ||x_u - x_v||^2
// equals ||Z y_hat||^2 by linearity, at one GEMM per trial instead of one
// per batch.
TrialOutcome run_trial(const ExperimentConfig& cfg, const Dataset& data,
                       const batching::BatchPlan& plan,
                       const std::vector<std::vector<double>>& orig_sqdist, int k,
                       const bounds::EpsilonSplit& split, std::size_t trial, bool keep_records) {
    projection::ProjectionSpec spec;
    spec.k = static_cast<std::size_t>(k);
    spec.d = data.d;
    spec.dist = cfg.dist;
    spec.seed = rng::mix64(cfg.master_seed, kSeedTrialBase + trial);
    const projection::ProjectionMatrix z = projection::generate(spec);

    // P = X Z^T, one row of k projected coordinates per point.
    std::vector<double> projected(data.n * spec.k, 0.0);
    kernels::gemm_nt(data.points.data(), z.matrix.data(), projected.data(), data.n, data.d,
                     spec.k);

    TrialOutcome out;
    const double inv_k = 1.0 / static_cast<double>(k);
    std::size_t total_within = 0;
    std::vector<double> values;
    for (std::size_t b = 0; b < plan.batches.size(); ++b) {
        const auto& batch = plan.batches[b];
        values.resize(batch.m());
        for (std::size_t e = 0; e < batch.m(); ++e) {
            const auto& edge = batch.edges[e];
            const double* pu = projected.data() + edge.u * spec.k;
            const double* pv = projected.data() + edge.v * spec.k;
            values[e] = kernels::sqdist(pu, pv, spec.k) * inv_k / orig_sqdist[b][e];
        }
        BatchRecord rec = record_from_values(values, b, batch.eta_m, split);
        total_within += rec.count_within;
        out.upper_violations += rec.upper_violation ? 1 : 0;
        out.lower_violations += rec.lower_violation ? 1 : 0;
        if (keep_records) out.records.push_back(rec);
    }
    out.fraction = static_cast<double>(total_within) / pair_count(data.n);
    return out;
}

struct KSelection {
    int k = 0;
    double gamma = 1.0;
    std::vector<bounds::Constraint> constraints;
    std::vector<std::pair<std::string, double>> constants_used;
    std::vector<std::string> notes;
};

double min_unit_stable_rank(const batching::BatchPlan& plan, const Dataset& data) {
    double r_min = std::numeric_limits<double>::infinity();
    for (const auto& batch : plan.batches) {
        r_min = std::min(r_min, stable_ranks(batch.unit_matrix(data)).r_inf);
    }
    return r_min;
}

// Exact R_inf(eta M): minimum stable rank over all eta M-sized minibatches
// of all batches. Exponential in general; guarded for desk scale.
double min_minibatch_stable_rank(const batching::BatchPlan& plan, const Dataset& data) {
    double total_subsets = 0.0;
    for (const auto& batch : plan.batches) {
        total_subsets += static_cast<double>(batching::SubsetEnumerator::binomial(
            batch.m(), static_cast<std::size_t>(batch.eta_m)));
    }
    if (total_subsets > 20000.0) {
        throw constraint_error(
            "free-decomposition theorem: exact R_inf(eta M) enumeration too large (" +
            std::to_string(total_subsets) + " minibatches); pass r_override");
    }
    double r_min = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> idx;
    for (const auto& batch : plan.batches) {
        const DenseMatrix diff = batch.difference_matrix(data);
        batching::SubsetEnumerator subsets(batch.m(), static_cast<std::size_t>(batch.eta_m));
        while (subsets.next(idx)) {
            DenseMatrix sub(diff.rows(), idx.size());
            for (std::size_t c = 0; c < idx.size(); ++c) {
                for (std::size_t r = 0; r < diff.rows(); ++r) sub(r, c) = diff(r, idx[c]);
            }
            r_min = std::min(r_min, stable_ranks(sub).r_inf);
        }
    }
    return r_min;
}

double estimate_or_default_rhat(const ExperimentConfig& cfg, const Dataset& data,
                                KSelection& sel) {
    if (cfg.r_hat.has_value()) {
        sel.constants_used.emplace_back("r_hat", *cfg.r_hat);
        return *cfg.r_hat;
    }
    if (cfg.theorem == ExperimentConfig::Theorem::iid_coords) {
        // iid coordinates make sqrt(D) y_hat isotropic, so r_hat = D exactly.
        sel.constants_used.emplace_back("r_hat", static_cast<double>(data.d));
        sel.notes.push_back("r_hat = D (iid coordinates)");
        return static_cast<double>(data.d);
    }
    const std::size_t m_needed = estimation::rhat_sample_size(data.d, cfg.delta);
    if (!cfg.data_path.has_value()) {
        // Synthetic source: draw a dedicated estimation sample from the same
        // generator, the corollary's uniform-with-replacement reading.
        SynthParams params = cfg.params;
        params.n = 2 * m_needed + 1;
        params.d = data.d;
        const Dataset sample =
            synth(cfg.kind, params, rng::mix64(cfg.master_seed, kSeedEstimate));
        const auto est = estimation::estimate_rhat(sample, cfg.delta);
        sel.constants_used.emplace_back("r_hat", est.rhat_lower);
        sel.constants_used.emplace_back("r_hat_sample_m", static_cast<double>(est.m_used));
        sel.notes.push_back("r_hat estimated from a fresh synthetic sample of " +
                            std::to_string(2 * m_needed + 1) + " points");
        return est.rhat_lower;
    }
    const auto est = estimation::estimate_rhat(data, cfg.delta);
    sel.constants_used.emplace_back("r_hat", est.rhat_lower);
    sel.constants_used.emplace_back("r_hat_sample_m", static_cast<double>(est.m_used));
    return est.rhat_lower;
}

KSelection select_k(const ExperimentConfig& cfg, const Dataset& data,
                    const batching::BatchPlan& plan) {
    KSelection sel;
    bounds::DistParams dist;
    dist.gaussian_entries = (cfg.dist == projection::EntryDist::gaussian);
    dist.psi2 = projection::psi2_bound(cfg.dist);

    using Theorem = ExperimentConfig::Theorem;
    bounds::TargetDimResult result;
    switch (cfg.theorem) {
        case Theorem::simplex: {
            result = bounds::target_dim_simplex(data.d, cfg.eta, cfg.eps, cfg.delta, dist);
            break;
        }
        case Theorem::free_decomp: {
            const double r = cfg.r_override.has_value() ? *cfg.r_override
                                                        : min_minibatch_stable_rank(plan, data);
            sel.constants_used.emplace_back("R_inf", r);
            result = bounds::target_dim_free(data.n, plan.m_requested, cfg.eta, cfg.eps,
                                             cfg.delta, r, dist);
            break;
        }
        case Theorem::unit_decomp: {
            const double r = cfg.r_override.has_value() ? *cfg.r_override
                                                        : min_unit_stable_rank(plan, data);
            sel.constants_used.emplace_back("Rhat_inf", r);
            result = bounds::target_dim_unit(data.n, plan.m_requested, cfg.eta, cfg.eps,
                                             cfg.delta, r, dist);
            break;
        }
        case Theorem::subgaussian_iid: {
            result = bounds::target_dim_subgaussian_iid(data.n, data.d, cfg.eta, cfg.eps,
                                                        cfg.delta, cfg.alpha, cfg.t, cfg.psi2_xi,
                                                        dist);
            break;
        }
        case Theorem::unit_sphere:
        case Theorem::iid_coords: {
            const double r_hat = estimate_or_default_rhat(cfg, data, sel);
            try {
                result = bounds::target_dim_unit_sphere(data.n, data.d, cfg.eta, cfg.zeta,
                                                        cfg.eps, cfg.delta, cfg.alpha, r_hat,
                                                        dist);
                const double* m_formula = result.constant("M");
                if (m_formula != nullptr && *m_formula > static_cast<double>(plan.m_requested)) {
                    sel.notes.push_back("theorem batch size M = " + std::to_string(*m_formula) +
                                        " exceeds the configured M = " +
                                        std::to_string(plan.m_requested));
                }
            } catch (const constraint_error& e) {
                // The M-recipe has no solution at this scale (t' >= 1). Fall
                // back to the mechanism inside the theorem: a (1-zeta)
                // fraction of batches has stable rank at least
                // r_hat / (1 + 4/(3a) + sqrt(2/a)); run the unit-decomposition
                // bound with that rank at the configured batch size.
                const double quantile_rank =
                    r_hat / (1.0 + 4.0 / (3.0 * cfg.alpha) + std::sqrt(2.0 / cfg.alpha));
                result = bounds::target_dim_unit(data.n, plan.m_requested, cfg.eta, cfg.eps,
                                                 cfg.delta, quantile_rank, dist);
                result.constraints.push_back(
                    bounds::Constraint{"unit_sphere_t_prime_lt_1", false, 0.0});
                sel.constants_used.emplace_back("zeta_quantile_rank", quantile_rank);
                sel.notes.push_back(std::string("unit-sphere M-recipe infeasible (") + e.what() +
                                    "); used the zeta-quantile stable rank with the "
                                    "unit-decomposition bound at the configured M");
            }
            break;
        }
    }

    sel.k = cfg.k_override.value_or(result.k);
    if (cfg.k_override.has_value()) {
        sel.notes.push_back("k overridden by config; theorem value was " +
                            std::to_string(result.k));
    }
    sel.gamma = result.gamma;
    sel.constraints = result.constraints;
    for (const auto& c : result.constants_used) sel.constants_used.push_back(c);
    if (result.non_rigorous_constants) {
        sel.notes.push_back("target dimension uses non-rigorous default absolute constants");
    }
    for (const auto& a : result.adjustments) sel.notes.push_back(a);
    return sel;
}

}  // namespace

DistortionReport run_experiment(const ExperimentConfig& cfg) {
    // Materialize the dataset.
    Dataset data;
    if (cfg.data_path.has_value()) {
        data = io::load_dataset(*cfg.data_path);
    } else {
        SynthParams params = cfg.params;
        if (params.n == 0) params.n = cfg.n;
        if (params.d == 0) params.d = cfg.d;
        data = synth(cfg.kind, params, rng::mix64(cfg.master_seed, kSeedData));
    }
    if (cfg.n != 0 && cfg.n != data.n) {
        throw input_error("experiment: config N does not match dataset");
    }
    if (cfg.d != 0 && cfg.d != data.d) {
        throw input_error("experiment: config D does not match dataset");
    }
    if (cfg.trials < 1) throw input_error("experiment: trials must be >= 1");

    DistortionReport report;
    report.n = data.n;
    report.d = data.d;
    report.eta = cfg.eta;
    report.zeta = cfg.zeta;
    report.eps = cfg.eps;
    report.delta = cfg.delta;
    report.trials = cfg.trials;
    report.threshold = (1.0 - 2.0 * cfg.eta) * (1.0 - cfg.zeta);

    const walecki::EdgeDecomposition decomp = walecki::decompose(static_cast<std::uint32_t>(data.n));

    std::size_t m = cfg.m;
    if (m == 0) {
        m = std::numeric_limits<std::size_t>::max();
        for (const auto& sg : decomp.subgraphs) m = std::min(m, sg.edges.size());
        report.notes.push_back("M defaulted to the smallest subgraph size " + std::to_string(m));
    }
    report.m_requested = m;

    // Integrality repairs, rounding down: smaller eta / zeta only strengthen
    // the preserved fraction. The theorem formulas are evaluated at the
    // requested values.
    double eta_batch = cfg.eta;
    {
        const double product = cfg.eta * static_cast<double>(m);
        if (std::abs(product - std::round(product)) > 1e-9) {
            const double floored = std::floor(product);
            if (floored < 1.0) {
                throw constraint_error("experiment: eta*M < 1 at M = " + std::to_string(m));
            }
            eta_batch = floored / static_cast<double>(m);
            report.notes.push_back("eta adjusted " + std::to_string(cfg.eta) + " -> " +
                                   std::to_string(eta_batch) + " so eta*M is integral");
        }
    }
    std::optional<double> zeta_batch;
    double zeta_eff = 0.0;
    if (cfg.zeta > 0.0) {
        const double n_ref = std::floor(static_cast<double>(data.n - 1) / (4.0 * m));
        if (n_ref >= 1.0) {
            const double product = cfg.zeta * n_ref;
            double z = cfg.zeta;
            if (std::abs(product - std::round(product)) > 1e-9) {
                const double floored = std::max(std::floor(product), 1.0);
                z = floored / n_ref;
                report.notes.push_back("zeta adjusted " + std::to_string(cfg.zeta) + " -> " +
                                       std::to_string(z) +
                                       " so zeta*floor((N-1)/(4M)) is integral");
            }
            zeta_batch = z;
            zeta_eff = z;
        } else {
            report.notes.push_back("zeta bookkeeping skipped: floor((N-1)/(4M)) = 0");
        }
    }
    report.zeta_effective = zeta_eff;

    const batching::BatchPlan plan = batching::build_batches(data, decomp, m, eta_batch,
                                                             zeta_batch);
    report.eta_effective = eta_batch;

    const KSelection sel = select_k(cfg, data, plan);
    report.k_used = sel.k;
    report.gamma = sel.gamma;
    report.constraints = sel.constraints;
    report.constants_used = sel.constants_used;
    for (const auto& note : sel.notes) report.notes.push_back(note);

    const bounds::EpsilonSplit split =
        (cfg.dist == projection::EntryDist::gaussian)
            ? bounds::epsilon_split(cfg.eps, 8.0, 4.0)
            : bounds::epsilon_split(cfg.eps, 1.0, 1.0);

    // Original squared distances, once across trials.
    std::vector<std::vector<double>> orig_sqdist(plan.batches.size());
    for (std::size_t b = 0; b < plan.batches.size(); ++b) {
        const auto& batch = plan.batches[b];
        orig_sqdist[b].resize(batch.m());
        for (std::size_t e = 0; e < batch.m(); ++e) {
            const auto& edge = batch.edges[e];
            orig_sqdist[b][e] = kernels::sqdist(data.points.data() + edge.u * data.d,
                                                data.points.data() + edge.v * data.d, data.d);
        }
    }

    std::vector<TrialOutcome> outcomes(cfg.trials);
    const int n_threads = std::max(1, cfg.threads);
    if (n_threads == 1) {
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            outcomes[t] = run_trial(cfg, data, plan, orig_sqdist, sel.k, split, t, t == 0);
        }
    } else {
        std::vector<std::thread> workers;
        std::atomic<std::size_t> next{0};
        for (int w = 0; w < n_threads; ++w) {
            workers.emplace_back([&] {
                for (std::size_t t = next.fetch_add(1); t < cfg.trials; t = next.fetch_add(1)) {
                    outcomes[t] = run_trial(cfg, data, plan, orig_sqdist, sel.k, split, t, t == 0);
                }
            });
        }
        for (auto& w : workers) w.join();
    }

    report.per_batch = std::move(outcomes[0].records);
    report.trial_fractions.reserve(cfg.trials);
    std::size_t upper_violations = 0;
    std::size_t lower_violations = 0;
    for (const auto& outcome : outcomes) {
        report.trial_fractions.push_back(outcome.fraction);
        report.mean_fraction += outcome.fraction;
        if (outcome.fraction < report.threshold) ++report.failures;
        upper_violations += outcome.upper_violations;
        lower_violations += outcome.lower_violations;
    }
    report.mean_fraction /= static_cast<double>(cfg.trials);
    report.global_fraction = report.trial_fractions.front();
    report.failure_rate = static_cast<double>(report.failures) / static_cast<double>(cfg.trials);

    double delta_budget = cfg.delta;
    if (cfg.theorem == ExperimentConfig::Theorem::unit_sphere ||
        cfg.theorem == ExperimentConfig::Theorem::iid_coords) {
        delta_budget = 2.0 * cfg.delta;
    } else if (cfg.theorem == ExperimentConfig::Theorem::subgaussian_iid) {
        delta_budget = 3.0 * cfg.delta;
    }
    report.bound_comparisons.emplace_back("preserved_fraction", report.threshold,
                                          report.mean_fraction);
    report.bound_comparisons.emplace_back("failure_probability", delta_budget,
                                          report.failure_rate);

    // Desk-scale instances also get the batch-level order-statistic event
    // bound: p_+- <= C(m, etaM) exp(-(k eps_minus^2 / 4) eta~ r_inf(unit batch)).
    if (cfg.dist == projection::EntryDist::gaussian && data.n <= 128) {
        double worst = 0.0;
        for (const auto& batch : plan.batches) {
            const double r_inf = stable_ranks(batch.unit_matrix(data)).r_inf;
            const double log_count = std::lgamma(static_cast<double>(batch.m() + 1)) -
                                     std::lgamma(static_cast<double>(batch.eta_m + 1)) -
                                     std::lgamma(static_cast<double>(batch.m() - batch.eta_m + 1));
            const double rate = log_count - (sel.k * split.eps_minus * split.eps_minus / 4.0) *
                                                batch.eta_effective() * r_inf;
            worst = std::max(worst, std::exp(std::min(rate, 0.0)));
        }
        const double denom = static_cast<double>(plan.batches.size() * cfg.trials);
        report.bound_comparisons.emplace_back("p_plus_batch_bound", worst,
                                              static_cast<double>(upper_violations) / denom);
        report.bound_comparisons.emplace_back("p_minus_batch_bound", worst,
                                              static_cast<double>(lower_violations) / denom);
    }

    return report;
}

TailRates empirical_tail(const DenseMatrix& a, int k, double eps, std::size_t trials,
                         std::uint64_t seed, projection::EntryDist dist) {
    if (trials < 10000) throw input_error("empirical_tail: need trials >= 10^4");
    if (k < 1) throw input_error("empirical_tail: k must be >= 1");
    if (eps <= 0.0) throw input_error("empirical_tail: eps must be positive");
    if (a.empty() || !a.all_finite()) throw input_error("empirical_tail: bad matrix");

    const double frob_sq = a.frobenius_sq();
    const double upper = (1.0 + eps) * k * frob_sq;
    const double lower = (1.0 - eps) * k * frob_sq;

    TailRates rates;
    rates.trials = trials;
    std::vector<double> product(static_cast<std::size_t>(k) * a.cols());
    for (std::size_t t = 0; t < trials; ++t) {
        projection::ProjectionSpec spec;
        spec.k = static_cast<std::size_t>(k);
        spec.d = a.rows();
        spec.dist = dist;
        spec.seed = rng::mix64(seed, t);
        const projection::ProjectionMatrix z = projection::generate(spec);
        std::fill(product.begin(), product.end(), 0.0);
        kernels::gemm_nn(z.matrix.data(), a.data(), product.data(), spec.k, spec.d, a.cols());
        const double norm_sq = kernels::sum_sq(product.data(), product.size());
        if (norm_sq > upper) ++rates.upper_count;
        if (norm_sq < lower) ++rates.lower_count;
    }
    rates.upper_rate = static_cast<double>(rates.upper_count) / static_cast<double>(trials);
    rates.lower_rate = static_cast<double>(rates.lower_count) / static_cast<double>(trials);
    rates.upper_wilson = wilson_interval(rates.upper_count, trials, 5.0);
    rates.lower_wilson = wilson_interval(rates.lower_count, trials, 5.0);
    return rates;
}

std::array<double, 2> wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) throw input_error("wilson_interval: trials must be positive");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    if (j.contains("data")) {
        const auto& data = j.at("data");
        const std::string source = data.value("source", "synthetic");
        if (source == "file") {
            cfg.data_path = data.at("path").get<std::string>();
        } else if (source == "synthetic") {
            cfg.kind = synth_kind_from_name(data.value("kind", "iid_gaussian"));
            if (data.contains("params")) {
                const auto& p = data.at("params");
                cfg.params.n = p.value("n", cfg.params.n);
                cfg.params.d = p.value("d", cfg.params.d);
                cfg.params.rank = p.value("rank", cfg.params.rank);
                cfg.params.noise = p.value("noise", cfg.params.noise);
                cfg.params.cluster_fraction = p.value("cluster_fraction", cfg.params.cluster_fraction);
                cfg.params.cluster_norm = p.value("cluster_norm", cfg.params.cluster_norm);
                cfg.params.cluster_jitter = p.value("cluster_jitter", cfg.params.cluster_jitter);
            }
        } else {
            throw input_error("config: data.source must be 'synthetic' or 'file'");
        }
    }
    cfg.n = j.value("N", 0);
    cfg.d = j.value("D", 0);
    cfg.m = j.value("M", 0);
    cfg.eta = j.value("eta", cfg.eta);
    cfg.zeta = j.value("zeta", cfg.zeta);
    cfg.eps = j.value("eps", cfg.eps);
    cfg.delta = j.value("delta", cfg.delta);
    const std::string theorem = j.value("theorem", "simplex");
    if (theorem == "free") {
        cfg.theorem = Theorem::free_decomp;
    } else if (theorem == "unit") {
        cfg.theorem = Theorem::unit_decomp;
    } else if (theorem == "simplex") {
        cfg.theorem = Theorem::simplex;
    } else if (theorem == "subgaussian-iid") {
        cfg.theorem = Theorem::subgaussian_iid;
    } else if (theorem == "unit-sphere") {
        cfg.theorem = Theorem::unit_sphere;
    } else if (theorem == "iid-coords") {
        cfg.theorem = Theorem::iid_coords;
    } else {
        throw input_error("config: unknown theorem selector: " + theorem);
    }
    cfg.dist = projection::entry_dist_from_name(j.value("dist", "gaussian"));
    cfg.trials = j.value("trials", cfg.trials);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.t = j.value("t", cfg.t);
    cfg.psi2_xi = j.value("psi2_xi", cfg.psi2_xi);
    if (j.contains("r_hat")) cfg.r_hat = j.at("r_hat").get<double>();
    if (j.contains("r_override")) cfg.r_override = j.at("r_override").get<double>();
    if (j.contains("k_override")) cfg.k_override = j.at("k_override").get<int>();
    return cfg;
}

nlohmann::json DistortionReport::to_json() const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["N"] = n;
    j["D"] = d;
    j["M"] = m_requested;
    j["k_used"] = k_used;
    j["gamma"] = gamma;
    j["eta"] = eta;
    j["eta_effective"] = eta_effective;
    j["zeta"] = zeta;
    j["zeta_effective"] = zeta_effective;
    j["eps"] = eps;
    j["delta"] = delta;
    j["threshold"] = threshold;
    j["global_fraction"] = global_fraction;
    j["mean_fraction"] = mean_fraction;
    j["failure_rate"] = failure_rate;
    j["failures"] = failures;
    j["trials"] = trials;
    j["trial_fractions"] = trial_fractions;
    nlohmann::json batches = nlohmann::json::array();
    for (const auto& rec : per_batch) {
        batches.push_back({{"batch_id", rec.batch_id},
                           {"m", rec.m},
                           {"eta_m", rec.eta_m},
                           {"count_within", rec.count_within},
                           {"above_count", rec.above_count},
                           {"below_count", rec.below_count},
                           {"upper_violation", rec.upper_violation},
                           {"lower_violation", rec.lower_violation},
                           {"orderstat_lower", rec.orderstat_lower},
                           {"orderstat_upper", rec.orderstat_upper}});
    }
    j["per_batch"] = std::move(batches);
    nlohmann::json comparisons = nlohmann::json::array();
    for (const auto& [name, theory, empirical] : bound_comparisons) {
        comparisons.push_back({{"bound", name}, {"theoretical", theory}, {"empirical", empirical}});
    }
    j["bound_comparisons"] = std::move(comparisons);
    nlohmann::json cons = nlohmann::json::array();
    for (const auto& c : constraints) {
        cons.push_back({{"name", c.name}, {"satisfied", c.satisfied}, {"slack", c.slack}});
    }
    j["constraints"] = std::move(cons);
    nlohmann::json used = nlohmann::json::object();
    for (const auto& [name, value] : constants_used) used[name] = value;
    j["constants_used"] = std::move(used);
    j["notes"] = notes;
    return j;
}

void DistortionReport::write_orderstats_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open file for writing: " + path);
    out << "batch_id,m,eta_m,lower_index_etaM_minus_1,upper_index_m_minus_etaM,"
           "orderstat_lower,orderstat_upper,count_within,above_count,below_count\n";
    out.precision(17);
    for (const auto& rec : per_batch) {
        out << rec.batch_id << ',' << rec.m << ',' << rec.eta_m << ',' << (rec.eta_m - 1) << ','
            << (rec.m - static_cast<std::size_t>(rec.eta_m)) << ',' << rec.orderstat_lower << ','
            << rec.orderstat_upper << ',' << rec.count_within << ',' << rec.above_count << ','
            << rec.below_count << '\n';
    }
    if (!out) throw input_error("write failed: " + path);
}

}  // namespace bulkjl::harness
