// Command-line front end: synth, decompose, target-dim, project,
// estimate-rhat, verify, tailcheck. Exit codes: 0 success, 2 input error,
// 3 constraint violation, 4 numeric error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "bulkjl/batching.hpp"
#include "bulkjl/bounds.hpp"
#include "bulkjl/errors.hpp"
#include "bulkjl/estimation.hpp"
#include "bulkjl/harness.hpp"
#include "bulkjl/io.hpp"
#include "bulkjl/kernels.hpp"
#include "bulkjl/projection.hpp"
#include "bulkjl/walecki.hpp"

namespace {

using nlohmann::json;

json target_dim_to_json(const bulkjl::bounds::TargetDimResult& r) {
    json j;
    j["schema_version"] = 1;
    j["k"] = r.k;
    j["k_real"] = r.k_real;
    j["gamma"] = r.gamma;
    j["non_rigorous_constants"] = r.non_rigorous_constants;
    json used = json::object();
    for (const auto& [name, value] : r.constants_used) used[name] = value;
    j["constants_used"] = std::move(used);
    json cons = json::array();
    for (const auto& c : r.constraints) {
        cons.push_back({{"name", c.name}, {"satisfied", c.satisfied}, {"slack", c.slack}});
    }
    j["constraints"] = std::move(cons);
    j["adjustments"] = r.adjustments;
    return j;
}

json decomposition_to_json(const bulkjl::walecki::EdgeDecomposition& d) {
    json j;
    j["schema_version"] = 1;
    j["N"] = d.n;
    j["odd_split_in_corollary_domain"] = d.odd_split_in_corollary_domain;
    json cycles = json::array();
    for (const auto& cycle : d.cycles) {
        json edges = json::array();
        for (const auto& e : cycle) edges.push_back({e.u, e.v});
        cycles.push_back(std::move(edges));
    }
    j["cycles"] = std::move(cycles);
    json subgraphs = json::array();
    for (const auto& sg : d.subgraphs) {
        json edges = json::array();
        for (const auto& e : sg.edges) edges.push_back({e.u, e.v});
        subgraphs.push_back({{"kind", bulkjl::walecki::subgraph_kind_name(sg.kind)},
                             {"cycle_index", sg.cycle_index},
                             {"edges", std::move(edges)}});
    }
    j["subgraphs"] = std::move(subgraphs);
    return j;
}

std::string decomposition_to_dot(const bulkjl::walecki::EdgeDecomposition& d) {
    std::ostringstream out;
    out << "graph K" << d.n << " {\n";
    for (const auto& sg : d.subgraphs) {
        out << "  // " << bulkjl::walecki::subgraph_kind_name(sg.kind);
        if (sg.cycle_index >= 0) out << " cycle " << sg.cycle_index;
        out << "\n";
        for (const auto& e : sg.edges) {
            out << "  v" << e.u << " -- v" << e.v << " [label=\""
                << bulkjl::walecki::subgraph_kind_name(sg.kind);
            if (sg.cycle_index >= 0) out << sg.cycle_index;
            out << "\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

json parse_params(const std::string& params) {
    try {
        if (!params.empty() && params[0] == '@') {
            return bulkjl::io::load_report(params.substr(1));
        }
        return json::parse(params);
    } catch (const json::exception& e) {
        throw bulkjl::input_error(std::string("--params: malformed JSON: ") + e.what());
    }
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        bulkjl::io::save_report(j, out_path);
    }
}

bulkjl::bounds::DistParams dist_params_from_json(const json& p) {
    bulkjl::bounds::DistParams dist;
    const std::string name = p.value("dist", "gaussian");
    if (name == "gaussian") {
        dist.gaussian_entries = true;
        dist.psi2 = bulkjl::projection::psi2_bound(bulkjl::projection::EntryDist::gaussian);
    } else {
        dist.gaussian_entries = false;
        dist.psi2 = bulkjl::projection::psi2_bound(bulkjl::projection::entry_dist_from_name(name));
    }
    if (p.contains("psi2")) {
        dist.gaussian_entries = false;
        dist.psi2 = p.at("psi2").get<double>();
    }
    dist.c_absolute = p.value("c_absolute", 1.0);
    dist.C_absolute = p.value("C_absolute", 1.0);
    return dist;
}

int run(int argc, char** argv) {
    CLI::App app{"bulk Johnson-Lindenstrauss toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    int threads = 1;
    bool json_output = false;
    app.add_option("--seed", seed, "master seed")->envname("BULKJL_SEED");
    app.add_option("--threads", threads, "worker threads")->envname("BULKJL_THREADS");
    app.add_flag("--json", json_output, "machine-readable output")->envname("BULKJL_JSON");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
    std::string synth_kind = "iid_gaussian";
    bulkjl::harness::SynthParams synth_params;
    std::string synth_out;
    synth_cmd->add_option("--kind", synth_kind,
                          "simplex|iid_gaussian|iid_rademacher|iid_cauchy|"
                          "low_rank_plus_noise|cluster_smallball");
    synth_cmd->add_option("--n", synth_params.n, "point count");
    synth_cmd->add_option("--d", synth_params.d, "ambient dimension")->required();
    synth_cmd->add_option("--rank", synth_params.rank, "low-rank directions");
    synth_cmd->add_option("--noise", synth_params.noise, "residual scale");
    synth_cmd->add_option("--cluster-fraction", synth_params.cluster_fraction);
    synth_cmd->add_option("--cluster-norm", synth_params.cluster_norm);
    synth_cmd->add_option("--cluster-jitter", synth_params.cluster_jitter);
    synth_cmd->add_option("--out", synth_out, "output path (.bjld or .csv)")->required();

    // decompose
    auto* decompose_cmd = app.add_subcommand("decompose", "Walecki decomposition of K_N");
    std::uint32_t decompose_n = 0;
    std::string decompose_format = "json";
    std::string decompose_out;
    decompose_cmd->add_option("--n", decompose_n, "vertex count")->required();
    decompose_cmd->add_option("--format", decompose_format, "json|dot");
    decompose_cmd->add_option("--out", decompose_out, "output path (default stdout)");

    // target-dim
    auto* target_cmd = app.add_subcommand("target-dim", "evaluate a target-dimension formula");
    std::string target_theorem;
    std::string target_params = "{}";
    std::string target_out;
    target_cmd
        ->add_option("--theorem", target_theorem,
                     "free|unit|simplex|subgaussian-iid|unit-sphere|iid-coords")
        ->required();
    target_cmd->add_option("--params", target_params, "JSON parameters (inline or @file)");
    target_cmd->add_option("--out", target_out, "output path (default stdout)");

    // project
    auto* project_cmd = app.add_subcommand("project", "apply a random projection to a dataset");
    std::string project_in;
    std::string project_out;
    std::size_t project_k = 0;
    std::string project_dist = "gaussian";
    double project_eps = 0.0;
    project_cmd->add_option("--input", project_in, "dataset path")->required();
    project_cmd->add_option("--k", project_k, "target dimension")->required();
    project_cmd->add_option("--dist", project_dist, "gaussian|rademacher|uniform_sqrt3");
    project_cmd->add_option("--gamma-from-eps", project_eps,
                            "derive gamma(eps) from this tolerance (0: gamma = 1)");
    project_cmd->add_option("--out", project_out, "output path")->required();

    // estimate-rhat
    auto* rhat_cmd = app.add_subcommand("estimate-rhat", "estimate the intrinsic dimension r_hat");
    std::string rhat_in;
    double rhat_delta = 0.05;
    rhat_cmd->add_option("--input", rhat_in, "dataset path")->required();
    rhat_cmd->add_option("--delta", rhat_delta, "failure probability");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "run a distance-preservation experiment");
    std::string verify_config;
    std::string verify_out;
    std::string verify_csv;
    verify_cmd->add_option("--config", verify_config, "experiment config JSON")->required();
    verify_cmd->add_option("--out", verify_out, "report path (default stdout)");
    verify_cmd->add_option("--csv", verify_csv, "per-batch order statistics CSV");

    // tailcheck
    auto* tail_cmd = app.add_subcommand("tailcheck", "empirical Frobenius tail rates");
    std::string tail_spectrum;
    int tail_k = 0;
    double tail_eps = 0.5;
    std::size_t tail_trials = 100000;
    std::string tail_dist = "gaussian";
    tail_cmd->add_option("--spectrum", tail_spectrum, "comma-separated singular values")
        ->required();
    tail_cmd->add_option("--k", tail_k, "target dimension")->required();
    tail_cmd->add_option("--eps", tail_eps, "relative tolerance");
    tail_cmd->add_option("--trials", tail_trials, "Monte-Carlo trials (>= 10^4)");
    tail_cmd->add_option("--dist", tail_dist, "entry distribution");

    CLI11_PARSE(app, argc, argv);

    if (synth_cmd->parsed()) {
        const auto kind = bulkjl::harness::synth_kind_from_name(synth_kind);
        const bulkjl::Dataset ds = bulkjl::harness::synth(kind, synth_params, seed);
        bulkjl::io::save_dataset(ds, synth_out);
        if (json_output) {
            emit(json{{"n", ds.n}, {"d", ds.d}, {"source", ds.source}, {"path", synth_out}}, "");
        } else {
            std::cout << "wrote " << ds.n << " x " << ds.d << " dataset to " << synth_out << "\n";
        }
        return 0;
    }

    if (decompose_cmd->parsed()) {
        const auto decomp = bulkjl::walecki::decompose(decompose_n);
        std::string text;
        if (decompose_format == "json") {
            text = decomposition_to_json(decomp).dump(2) + "\n";
        } else if (decompose_format == "dot") {
            text = decomposition_to_dot(decomp);
        } else {
            throw bulkjl::input_error("--format must be json or dot");
        }
        if (decompose_out.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(decompose_out);
            if (!out) throw bulkjl::input_error("cannot open " + decompose_out);
            out << text;
        }
        return 0;
    }

    if (target_cmd->parsed()) {
        const json p = parse_params(target_params);
        const auto dist = dist_params_from_json(p);
        bulkjl::bounds::TargetDimResult result;
        if (target_theorem == "free") {
            result = bulkjl::bounds::target_dim_free(
                p.at("N").get<std::size_t>(), p.at("M").get<std::size_t>(),
                p.at("eta").get<double>(), p.at("eps").get<double>(), p.at("delta").get<double>(),
                p.at("R_inf").get<double>(), dist);
        } else if (target_theorem == "unit") {
            result = bulkjl::bounds::target_dim_unit(
                p.at("N").get<std::size_t>(), p.at("M").get<std::size_t>(),
                p.at("eta").get<double>(), p.at("eps").get<double>(), p.at("delta").get<double>(),
                p.at("R_hat_inf").get<double>(), dist);
        } else if (target_theorem == "simplex") {
            result = bulkjl::bounds::target_dim_simplex(
                p.at("D").get<std::size_t>(), p.at("eta").get<double>(), p.at("eps").get<double>(),
                p.at("delta").get<double>(), dist);
        } else if (target_theorem == "subgaussian-iid") {
            result = bulkjl::bounds::target_dim_subgaussian_iid(
                p.at("N").get<std::size_t>(), p.at("D").get<std::size_t>(),
                p.at("eta").get<double>(), p.at("eps").get<double>(), p.at("delta").get<double>(),
                p.value("alpha", 1.0), p.value("t", 0.5), p.at("psi2_xi").get<double>(), dist);
        } else if (target_theorem == "unit-sphere" || target_theorem == "iid-coords") {
            const auto d = p.at("D").get<std::size_t>();
            const double r_hat = (target_theorem == "iid-coords")
                                     ? static_cast<double>(d)
                                     : p.at("r_hat").get<double>();
            result = bulkjl::bounds::target_dim_unit_sphere(
                p.at("N").get<std::size_t>(), d, p.at("eta").get<double>(),
                p.at("zeta").get<double>(), p.at("eps").get<double>(),
                p.at("delta").get<double>(), p.value("alpha", 2.0), r_hat, dist);
        } else {
            throw bulkjl::input_error("unknown theorem: " + target_theorem);
        }
        emit(target_dim_to_json(result), target_out);
        return 0;
    }

    if (project_cmd->parsed()) {
        const bulkjl::Dataset ds = bulkjl::io::load_dataset(project_in);
        bulkjl::projection::ProjectionSpec spec;
        spec.k = project_k;
        spec.d = ds.d;
        spec.dist = bulkjl::projection::entry_dist_from_name(project_dist);
        spec.seed = seed;
        const auto z = bulkjl::projection::generate(spec);
        double gamma = 1.0;
        if (project_eps > 0.0) {
            gamma = (spec.dist == bulkjl::projection::EntryDist::gaussian)
                        ? bulkjl::bounds::gaussian_constants(project_eps).gamma_eps
                        : 1.0 + project_eps * project_eps;
        }
        // Points are rows; the projected dataset is sqrt(gamma/k) Z x per point.
        bulkjl::DenseMatrix x(ds.n, ds.d, ds.points);
        const bulkjl::DenseMatrix transposed_projection = matmul_nt(x, z.matrix);  // n x k
        bulkjl::Dataset out;
        out.n = ds.n;
        out.d = spec.k;
        out.points.assign(transposed_projection.data(),
                          transposed_projection.data() + ds.n * spec.k);
        const double factor = std::sqrt(gamma / static_cast<double>(spec.k));
        bulkjl::kernels::scale(factor, out.points.data(), out.points.size());
        out.source = ds.source + "|projected:k=" + std::to_string(spec.k) +
                     ",dist=" + project_dist + ",seed=" + std::to_string(seed) +
                     ",gamma=" + std::to_string(gamma);
        bulkjl::io::save_dataset(out, project_out);
        if (json_output) {
            emit(json{{"n", out.n}, {"k", out.d}, {"gamma", gamma}, {"path", project_out}}, "");
        } else {
            std::cout << "projected to k = " << out.d << " (gamma = " << gamma << "), wrote "
                      << project_out << "\n";
        }
        return 0;
    }

    if (rhat_cmd->parsed()) {
        const bulkjl::Dataset ds = bulkjl::io::load_dataset(rhat_in);
        const auto est = bulkjl::estimation::estimate_rhat(ds, rhat_delta);
        json j{{"schema_version", 1},
               {"rhat_lower", est.rhat_lower},
               {"m_used", est.m_used},
               {"zero_pairs_dropped", est.zero_pairs_dropped},
               {"sigma_m_norm", est.sigma_m_norm},
               {"delta", rhat_delta}};
        if (json_output) {
            emit(j, "");
        } else {
            std::cout << "r_hat >= " << est.rhat_lower << " (m = " << est.m_used << ", dropped "
                      << est.zero_pairs_dropped << " zero pairs)\n";
        }
        return 0;
    }

    if (verify_cmd->parsed()) {
        auto cfg = bulkjl::harness::ExperimentConfig::from_json(
            bulkjl::io::load_report(verify_config));
        if (seed != 0) cfg.master_seed = seed;
        if (threads > 1) cfg.threads = threads;
        const auto report = bulkjl::harness::run_experiment(cfg);
        emit(report.to_json(), verify_out);
        if (!verify_csv.empty()) report.write_orderstats_csv(verify_csv);
        return 0;
    }

    if (tail_cmd->parsed()) {
        std::vector<double> spectrum;
        std::stringstream ss(tail_spectrum);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                spectrum.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw bulkjl::input_error("--spectrum: malformed value '" + cell + "'");
            }
        }
        if (spectrum.empty()) throw bulkjl::input_error("--spectrum: no values");
        const auto a = bulkjl::DenseMatrix::diagonal(spectrum);
        const auto rates = bulkjl::harness::empirical_tail(
            a, tail_k, tail_eps, tail_trials, seed,
            bulkjl::projection::entry_dist_from_name(tail_dist));
        const auto ranks = bulkjl::stable_ranks(a);
        const double upper_bound = bulkjl::bounds::hw_tail_rate(
            ranks, tail_k, tail_eps, 1.0, bulkjl::bounds::TailVariant::gaussian_upper);
        const double lower_bound = bulkjl::bounds::hw_tail_rate(
            ranks, tail_k, tail_eps, 1.0, bulkjl::bounds::TailVariant::gaussian_lower);
        json j{{"schema_version", 1},
               {"k", tail_k},
               {"eps", tail_eps},
               {"trials", rates.trials},
               {"r_inf", ranks.r_inf},
               {"r_4", ranks.r_4},
               {"upper_rate", rates.upper_rate},
               {"lower_rate", rates.lower_rate},
               {"upper_wilson", rates.upper_wilson},
               {"lower_wilson", rates.lower_wilson},
               {"gaussian_upper_bound", upper_bound},
               {"gaussian_lower_bound", lower_bound}};
        emit(j, "");
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const bulkjl::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
