#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <string>

#include "bulkjl/errors.hpp"
#include "bulkjl/harness.hpp"
#include "bulkjl/io.hpp"

using namespace bulkjl;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/bulkjl_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("csv loading: identity rows give the 2-point simplex") {
    TempFile f("simplex.csv");
    {
        std::ofstream out(f.path);
        out << "1,0\n0,1\n";
    }
    const auto ds = io::load_dataset(f.path, io::Format::csv);
    CHECK(ds.n == 2);
    CHECK(ds.d == 2);
    CHECK(ds.points == std::vector<double>{1, 0, 0, 1});
}

TEST_CASE("csv rejects malformed and non-finite input") {
    TempFile f("bad.csv");
    {
        std::ofstream out(f.path);
        out << "1,zzz\n";
    }
    CHECK_THROWS_AS((void)io::load_dataset(f.path, io::Format::csv), input_error);
    {
        std::ofstream out(f.path);
        out << "1,2\n3\n";
    }
    CHECK_THROWS_WITH_AS((void)io::load_dataset(f.path, io::Format::csv),
                         doctest::Contains("columns"), input_error);
    {
        std::ofstream out(f.path);
        out << "1,inf\n2,3\n";
    }
    CHECK_THROWS_AS((void)io::load_dataset(f.path, io::Format::csv), input_error);
}

TEST_CASE("bjld round trip is bit identical") {
    harness::SynthParams p;
    p.n = 23;
    p.d = 7;
    const auto ds = harness::synth(harness::SynthKind::iid_gaussian, p, 17);
    TempFile f("roundtrip.bjld");
    io::save_dataset(ds, f.path);
    const auto back = io::load_dataset(f.path);
    CHECK(back.n == ds.n);
    CHECK(back.d == ds.d);
    CHECK(back.points == ds.points);  // exact: doubles written raw little-endian
}

TEST_CASE("csv round trip reproduces every double exactly") {
    harness::SynthParams p;
    p.n = 9;
    p.d = 3;
    const auto ds = harness::synth(harness::SynthKind::iid_gaussian, p, 5);
    TempFile f("roundtrip.csv");
    io::save_dataset(ds, f.path, io::Format::csv);
    const auto back = io::load_dataset(f.path, io::Format::csv);
    // 17 significant digits round-trip doubles exactly.
    CHECK(back.points == ds.points);
}

TEST_CASE("bjld header validation") {
    TempFile f("corrupt.bjld");
    {
        std::ofstream out(f.path, std::ios::binary);
        out << "NOPE";
    }
    CHECK_THROWS_WITH_AS((void)io::load_dataset(f.path, io::Format::bjld),
                         doctest::Contains("magic"), input_error);

    // Valid header, truncated payload.
    harness::SynthParams p;
    p.n = 4;
    p.d = 4;
    const auto ds = harness::synth(harness::SynthKind::iid_gaussian, p, 2);
    io::save_dataset(ds, f.path, io::Format::bjld);
    {
        std::ifstream in(f.path, std::ios::binary);
        std::string content((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        std::ofstream out(f.path, std::ios::binary);
        out.write(content.data(), static_cast<long>(content.size() - 11));
    }
    CHECK_THROWS_WITH_AS((void)io::load_dataset(f.path, io::Format::bjld),
                         doctest::Contains("truncated"), input_error);
}

TEST_CASE("format detection by suffix") {
    CHECK(io::format_from_path("data.bjld") == io::Format::bjld);
    CHECK(io::format_from_path("data.csv") == io::Format::csv);
    CHECK(io::format_from_path("data") == io::Format::csv);
}

TEST_CASE("report save/load round trip with schema version") {
    TempFile f("report.json");
    const nlohmann::json report = {{"k", 12}, {"values", {1.0, 0.25, 3.5e-17}}};
    io::save_report(report, f.path);
    const auto back = io::load_report(f.path);
    CHECK(back["schema_version"] == 1);
    CHECK(back["k"] == 12);
    CHECK(back["values"][2] == 3.5e-17);
}

TEST_CASE("orderstats csv names the two index columns") {
    harness::ExperimentConfig cfg;
    cfg.kind = harness::SynthKind::simplex;
    cfg.d = 8;
    cfg.theorem = harness::ExperimentConfig::Theorem::simplex;
    cfg.eta = 0.25;
    cfg.trials = 1;
    const auto report = harness::run_experiment(cfg);
    TempFile f("orderstats.csv");
    report.write_orderstats_csv(f.path);
    std::ifstream in(f.path);
    std::string header;
    std::getline(in, header);
    CHECK(header.find("etaM_minus_1") != std::string::npos);
    CHECK(header.find("m_minus_etaM") != std::string::npos);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == report.per_batch.size());
}

TEST_CASE("error exit codes follow the convention") {
    CHECK(input_error("x").exit_code() == 2);
    CHECK(constraint_error("x").exit_code() == 3);
    CHECK(numeric_error("x", 1.5).exit_code() == 4);
    CHECK(numeric_error("x", 1.5).best_estimate() == 1.5);
}
