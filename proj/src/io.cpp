#include "bulkjl/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "bulkjl/errors.hpp"

namespace bulkjl::io {

namespace {

constexpr char kMagic[4] = {'B', 'J', 'L', 'D'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
T byteswap_if_big(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    }
    return v;
}

template <typename T>
void write_le(std::ofstream& out, T v) {
    v = byteswap_if_big(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in, const char* what) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw input_error(std::string("bjld: truncated payload reading ") + what);
    return byteswap_if_big(v);
}

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);
    Dataset ds;
    ds.source = "csv:" + path;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            double value = 0.0;
            try {
                std::size_t pos = 0;
                value = std::stod(cell, &pos);
                while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) {
                    ++pos;
                }
                if (pos != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw input_error("csv: malformed number '" + cell + "' at row " +
                                  std::to_string(row));
            }
            if (!std::isfinite(value)) {
                throw input_error("csv: non-finite entry at row " + std::to_string(row));
            }
            ds.points.push_back(value);
            ++col;
        }
        if (row == 0) {
            ds.d = col;
        } else if (col != ds.d) {
            throw input_error("csv: row " + std::to_string(row) + " has " + std::to_string(col) +
                              " columns, expected " + std::to_string(ds.d));
        }
        ++row;
    }
    ds.n = row;
    ds.validate();
    return ds;
}

Dataset load_bjld(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw input_error("bjld: malformed header (bad magic)");
    }
    const auto version = read_le<std::uint32_t>(in, "version");
    if (version != kVersion) {
        throw input_error("bjld: unsupported version " + std::to_string(version));
    }
    const auto n = read_le<std::uint64_t>(in, "N");
    const auto d = read_le<std::uint64_t>(in, "D");
    Dataset ds;
    ds.n = static_cast<std::size_t>(n);
    ds.d = static_cast<std::size_t>(d);
    ds.source = "bjld:" + path;
    ds.points.resize(ds.n * ds.d);
    for (double& value : ds.points) {
        const auto bits = read_le<std::uint64_t>(in, "payload");
        value = std::bit_cast<double>(bits);
        if (!std::isfinite(value)) throw input_error("bjld: non-finite entry in payload");
    }
    ds.validate();
    return ds;
}

}  // namespace

Format format_from_path(const std::string& path) {
    if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".bjld") == 0) return Format::bjld;
    return Format::csv;
}

Dataset load_dataset(const std::string& path, Format format) {
    return format == Format::bjld ? load_bjld(path) : load_csv(path);
}

Dataset load_dataset(const std::string& path) {
    return load_dataset(path, format_from_path(path));
}

void save_dataset(const Dataset& ds, const std::string& path, Format format) {
    ds.validate();
    if (format == Format::bjld) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw input_error("cannot open file for writing: " + path);
        out.write(kMagic, 4);
        write_le(out, kVersion);
        write_le(out, static_cast<std::uint64_t>(ds.n));
        write_le(out, static_cast<std::uint64_t>(ds.d));
        for (double value : ds.points) {
            write_le(out, std::bit_cast<std::uint64_t>(value));
        }
        if (!out) throw input_error("write failed: " + path);
    } else {
        std::ofstream out(path);
        if (!out) throw input_error("cannot open file for writing: " + path);
        out.precision(17);
        for (std::size_t i = 0; i < ds.n; ++i) {
            for (std::size_t j = 0; j < ds.d; ++j) {
                if (j != 0) out << ',';
                out << ds.points[i * ds.d + j];
            }
            out << '\n';
        }
        if (!out) throw input_error("write failed: " + path);
    }
}

void save_dataset(const Dataset& ds, const std::string& path) {
    save_dataset(ds, path, format_from_path(path));
}

void save_report(const nlohmann::json& report, const std::string& path) {
    nlohmann::json j = report;
    if (!j.contains("schema_version")) j["schema_version"] = 1;
    std::ofstream out(path);
    if (!out) throw input_error("cannot open file for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw input_error("write failed: " + path);
}

nlohmann::json load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("report: malformed JSON: ") + e.what());
    }
    return j;
}

}  // namespace bulkjl::io
