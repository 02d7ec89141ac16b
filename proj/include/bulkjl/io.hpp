#pragma once

#include <string>

#include "json.hpp"

#include "bulkjl/dataset.hpp"

namespace bulkjl::io {

enum class Format { csv, bjld };

/// Picks bjld for a ".bjld" suffix, csv otherwise.
Format format_from_path(const std::string& path);

// CSV: one point per row, comma-separated decimal reals.
// BJLD: magic "BJLD", u32 version = 1, u64 N, u64 D, then N*D little-endian
// IEEE-754 doubles, row-major. Big-endian hosts byte-swap on load/save.
Dataset load_dataset(const std::string& path, Format format);
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& ds, const std::string& path, Format format);
void save_dataset(const Dataset& ds, const std::string& path);

/// Writes a report object as stable JSON; injects schema_version if absent.
void save_report(const nlohmann::json& report, const std::string& path);
nlohmann::json load_report(const std::string& path);

}  // namespace bulkjl::io
