#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "treelab/cocycle.hpp"
#include "treelab/experiments.hpp"
#include "treelab/population.hpp"
#include "treelab/resolvent.hpp"
#include "treelab/stats.hpp"

namespace treelab {

// Round-trip decimal form (%.17g); NaN and infinities print as nan / inf.
std::string format_double(double x);

// Pools: CSV with header "re,im", or flat native doubles re0 im0 re1 im1 ...
std::string pool_csv(const GammaPool& pool);
std::vector<cplx> parse_pool_csv(const std::string& text);
void write_pool_binary(const std::filesystem::path& path, const GammaPool& pool);
std::vector<cplx> read_pool_binary(const std::filesystem::path& path);

// "vertex_id,re,im" with vertex ids depth:index in level order.
std::string exact_tree_csv(const ExactTreeResult& result);

std::string bands_csv(const BandSet& bands);
std::string bands_json(const BandSet& bands);

// Header abscissa,value,std_error followed by the sorted union of metadata
// keys; missing keys are left empty.
std::string curve_csv(std::span<const CurveRecord> records);

// {name, lhs, rhs, margin, passed, n, alpha, kappa}; NaN becomes null.
std::string report_json(const CheckReport& report);
std::string reports_json(std::span<const CheckReport> reports);

// Throws IoError if the file cannot be written completely.
void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

}  // namespace treelab
