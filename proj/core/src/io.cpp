#include "treelab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "treelab/error.hpp"

namespace treelab {

namespace {

nlohmann::ordered_json number_or_null(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

nlohmann::ordered_json report_object(const CheckReport& r) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["lhs"] = number_or_null(r.lhs);
    j["rhs"] = number_or_null(r.rhs);
    j["margin"] = number_or_null(r.margin);
    j["passed"] = r.passed;
    j["n"] = r.n;
    j["alpha"] = number_or_null(r.alpha);
    j["kappa"] = number_or_null(r.kappa);
    return j;
}

// Quotes a CSV field when needed.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string pool_csv(const GammaPool& pool) {
    std::string out = "re,im\n";
    for (const cplx& g : pool.samples) {
        out += format_double(g.real());
        out += ',';
        out += format_double(g.imag());
        out += '\n';
    }
    return out;
}

std::vector<cplx> parse_pool_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("re,im", 0) != 0) throw IoError("pool csv: missing re,im header");
    std::vector<cplx> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError("pool csv: line " + std::to_string(lineno) + " has one column");
        try {
            out.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw IoError("pool csv: bad number on line " + std::to_string(lineno));
        }
    }
    return out;
}

void write_pool_binary(const std::filesystem::path& path, const GammaPool& pool) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(pool.samples.data()),
            static_cast<std::streamsize>(pool.samples.size() * sizeof(cplx)));
    if (!f) throw IoError("short write to " + path.string());
}

std::vector<cplx> read_pool_binary(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary | std::ios::ate);
    if (!f) throw IoError("cannot open " + path.string());
    const auto bytes = static_cast<std::size_t>(f.tellg());
    if (bytes % sizeof(cplx) != 0) throw IoError(path.string() + ": size is not a multiple of 16 bytes");
    std::vector<cplx> out(bytes / sizeof(cplx));
    f.seekg(0);
    f.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(bytes));
    if (!f) throw IoError("short read from " + path.string());
    return out;
}

std::string exact_tree_csv(const ExactTreeResult& result) {
    std::string out = "vertex_id,re,im\n";
    for (int d = 0; d <= result.depth(); ++d) {
        const auto level = result.level(d);
        for (std::size_t i = 0; i < level.size(); ++i) {
            out += std::to_string(d) + ":" + std::to_string(i) + ",";
            out += format_double(level[i].real()) + "," + format_double(level[i].imag()) + "\n";
        }
    }
    return out;
}

std::string bands_csv(const BandSet& bands) {
    std::string out = "lo,hi\n";
    for (const auto& iv : bands.intervals) out += format_double(iv.lo) + "," + format_double(iv.hi) + "\n";
    return out;
}

std::string bands_json(const BandSet& bands) {
    nlohmann::ordered_json j;
    j["intervals"] = nlohmann::ordered_json::array();
    for (const auto& iv : bands.intervals) j["intervals"].push_back({{"lo", iv.lo}, {"hi", iv.hi}});
    j["grid_too_coarse"] = bands.grid_too_coarse;
    j["warnings"] = bands.warnings;
    return j.dump(2) + "\n";
}

std::string curve_csv(std::span<const CurveRecord> records) {
    std::set<std::string> keys;
    for (const auto& r : records) {
        for (const auto& [k, v] : r.metadata) keys.insert(k);
    }
    std::string out = "abscissa,value,std_error";
    for (const auto& k : keys) out += "," + csv_field(k);
    out += '\n';
    for (const auto& r : records) {
        out += format_double(r.abscissa) + "," + format_double(r.value) + "," + format_double(r.std_error);
        for (const auto& k : keys) {
            out += ',';
            if (auto it = r.metadata.find(k); it != r.metadata.end()) out += csv_field(it->second);
        }
        out += '\n';
    }
    return out;
}

std::string report_json(const CheckReport& report) { return report_object(report).dump(2) + "\n"; }

std::string reports_json(std::span<const CheckReport> reports) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) arr.push_back(report_object(r));
    return arr.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw IoError("short write to " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace treelab
