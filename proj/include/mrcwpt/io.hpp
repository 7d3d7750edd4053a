#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "mrcwpt/error.hpp"
#include "mrcwpt/metrics.hpp"

namespace mrcwpt {

inline constexpr const char* kProfileHeader = "x,y,p0_watts";

/// Shortest decimal with 9 significant digits, as written to CSV.
inline std::string format_sig9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline double quantize_sig9(double v) { return std::strtod(format_sig9(v).c_str(), nullptr); }

/// Rounds every sample to the precision stored in CSV so metrics computed
/// from the returned profile equal metrics recomputed from the file.
inline PowerProfile quantized(PowerProfile p) {
    for (auto& s : p.samples) {
        s.x = quantize_sig9(s.x);
        s.y = quantize_sig9(s.y);
        s.p0 = quantize_sig9(s.p0);
    }
    return p;
}

inline std::string profile_csv(const PowerProfile& p) {
    std::string out = kProfileHeader;
    out += '\n';
    for (const auto& s : p.samples) {
        out += format_sig9(s.x);
        out += ',';
        out += format_sig9(s.y);
        out += ',';
        out += format_sig9(s.p0);
        out += '\n';
    }
    return out;
}

inline PowerProfile parse_profile_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    detail::require(static_cast<bool>(std::getline(in, line)) && line == kProfileHeader,
                    "profile csv: expected header x,y,p0_watts");
    PowerProfile p;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        ProfileSample s;
        char* end = nullptr;
        const char* c = line.c_str();
        s.x = std::strtod(c, &end);
        bool ok = end != c && *end == ',';
        if (ok) {
            c = end + 1;
            s.y = std::strtod(c, &end);
            ok = end != c && *end == ',';
        }
        if (ok) {
            c = end + 1;
            s.p0 = std::strtod(c, &end);
            ok = end != c && *end == '\0';
        }
        detail::require(ok, "profile csv: malformed row " + std::to_string(row));
        p.samples.push_back(s);
    }
    return p;
}

inline nlohmann::json metrics_to_json(const RegionMetrics& m) {
    return {{"p_avg", m.p_avg}, {"p_min", m.p_min}, {"p_max", m.p_max}, {"xi", m.xi}};
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.parent_path().string() + ": cannot create directory: " + ec.message());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    out << content;
    out.flush();
    if (!out) throw IoError(path.string() + ": write failed");
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string() + ": cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace mrcwpt
