#ifndef LIBRACOOL_CSV_HPP
#define LIBRACOOL_CSV_HPP

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// CSV conventions shared by the library and the CLI: every column name ends
// in a unit suffix, numeric output is 9 significant digits, files are
// written atomically (temp file + rename).

namespace libracool::csv {

inline const std::vector<std::string>& unit_suffixes() {
    static const std::vector<std::string> s = {
        "_Hz",    "_rad",           "_s",           "_W",          "_m",
        "_K",     "_mbar",          "_kg_m2",       "_V_per_m",    "_m3",
        "_rad_per_s", "_rad2_per_s", "_dimensionless", "_dB",      "_arb",
        "_Hz_per_mbar", "_enum",    "_arb_Hz",      "_C_m2_per_V", "_per_s",
    };
    return s;
}

inline bool column_is_unit_tagged(std::string_view name) {
    for (const auto& suffix : unit_suffixes()) {
        if (name.size() > suffix.size() &&
            name.substr(name.size() - suffix.size()) == suffix)
            return true;
    }
    return false;
}

// Every column of a header row must carry a unit tag.
inline bool header_is_unit_tagged(const std::string& header_line) {
    std::stringstream ss(header_line);
    std::string col;
    bool any = false;
    while (std::getline(ss, col, ',')) {
        any = true;
        if (!column_is_unit_tagged(col)) return false;
    }
    return any;
}

// 9 significant digits: below solver tolerance, above display noise, and
// byte-reproducible for a given build.
inline std::string format_number(double v) {
    std::array<char, 40> buf{};
    std::snprintf(buf.data(), buf.size(), "%.9g", v);
    return std::string(buf.data());
}

inline void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp + " for writing");
        f << content;
        if (!f.good()) throw std::runtime_error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

} // namespace libracool::csv

#endif
