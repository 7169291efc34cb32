#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ergo/error.hpp"

namespace ergo {

// Shortest decimal rendering that round-trips the exact double value.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("io", "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot write file: " + path);
    out << content;
    if (!out) throw Error("io", "write failed: " + path);
}

// Identifies what produced an artifact. Rendered into the first line of
// every CSV and into a "producer" object in JSON outputs.
struct Producer {
    std::string subcommand;
    std::string config_hash;
    uint64_t seed = 0;

    std::string csv_header() const {
        return "# ergo " + subcommand + " config=" + config_hash +
               " seed=" + std::to_string(seed) + "\n";
    }
};

}  // namespace ergo
