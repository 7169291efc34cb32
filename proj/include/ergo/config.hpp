#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ergo {

// Layered key-value configuration. File format is INI-like:
//
//   [section]
//   key = value        # comment
//   key = value2       ; repeated keys accumulate (used for synth primitives)
//
// Keys are addressed as "section.key". Values set later (CLI overrides)
// replace earlier ones except through add(), which appends.
class Config {
public:
    Config() = default;

    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    void set(const std::string& key, const std::string& value);
    void add(const std::string& key, const std::string& value);
    // Entries from `other` replace/extend this config.
    void merge(const Config& other);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& def) const;
    std::string require_string(const std::string& key) const;
    double get_double(const std::string& key, double def) const;
    int get_int(const std::string& key, int def) const;
    bool get_bool(const std::string& key, bool def) const;
    // All values recorded under a repeated key, in file order.
    std::vector<std::string> get_all(const std::string& key) const;

    // Canonical sorted rendering; identical configs hash identically
    // regardless of file layout.
    std::string canonical_text() const;
    // 16-hex-digit FNV-1a of canonical_text().
    std::string hash() const;

    const std::map<std::string, std::vector<std::string>>& entries() const {
        return entries_;
    }

private:
    std::map<std::string, std::vector<std::string>> entries_;
};

uint64_t fnv1a64(const std::string& data);

}  // namespace ergo
