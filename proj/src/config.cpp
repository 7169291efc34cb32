#include "ergo/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "ergo/error.hpp"

namespace ergo {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
    bool in_quote = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (c == '"') in_quote = !in_quote;
        if (!in_quote && (c == '#' || c == ';')) return line.substr(0, i);
    }
    return line;
}

}  // namespace

uint64_t fnv1a64(const std::string& data) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("config", "unterminated section header at line " +
                                               std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config",
                             "expected key = value at line " + std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError("config", "empty key at line " + std::to_string(lineno));
        if (!section.empty()) key = section + "." + key;
        cfg.add(key, value);
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("config", "cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void Config::set(const std::string& key, const std::string& value) {
    entries_[key] = {value};
}

void Config::add(const std::string& key, const std::string& value) {
    entries_[key].push_back(value);
}

void Config::merge(const Config& other) {
    for (const auto& [k, vs] : other.entries_) entries_[k] = vs;
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string Config::get_string(const std::string& key, const std::string& def) const {
    auto it = entries_.find(key);
    if (it == entries_.end() || it->second.empty()) return def;
    return it->second.back();
}

std::string Config::require_string(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end() || it->second.empty())
        throw ValidationError("config", "missing required config key: " + key);
    return it->second.back();
}

double Config::get_double(const std::string& key, double def) const {
    auto it = entries_.find(key);
    if (it == entries_.end() || it->second.empty()) return def;
    const std::string& s = it->second.back();
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("config", "key " + key + ": not a number: '" + s + "'");
    }
}

int Config::get_int(const std::string& key, int def) const {
    auto it = entries_.find(key);
    if (it == entries_.end() || it->second.empty()) return def;
    const std::string& s = it->second.back();
    try {
        size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("config", "key " + key + ": not an integer: '" + s + "'");
    }
}

bool Config::get_bool(const std::string& key, bool def) const {
    auto it = entries_.find(key);
    if (it == entries_.end() || it->second.empty()) return def;
    std::string s = it->second.back();
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ParseError("config", "key " + key + ": not a boolean: '" + s + "'");
}

std::vector<std::string> Config::get_all(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return {};
    return it->second;
}

std::string Config::canonical_text() const {
    std::string out;
    for (const auto& [k, vs] : entries_)
        for (const auto& v : vs) out += k + "=" + v + "\n";
    return out;
}

std::string Config::hash() const {
    uint64_t h = fnv1a64(canonical_text());
    static const char* hex = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = hex[h & 0xf];
        h >>= 4;
    }
    return s;
}

}  // namespace ergo
