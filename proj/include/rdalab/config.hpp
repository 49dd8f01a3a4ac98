#pragma once

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace rdalab {

// Flat `key = value` configuration with `#` comments and at most one level of
// `include <path>` (paths relative to the including file).
class ExperimentConfig {
public:
    struct Entry {
        std::string value;
        std::string origin;  // file name or "<cli>"
        int line = 0;
    };

    static ExperimentConfig parse(std::istream& in, const std::string& origin, const std::filesystem::path& base_dir = {},
                                  int depth = 0) {
        ExperimentConfig cfg;
        cfg.parse_into(in, origin, base_dir, depth);
        return cfg;
    }

    static ExperimentConfig load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError(path.string() + ": cannot open config file");
        return parse(in, path.string(), path.parent_path());
    }

    void set(const std::string& key, const std::string& value, const std::string& origin = "<cli>", int line = 0) {
        entries_[key] = Entry{value, origin, line};
    }

    // "key=value" from the command line.
    void set_assignment(const std::string& kv) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("<cli>: expected key=value, got '" + kv + "'");
        std::string k = trim(kv.substr(0, eq)), v = trim(kv.substr(eq + 1));
        check_key(k, "<cli>", 0);
        set(k, v);
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    const std::map<std::string, Entry>& entries() const { return entries_; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second.value;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : to_number<double>(it->second, key);
    }

    long get_int(const std::string& key, long fallback) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : to_number<long>(it->second, key);
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        const auto& v = it->second.value;
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError(where(it->second) + "key '" + key + "': expected boolean, got '" + v + "'");
    }

    std::vector<long> get_int_list(const std::string& key, const std::vector<long>& fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        std::vector<long> out;
        std::stringstream ss(it->second.value);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_number<long>(Entry{trim(item), it->second.origin, it->second.line}, key));
        if (out.empty()) throw ConfigError(where(it->second) + "key '" + key + "': empty list");
        return out;
    }

    std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        std::vector<double> out;
        std::stringstream ss(it->second.value);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_number<double>(Entry{trim(item), it->second.origin, it->second.line}, key));
        if (out.empty()) throw ConfigError(where(it->second) + "key '" + key + "': empty list");
        return out;
    }

    // Rejects keys outside the allowed set, pointing at the offending line.
    void require_known(const std::set<std::string>& allowed) const {
        for (const auto& [k, e] : entries_)
            if (!allowed.count(k)) throw ConfigError(where(e) + "unknown key '" + k + "'");
    }

    // Sorted key=value lines; the hash covers exactly this text.
    std::string canonical() const {
        std::string s;
        for (const auto& [k, e] : entries_) s += k + "=" + e.value + "\n";
        return s;
    }

    std::string hash() const {
        std::uint64_t h = 1469598103934665603ull;  // FNV-1a
        for (unsigned char c : canonical()) {
            h ^= c;
            h *= 1099511628211ull;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

private:
    std::map<std::string, Entry> entries_;

    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    static std::string where(const Entry& e) {
        return e.line > 0 ? e.origin + ":" + std::to_string(e.line) + ": " : e.origin + ": ";
    }

    static void check_key(const std::string& k, const std::string& origin, int line) {
        bool ok = !k.empty();
        for (char c : k) ok = ok && (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.');
        if (!ok) throw ConfigError(origin + ":" + std::to_string(line) + ": invalid key '" + k + "'");
    }

    template <class T>
    static T to_number(const Entry& e, const std::string& key) {
        T v{};
        const char* b = e.value.data();
        const char* end = b + e.value.size();
        auto [p, ec] = std::from_chars(b, end, v);
        if (ec != std::errc() || p != end || e.value.empty())
            throw ConfigError(where(e) + "key '" + key + "': expected number, got '" + e.value + "'");
        return v;
    }

    void parse_into(std::istream& in, const std::string& origin, const std::filesystem::path& base_dir, int depth) {
        std::string raw;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            auto hash_pos = raw.find('#');
            std::string s = trim(hash_pos == std::string::npos ? raw : raw.substr(0, hash_pos));
            if (s.empty()) continue;
            if (s.rfind("include", 0) == 0 && (s.size() == 7 || s[7] == ' ' || s[7] == '\t')) {
                std::string target = trim(s.substr(7));
                if (target.empty()) throw ConfigError(origin + ":" + std::to_string(line) + ": include without a path");
                if (depth >= 1)
                    throw ConfigError(origin + ":" + std::to_string(line) + ": nested include not allowed");
                std::filesystem::path p = base_dir / target;
                std::ifstream sub(p);
                if (!sub) throw ConfigError(origin + ":" + std::to_string(line) + ": cannot open include '" + target + "'");
                parse_into(sub, p.string(), p.parent_path(), depth + 1);
                continue;
            }
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(line) + ": expected 'key = value', got '" + s + "'");
            std::string k = trim(s.substr(0, eq)), v = trim(s.substr(eq + 1));
            check_key(k, origin, line);
            set(k, v, origin, line);
        }
    }
};

}  // namespace rdalab
