#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nsd/errors.hpp"

namespace nsd::cfg {

/// Plain-text key=value configuration. '#' starts a comment, blank lines are
/// skipped, keys and values are whitespace-trimmed.
class KeyValueFile {
public:
    KeyValueFile() = default;
    static KeyValueFile parse(std::istream& in);
    static KeyValueFile load(const std::filesystem::path& file);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback = "") const;
    long long get_int(const std::string& key, long long fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace nsd::cfg
