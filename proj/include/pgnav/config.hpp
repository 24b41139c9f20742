#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pgnav {

// Line-oriented `key = value` configuration with `--key value` command-line
// overrides. Only the output root may come from the environment
// (PGNAV_OUTPUT_ROOT).
class Config {
public:
    Config() = default;

    void load_file(const std::string& path);
    // Consumes --key value pairs; returns leftover positional arguments.
    std::vector<std::string> apply_args(const std::vector<std::string>& args);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    // Resolves a path against the output root (PGNAV_OUTPUT_ROOT or the
    // out_dir key; defaults to the current directory).
    std::string out_path(const std::string& filename) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace pgnav
