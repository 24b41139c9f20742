#include "pgnav/config.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace pgnav {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

void Config::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line is not `key = value`: " + line);
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw std::runtime_error("config line has empty key: " + line);
        values_[key] = value;
    }
}

std::vector<std::string> Config::apply_args(const std::vector<std::string>& args) {
    std::vector<std::string> positional;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) == 0) {
            if (i + 1 >= args.size())
                throw std::runtime_error("flag " + a + " is missing a value");
            values_[a.substr(2)] = args[++i];
        } else {
            positional.push_back(a);
        }
    }
    return positional;
}

std::string Config::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::runtime_error("missing config key: " + key);
    return it->second;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

long long Config::get_int(const std::string& key, long long fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stoll(it->second);
}

double Config::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stod(it->second);
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stoull(it->second);
}

std::string Config::out_path(const std::string& filename) const {
    if (!filename.empty() && filename[0] == '/') return filename;
    std::string root;
    if (const char* env = std::getenv("PGNAV_OUTPUT_ROOT"); env && *env) root = env;
    else root = get("out_dir", ".");
    if (root.empty() || root == ".") return filename;
    if (root.back() == '/') return root + filename;
    return root + "/" + filename;
}

} // namespace pgnav
