#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace msl {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat key/value configuration with dotted sections. File format: UTF-8
/// lines "key = value", '#' comments. Unknown keys are rejected against the
/// per-command registry before a run starts.
class RunConfig {
public:
    RunConfig() = default;
    static RunConfig from_file(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_str(const std::string& key, const std::string& dflt) const;
    double get_double(const std::string& key, double dflt) const;
    int get_int(const std::string& key, int dflt) const;
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& dflt) const;

    /// Throws ConfigError listing every unknown key.
    void require_known(const std::set<std::string>& allowed) const;

    /// Sorted "key=value" lines; the basis of the config hash recorded in
    /// every output artifact.
    std::string canonical() const;
    std::string hash() const;

    const std::map<std::string, std::string>& items() const { return kv_; }

    /// Keys matching prefix "system." collected as a parameter map.
    std::map<std::string, double> system_params() const;

private:
    std::map<std::string, std::string> kv_;
};

} // namespace msl
