#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmalab {

class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& what, int line_ = 0) : std::runtime_error(what), line(line_) {}
    int line;
};

/// Flat `key = value` text config, UTF-8, '#' comments, one pair per line.
class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    int get_int(const std::string& key, int fallback) const;
    int get_int(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const;

    /// Throws ConfigError naming the offending line for any key not in
    /// `allowed`.
    void require_known_keys(const std::set<std::string>& allowed) const;

    /// Deterministic "key = value" dump, in file order.
    std::string resolved_text() const;

  private:
    struct Entry {
        std::string value;
        int line;
    };
    std::map<std::string, Entry> kv_;
    std::vector<std::string> order_;
    std::string origin_;
};

}  // namespace qmalab
