#ifndef VANS_CONFIG_HPP
#define VANS_CONFIG_HPP

#include <vans/types.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace vans
{
  // Flat sectioned key-value configuration. A `[section]` header prefixes the
  // keys that follow, so
  //
  //   [nonlinear]
  //   tolerance = 1e-10
  //
  // is addressed as "nonlinear.tolerance". Keys before any section header are
  // addressed bare. Later assignments win, which is also how command-line
  // overrides are layered on top of a file.
  class Config
  {
  public:
    Config() = default;

    static Config from_file(const std::string &path);
    static Config from_string(const std::string &text, const std::string &origin = "<string>");

    void set(const std::string &key, const std::string &value);
    bool has(const std::string &key) const;

    std::string get_string(const std::string &key, const std::string &fallback) const;
    double get_double(const std::string &key, double fallback) const;
    int get_int(const std::string &key, int fallback) const;
    bool get_bool(const std::string &key, bool fallback) const;

    // Comma-separated numeric list ("16,32,64").
    std::vector<double> get_list(const std::string &key,
                                 const std::vector<double> &fallback) const;

    // Resolved key-value pairs in sorted order.
    std::vector<std::pair<std::string, std::string>> items() const;

  private:
    std::map<std::string, std::string> values_;
  };

  // Write every resolved key as `key = value`, grouped by section, so a
  // manifest doubles as a reloadable configuration.
  void write_config(const std::string &path, const Config &config);
} // namespace vans

#endif
