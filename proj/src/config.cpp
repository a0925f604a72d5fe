#include <vans/config.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace vans
{
  namespace
  {
    std::string trim(const std::string &s)
    {
      size_t b = 0, e = s.size();
      while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
      while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
      return s.substr(b, e - b);
    }

    std::string lower(std::string s)
    {
      std::transform(s.begin(), s.end(), s.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      return s;
    }
  } // namespace

  Config Config::from_file(const std::string &path)
  {
    std::ifstream in(path);
    if (!in)
      throw IoError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_string(buffer.str(), path);
  }

  Config Config::from_string(const std::string &text, const std::string &origin)
  {
    Config config;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line))
      {
        ++lineno;
        const size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos)
          line.erase(comment);
        line = trim(line);
        if (line.empty())
          continue;

        if (line.front() == '[')
          {
            if (line.back() != ']')
              throw ConfigError(origin + ":" + std::to_string(lineno) +
                                ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
              throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
            continue;
          }

        const size_t eq = line.find('=');
        if (eq == std::string::npos)
          throw ConfigError(origin + ":" + std::to_string(lineno) +
                            ": expected `key = value`, got `" + line + "`");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
          throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        config.set(section.empty() ? key : section + "." + key, value);
      }
    return config;
  }

  void Config::set(const std::string &key, const std::string &value)
  {
    values_[key] = value;
  }

  bool Config::has(const std::string &key) const
  {
    return values_.count(key) != 0;
  }

  std::string Config::get_string(const std::string &key, const std::string &fallback) const
  {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double Config::get_double(const std::string &key, double fallback) const
  {
    const auto it = values_.find(key);
    if (it == values_.end())
      return fallback;
    size_t used = 0;
    double value = 0.0;
    try
      {
        value = std::stod(it->second, &used);
      }
    catch (const std::exception &)
      {
        throw ConfigError("config key " + key + ": `" + it->second + "` is not a number");
      }
    if (used != it->second.size())
      throw ConfigError("config key " + key + ": `" + it->second + "` is not a number");
    return value;
  }

  int Config::get_int(const std::string &key, int fallback) const
  {
    if (!has(key))
      return fallback;
    const double value = get_double(key, 0.0);
    const int rounded = static_cast<int>(value);
    if (value != rounded)
      throw ConfigError("config key " + key + ": expected an integer");
    return rounded;
  }

  bool Config::get_bool(const std::string &key, bool fallback) const
  {
    const auto it = values_.find(key);
    if (it == values_.end())
      return fallback;
    const std::string v = lower(it->second);
    if (v == "true" || v == "1" || v == "on" || v == "yes")
      return true;
    if (v == "false" || v == "0" || v == "off" || v == "no")
      return false;
    throw ConfigError("config key " + key + ": `" + it->second + "` is not a boolean");
  }

  std::vector<double> Config::get_list(const std::string &key,
                                       const std::vector<double> &fallback) const
  {
    const auto it = values_.find(key);
    if (it == values_.end())
      return fallback;
    std::vector<double> values;
    std::istringstream in(it->second);
    std::string token;
    while (std::getline(in, token, ','))
      {
        token = trim(token);
        if (token.empty())
          continue;
        size_t used = 0;
        double v = 0.0;
        try
          {
            v = std::stod(token, &used);
          }
        catch (const std::exception &)
          {
            used = std::string::npos;
          }
        if (used != token.size())
          throw ConfigError("config key " + key + ": `" + token + "` is not a number");
        values.push_back(v);
      }
    if (values.empty())
      throw ConfigError("config key " + key + ": empty list");
    return values;
  }

  std::vector<std::pair<std::string, std::string>> Config::items() const
  {
    return {values_.begin(), values_.end()};
  }

  void write_config(const std::string &path, const Config &config)
  {
    std::ofstream out(path);
    if (!out)
      throw IoError("cannot write config file: " + path);

    std::string section;
    for (const auto &[key, value] : config.items())
      {
        const size_t dot = key.rfind('.');
        const std::string this_section = dot == std::string::npos ? "" : key.substr(0, dot);
        const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
        if (this_section != section)
          {
            section = this_section;
            out << "[" << section << "]\n";
          }
        out << name << " = " << value << "\n";
      }
    if (!out)
      throw IoError("failed while writing config file: " + path);
  }
} // namespace vans
