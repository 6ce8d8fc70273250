#pragma once

// IFS configuration files:
//
//   {"maps": [{"c": "1/3", "b": "0"}, {"c": "1/3", "b": "2/3"}]}

#include "vwak/ifs.hpp"
#include "vwak/report.hpp"

#include <stdexcept>
#include <string>

namespace vwak {

/// Invalid configuration; field() names the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field))
    {
    }
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

Ifs1D parse_ifs(const Json& json);
/// Throws ConfigError for an unreadable file, malformed JSON or bad maps.
Ifs1D load_config(const std::string& path);

/// Rational flag value; with require_above_one the value must exceed 1.
Rational parse_exponent(const std::string& field, const std::string& text, bool require_above_one);

struct LevelRange {
    int first = 0;
    int last = 0;
};
/// "k1..k2" or a single "k"; requires k1 <= k2.
LevelRange parse_range(const std::string& field, const std::string& text);

} // namespace vwak
