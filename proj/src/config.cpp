#include "vwak/config.hpp"

#include <fstream>
#include <sstream>

namespace vwak {

Ifs1D parse_ifs(const Json& json)
{
    if (!json.is_object() || !json.contains("maps") || !json.at("maps").is_array()) {
        throw ConfigError("maps", "expected an object with a \"maps\" array");
    }
    std::vector<Affine1D> maps;
    std::size_t i = 0;
    for (const auto& entry : json.at("maps")) {
        const std::string field = "maps[" + std::to_string(i++) + "]";
        if (!entry.is_object()) {
            throw ConfigError(field, "expected an object with fields c and b");
        }
        Affine1D f;
        for (const char* key : {"c", "b"}) {
            if (!entry.contains(key) || !entry.at(key).is_string()) {
                throw ConfigError(field + "." + key, "expected a \"num/den\" string");
            }
            try {
                (key[0] == 'c' ? f.ratio : f.offset) = parse_rational(entry.at(key).get<std::string>());
            } catch (const std::invalid_argument& e) {
                throw ConfigError(field + "." + key, e.what());
            }
        }
        if (f.ratio <= 0 || f.ratio >= 1) {
            throw ConfigError(field + ".c", "ratio " + to_string(f.ratio) + " is outside (0,1)");
        }
        maps.push_back(f);
    }
    try {
        return Ifs1D(std::move(maps));
    } catch (const std::exception& e) {
        throw ConfigError("maps", e.what());
    }
}

Ifs1D load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("ifs", "cannot open " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    Json json;
    try {
        json = Json::parse(buffer.str());
    } catch (const Json::parse_error& e) {
        throw ConfigError("ifs", path + ": " + e.what());
    }
    return parse_ifs(json);
}

Rational parse_exponent(const std::string& field, const std::string& text, bool require_above_one)
{
    Rational value;
    try {
        value = parse_rational(text);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field, e.what());
    }
    if (require_above_one && !(value > 1)) {
        throw ConfigError(field, "must exceed 1, got " + text);
    }
    if (!(value > 0)) {
        throw ConfigError(field, "must be positive, got " + text);
    }
    return value;
}

LevelRange parse_range(const std::string& field, const std::string& text)
{
    LevelRange r;
    try {
        const auto dots = text.find("..");
        std::size_t used = 0;
        if (dots == std::string::npos) {
            r.first = r.last = std::stoi(text, &used);
            if (used != text.size()) {
                throw std::invalid_argument(text);
            }
        } else {
            const std::string a = text.substr(0, dots);
            const std::string b = text.substr(dots + 2);
            r.first = std::stoi(a, &used);
            if (used != a.size()) {
                throw std::invalid_argument(text);
            }
            r.last = std::stoi(b, &used);
            if (used != b.size()) {
                throw std::invalid_argument(text);
            }
        }
    } catch (const std::logic_error&) {
        throw ConfigError(field, "expected k or k1..k2, got \"" + text + "\"");
    }
    if (r.first > r.last) {
        throw ConfigError(field, "empty range " + text);
    }
    return r;
}

} // namespace vwak
