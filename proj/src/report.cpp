#include "vwak/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace vwak {

std::string format_double(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.12g", value);
    return buffer;
}

double round12(double value)
{
    if (!std::isfinite(value)) {
        return value;
    }
    return std::strtod(format_double(value).c_str(), nullptr);
}

void write_atomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    fs::path temp = target;
    temp += ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open '" + temp.string() + "' for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error("write failed for '" + temp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(temp, target, ec);
    if (ec) {
        fs::remove(temp);
        throw std::runtime_error("cannot replace '" + path + "': " + ec.message());
    }
}

std::string dump_json(const Json& value)
{
    return value.dump(2) + "\n";
}

void write_report(const std::string& data, const std::string& path)
{
    write_atomic(path, data);
}

void write_report(const Json& data, const std::string& path)
{
    write_atomic(path, dump_json(data));
}

} // namespace vwak
