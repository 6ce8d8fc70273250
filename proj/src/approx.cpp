#include "vwak/approx.hpp"

#include <stdexcept>

namespace vwak {

ApproxSpec ApproxSpec::power_law(const Rational& v, const Rational& scale)
{
    if (v <= 0) {
        throw std::invalid_argument("power law exponent must be positive, got " + to_string(v));
    }
    if (scale < 0) {
        throw std::invalid_argument("approximation scale must be non-negative");
    }
    ApproxSpec out;
    out.kind_ = Kind::PowerLaw;
    out.v_ = v;
    out.scale_ = scale;
    return out;
}

ApproxSpec ApproxSpec::table(std::map<int, Rational> values, const Rational& scale)
{
    if (scale < 0) {
        throw std::invalid_argument("approximation scale must be non-negative");
    }
    const Rational* previous = nullptr;
    for (const auto& [m, value] : values) {
        if (value < 0) {
            throw std::invalid_argument("table value at m=" + std::to_string(m) + " is negative");
        }
        if (previous && value > *previous) {
            throw std::invalid_argument("table is increasing at m=" + std::to_string(m));
        }
        previous = &value;
    }
    ApproxSpec out;
    out.kind_ = Kind::Table;
    out.values_ = std::move(values);
    out.scale_ = scale;
    return out;
}

ApproxSpec ApproxSpec::scaled(const Rational& factor) const
{
    ApproxSpec out = *this;
    out.scale_ = scale_ * factor;
    return out;
}

Bracket ApproxSpec::at_level(int m) const
{
    if (kind_ == Kind::Table) {
        const auto it = values_.find(m);
        if (it == values_.end()) {
            throw std::out_of_range("approximation table has no entry for m=" + std::to_string(m));
        }
        const Rational value = scale_ * it->second;
        return {value, value};
    }
    const Bracket base = inverse_power_of_two(v_ * m);
    return {scale_ * base.lo, scale_ * base.hi};
}

std::string ApproxSpec::describe() const
{
    if (kind_ == Kind::PowerLaw) {
        return "power_law(v=" + to_string(v_) + ", scale=" + to_string(scale_) + ")";
    }
    return "table(" + std::to_string(values_.size()) + " levels, scale=" + to_string(scale_) + ")";
}

} // namespace vwak
