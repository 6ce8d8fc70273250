#pragma once

#include <stdexcept>
#include <vector>

namespace vwak {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t samples = 0;
};

class DegenerateFit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ordinary least squares y ~ slope * x + intercept. Throws DegenerateFit
/// with fewer than `min_samples` points or when all x coincide.
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y, std::size_t min_samples = 2);

} // namespace vwak
