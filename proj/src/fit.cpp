#include "vwak/fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vwak {

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y, std::size_t min_samples)
{
    if (x.size() != y.size()) {
        throw std::invalid_argument("least_squares: size mismatch");
    }
    const std::size_t n = x.size();
    if (n < min_samples || n < 2) {
        throw DegenerateFit("need at least " + std::to_string(std::max<std::size_t>(min_samples, 2)) +
                            " usable samples, have " + std::to_string(n));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0) {
        throw DegenerateFit("all abscissae coincide");
    }
    LinearFit out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    out.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    out.samples = n;
    return out;
}

} // namespace vwak
