#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "wavegraph/error.hpp"

namespace wavegraph {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0; ///< max |y - (slope x + intercept)| over the samples
};

/// Ordinary least squares y ~ slope * x + intercept.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) fail(ErrorKind::domain_mismatch, "fit_line: size mismatch");
    if (x.size() < 2) fail(ErrorKind::insufficient_data, "fit_line: need at least two samples");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    if (sxx == 0.0) fail(ErrorKind::insufficient_data, "fit_line: abscissae are all equal");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t k = 0; k < x.size(); ++k)
        fit.max_residual = std::max(fit.max_residual, std::abs(y[k] - (fit.slope * x[k] + fit.intercept)));
    return fit;
}

} // namespace wavegraph
