#include "helios/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace helios {

PredictionScore score(const std::vector<double>& observed,
                      const std::vector<double>& predicted) {
    if (observed.empty() || observed.size() != predicted.size())
        throw std::invalid_argument("score: series must be nonempty and equal length");

    const auto n = static_cast<double>(observed.size());
    const double mean =
        std::accumulate(observed.begin(), observed.end(), 0.0) / n;

    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double r = observed[i] - predicted[i];
        const double d = observed[i] - mean;
        ss_res += r * r;
        ss_tot += d * d;
    }

    PredictionScore s;
    s.rmse_abs = std::sqrt(ss_res / n);
    if (ss_tot > 0.0) s.r_squared = 1.0 - ss_res / ss_tot;
    const double peak = *std::max_element(observed.begin(), observed.end());
    if (peak > 0.0) s.rmse_pct = 100.0 * s.rmse_abs / peak;
    return s;
}

}  // namespace helios
