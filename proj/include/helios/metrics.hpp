#pragma once

#include <optional>
#include <vector>

namespace helios {

/// Fit statistics for a predicted series against observations.
struct PredictionScore {
    /// 1 - SS_res / SS_tot. Empty when the observed series has zero
    /// variance, where the definition breaks down.
    std::optional<double> r_squared;
    double rmse_abs = 0.0;  // same unit as the inputs
    /// 100 * rmse_abs / max(observed). Empty when max(observed) <= 0.
    std::optional<double> rmse_pct;
};

/// R^2 and RMSE of `predicted` against `observed` (pairwise, equal lengths).
PredictionScore score(const std::vector<double>& observed,
                      const std::vector<double>& predicted);

}  // namespace helios
