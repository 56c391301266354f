#pragma once

#include <span>
#include <vector>

#include "helios/light_model.hpp"

namespace helios {

/// Keep a - sun_etr - led_etr at least this fraction of a, so the cost
/// log stays finite. The marginal price diverges as the asymptote is
/// approached, so no finite-cost optimum is lost by the tightening.
inline constexpr double kDomainMarginFrac = 1e-6;

/// One remaining-day allocation problem: choose per-step LED ETR so the
/// (LED + sun) ETR sum reaches `budget` at minimum electricity cost.
/// Entries cover steps t = start_step..T; sun values are measured at
/// t = start_step and predicted beyond it.
struct HorizonProblem {
    int start_step = 1;
    std::vector<double> prices;   // C_t, cent/kWh, > 0
    std::vector<Etr> sun_etr;     // per-step sun ETR, each < a
    std::vector<Ppfd> sun_ppfd;   // per-step sun PPFD
    PhotosynthesisParams params;
    Etr led_cap;                  // max LED ETR per step
    double budget = 0.0;          // required sum of (led_etr + sun_etr)

    int horizon() const { return static_cast<int>(prices.size()); }
    void validate() const;
};

struct SolveDiagnostics {
    int iterations = 0;
    double budget_residual = 0.0;  // sum(x) - led_budget, feasible runs only
    bool polished = false;         // analytic active-set refinement applied
};

/// Solver output. When `feasible`, the committed ETRs meet the budget
/// (residual >= -1e-6); otherwise every step sits at its upper bound and
/// the budget is unreachable on this horizon.
struct LightingSchedule {
    std::vector<Etr> led_etr;    // x_t, one per horizon step
    double multiplier = 0.0;     // lambda of the active budget constraint
    bool feasible = true;
    SolveDiagnostics diagnostics;
};

/// Remaining ETR-sum requirement: dpi_target (mol m^-2 d^-1, as umol) over
/// the step length, minus what completed steps already realized.
double remaining_budget(double dpi_target_mol, double step_seconds,
                        std::span<const double> realized_history);

/// cent/kWh -> cent/m^2 per step: 1 / (efficacy in umol per kJ) times the
/// step length in hours. Defaults give 0.25 / 2800 for 15-minute steps.
double cost_conversion_factor(double step_seconds,
                              double led_efficacy_umol_per_j = 2.8);

/// Exact minimizer of the separable convex program.
///
/// Stationarity gives x_t(lambda) = clamp(a - s_t - C_t/(k*lambda), 0, u_t)
/// with u_t = min(led_cap, a - s_t - margin); the sum is nondecreasing in
/// lambda, so the active multiplier is found by bisection until the budget
/// binds, then refined analytically on the final active set.
LightingSchedule solve_horizon(const HorizonProblem& problem);

/// Optimization objective at x: sum of C_t * [(1/k) ln(a/(a-x_t-s_t)) - s_ppfd_t].
/// The PPFD term is constant in x; it is kept so two solution routes can be
/// compared on identical numbers.
double horizon_objective(const HorizonProblem& problem,
                         const std::vector<Etr>& led_etr);

/// Physical electricity cost of a schedule in cent/m^2: the LED PPFD of
/// each lit step (clamped at 0) times price and the kWh conversion factor.
double schedule_cost(const LightingSchedule& schedule,
                     const HorizonProblem& problem, double conversion_factor);

}  // namespace helios
