#include "helios/optimizer.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace helios {

void HorizonProblem::validate() const {
    params.validate();
    if (start_step < 1)
        throw std::invalid_argument("HorizonProblem: start_step must be >= 1");
    const auto n = prices.size();
    if (n == 0 || sun_etr.size() != n || sun_ppfd.size() != n)
        throw std::invalid_argument("HorizonProblem: empty or mismatched step arrays");
    if (!(led_cap.value > 0.0))
        throw std::invalid_argument("HorizonProblem: led_cap must be > 0");
    for (std::size_t t = 0; t < n; ++t) {
        if (!(prices[t] > 0.0))
            throw std::invalid_argument("HorizonProblem: prices must be > 0");
        if (!(sun_etr[t].value < params.a))
            throw std::invalid_argument("HorizonProblem: sun ETR must be below the asymptote");
    }
    if (!std::isfinite(budget))
        throw std::invalid_argument("HorizonProblem: budget must be finite");
}

double remaining_budget(double dpi_target_mol, double step_seconds,
                        std::span<const double> realized_history) {
    if (!(dpi_target_mol >= 0.0) || !(step_seconds > 0.0))
        throw std::invalid_argument("remaining_budget: bad target or step length");
    const double realized =
        std::accumulate(realized_history.begin(), realized_history.end(), 0.0);
    return dpi_target_mol * 1e6 / step_seconds - realized;
}

double cost_conversion_factor(double step_seconds, double led_efficacy_umol_per_j) {
    if (!(step_seconds > 0.0) || !(led_efficacy_umol_per_j > 0.0))
        throw std::invalid_argument("cost_conversion_factor: arguments must be > 0");
    return (1.0 / (led_efficacy_umol_per_j * 1e3)) * (step_seconds / 3600.0);
}

namespace {

// Per-step upper bound: the LED cap, further tightened so the combined
// ETR keeps a margin below the asymptote.
std::vector<double> step_upper_bounds(const HorizonProblem& p) {
    const double margin = kDomainMarginFrac * p.params.a;
    std::vector<double> u(p.prices.size());
    for (std::size_t t = 0; t < u.size(); ++t)
        u[t] = std::clamp(p.params.a - p.sun_etr[t].value - margin, 0.0,
                          p.led_cap.value);
    return u;
}

// x_t(lambda) from stationarity, clamped into [0, u_t].
double step_allocation(const HorizonProblem& p, std::size_t t, double u_t,
                       double lambda) {
    if (lambda <= 0.0) return 0.0;
    const double level =
        p.params.a - p.sun_etr[t].value - p.prices[t] / (p.params.k * lambda);
    return std::clamp(level, 0.0, u_t);
}

double total_allocation(const HorizonProblem& p, const std::vector<double>& u,
                        double lambda) {
    double sum = 0.0;
    for (std::size_t t = 0; t < u.size(); ++t)
        sum += step_allocation(p, t, u[t], lambda);
    return sum;
}

}  // namespace

LightingSchedule solve_horizon(const HorizonProblem& problem) {
    problem.validate();
    const auto n = problem.prices.size();
    const std::vector<double> u = step_upper_bounds(problem);

    double sun_sum = 0.0;
    for (const auto& s : problem.sun_etr) sun_sum += s.value;
    const double led_budget = problem.budget - sun_sum;

    LightingSchedule out;
    out.led_etr.assign(n, Etr(0.0));

    // Budget already met by the sun alone: lights stay off. The cutoff
    // absorbs summation dust from the caller's running totals, which can
    // leave a barely positive budget on days the sun fully covers.
    if (led_budget <= 1e-9 * std::max(1.0, std::abs(problem.budget))) {
        out.multiplier = 0.0;
        out.diagnostics.budget_residual = -led_budget;
        return out;
    }

    const double cap_sum = std::accumulate(u.begin(), u.end(), 0.0);
    if (led_budget > cap_sum) {
        // Unreachable even at full power; light everything as a best effort.
        for (std::size_t t = 0; t < n; ++t) out.led_etr[t] = Etr(u[t]);
        out.multiplier = 0.0;
        out.feasible = false;
        out.diagnostics.budget_residual = cap_sum - led_budget;
        return out;
    }

    // Bracket the multiplier: sum(x(lambda)) is 0 at lambda=0 and reaches
    // cap_sum at finite lambda because every bound keeps a margin below a.
    double lo = 0.0, hi = 1.0;
    int iterations = 0;
    while (total_allocation(problem, u, hi) < led_budget) {
        lo = hi;
        hi *= 2.0;
        if (++iterations > 200)
            throw std::runtime_error("solve_horizon: multiplier bracket failed to close");
    }

    // Run the bracket down to floating-point collapse; the allocation sum is
    // continuous in lambda, so this pins the budget to machine precision.
    const double tol = 1e-8 * std::max(1.0, led_budget);
    double mid = hi;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double sum = total_allocation(problem, u, mid);
        ++iterations;
        (sum < led_budget ? lo : hi) = mid;
    }
    mid = hi;  // the side that satisfies the budget

    // The interval has collapsed onto the active set; solve the interior
    // steps for the multiplier that meets the budget exactly.
    double lambda = mid;
    {
        double interior_price = 0.0;   // sum of C_t/k over interior steps
        double fixed = 0.0;            // capped contributions
        double interior_level = 0.0;   // sum of (a - s_t) over interior steps
        for (std::size_t t = 0; t < n; ++t) {
            const double x = step_allocation(problem, t, u[t], mid);
            if (x >= u[t]) {
                fixed += u[t];
            } else if (x > 0.0) {
                interior_price += problem.prices[t] / problem.params.k;
                interior_level += problem.params.a - problem.sun_etr[t].value;
            }
        }
        const double interior_target = led_budget - fixed;
        const double denom = interior_level - interior_target;
        if (interior_price > 0.0 && denom > 0.0) {
            const double refined = interior_price / denom;
            // Accept only if the active pattern is unchanged.
            if (std::abs(total_allocation(problem, u, refined) - led_budget) <=
                std::abs(total_allocation(problem, u, mid) - led_budget)) {
                lambda = refined;
                out.diagnostics.polished = true;
            }
        }
        if (total_allocation(problem, u, lambda) < led_budget - tol)
            lambda = hi;  // stay on the feasible side
    }

    double realized = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double x = step_allocation(problem, t, u[t], lambda);
        out.led_etr[t] = Etr(x);
        realized += x;
    }
    out.multiplier = lambda;
    out.diagnostics.iterations = iterations;
    out.diagnostics.budget_residual = realized - led_budget;
    return out;
}

double horizon_objective(const HorizonProblem& problem,
                         const std::vector<Etr>& led_etr) {
    assert(led_etr.size() == problem.prices.size());
    const double a = problem.params.a;
    const double k = problem.params.k;
    double total = 0.0;
    for (std::size_t t = 0; t < led_etr.size(); ++t) {
        const double arg = a - led_etr[t].value - problem.sun_etr[t].value;
        if (!(arg > 0.0))
            throw std::domain_error("horizon_objective: combined ETR reaches the asymptote");
        total += problem.prices[t] *
                 (std::log(a / arg) / k - problem.sun_ppfd[t].value);
    }
    return total;
}

double schedule_cost(const LightingSchedule& schedule,
                     const HorizonProblem& problem, double conversion_factor) {
    assert(schedule.led_etr.size() == problem.prices.size());
    double cents = 0.0;
    for (std::size_t t = 0; t < schedule.led_etr.size(); ++t) {
        if (!(schedule.led_etr[t].value > 0.0)) continue;
        const Ppfd led = led_ppfd_for(schedule.led_etr[t], problem.sun_etr[t],
                                      problem.sun_ppfd[t], problem.params);
        cents += problem.prices[t] * led.value * conversion_factor;
    }
    return cents;
}

}  // namespace helios
