#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "helios/controller.hpp"
#include "helios/model_store.hpp"
#include "helios/seeds.hpp"
#include "helios/synthetic.hpp"

namespace py = pybind11;
using namespace helios;

namespace {

PhotosynthesisParams make_params(double a, double k) {
    PhotosynthesisParams params{a, k};
    params.validate();
    return params;
}

py::dict score_dict(const PredictionScore& s) {
    py::dict d;
    d["r_squared"] = s.r_squared ? py::object(py::float_(*s.r_squared)) : py::none();
    d["rmse_abs"] = s.rmse_abs;
    d["rmse_pct"] = s.rmse_pct ? py::object(py::float_(*s.rmse_pct)) : py::none();
    return d;
}

py::dict solve(const std::vector<double>& prices, const std::vector<double>& sun_ppfd,
               double budget, double a, double k, double led_max_ppfd,
               double step_seconds, double efficacy) {
    if (prices.size() != sun_ppfd.size())
        throw py::value_error("prices and sun_ppfd must have equal length");
    HorizonProblem problem;
    problem.prices = prices;
    problem.params = make_params(a, k);
    for (double s : sun_ppfd) {
        const Ppfd p{s};
        problem.sun_ppfd.push_back(p);
        problem.sun_etr.push_back(etr_from_ppfd(p, problem.params));
    }
    problem.led_cap = etr_from_ppfd(Ppfd(led_max_ppfd), problem.params);
    problem.budget = budget;

    const LightingSchedule schedule = solve_horizon(problem);
    std::vector<double> led_etr, led_ppfd;
    for (std::size_t t = 0; t < schedule.led_etr.size(); ++t) {
        led_etr.push_back(schedule.led_etr[t].value);
        led_ppfd.push_back(schedule.led_etr[t].value > 0.0
                               ? led_ppfd_for(schedule.led_etr[t], problem.sun_etr[t],
                                              problem.sun_ppfd[t], problem.params)
                                     .value
                               : 0.0);
    }
    py::dict d;
    d["led_etr"] = led_etr;
    d["led_ppfd"] = led_ppfd;
    d["multiplier"] = schedule.multiplier;
    d["feasible"] = schedule.feasible;
    d["budget_residual"] = schedule.diagnostics.budget_residual;
    d["cost"] = schedule_cost(schedule, problem,
                              cost_conversion_factor(step_seconds, efficacy));
    return d;
}

py::dict simulate_synthetic_day(const std::string& strategy_name, int year, int month,
                                int day, double dpi_target, double price,
                                bool identical_days, int train_year,
                                std::uint64_t seed) {
    const StrategyKind strategy = strategy_from_string(strategy_name);
    if (strategy == StrategyKind::Bnn)
        throw py::value_error(
            "bnn days need a trained model; train with the CLI and use predict_from_model");

    ControlConfig config;
    config.dpi_target_mol = dpi_target;

    SyntheticConfig synth;
    synth.year = year;
    synth.months = {month};
    synth.identical_days = identical_days;
    synth.seed = seed;
    const std::vector<StepSeries> days = synthetic_month(
        synth, month, config.grid, kDefaultWattsToPpfd, config.params);

    const StepSeries* chosen = nullptr;
    for (const StepSeries& d : days)
        if (static_cast<int>(unsigned(d.date.day())) == day) chosen = &d;
    if (!chosen) throw py::value_error("no such day in the synthetic month");

    const PriceSchedule prices = uniform_prices(config.grid, price);

    std::unique_ptr<Predictor> predictor;
    std::optional<ClimatologyProfile> prior;
    if (strategy == StrategyKind::Markov) {
        synth.year = train_year;
        const std::vector<StepSeries> train_days = synthetic_month(
            synth, month, config.grid, kDefaultWattsToPpfd, config.params);
        predictor = std::make_unique<MarkovPredictor>(fit_markov(train_days, 10));
        prior = fit_climatology(train_days);
    }

    const DayResult result =
        run_day(strategy, *chosen, prices, config, predictor.get(),
                prior ? &*prior : nullptr);
    std::vector<double> actual, led;
    for (const StepRecord& rec : result.steps) {
        actual.push_back(rec.actual_ppfd);
        led.push_back(rec.led_ppfd);
    }
    py::dict d;
    d["date"] = format_date(result.date);
    d["strategy"] = to_string(result.strategy);
    d["total_cost"] = result.total_cost;
    d["realized_dpi"] = result.realized_dpi;
    d["dpi_met"] = result.dpi_met;
    d["feasible"] = result.feasible;
    d["actual_ppfd"] = actual;
    d["led_ppfd"] = led;
    return d;
}

std::vector<double> predict_from_model(const std::filesystem::path& path,
                                       int current_step, double current_ppfd,
                                       int num_steps, std::uint64_t seed) {
    std::unique_ptr<Predictor> predictor;
    switch (peek_model_kind(path)) {
        case ModelKind::Bnn:
            predictor = std::make_unique<BnnPredictor>(load_bnn(path), num_steps, seed);
            break;
        case ModelKind::Markov:
            predictor = std::make_unique<MarkovPredictor>(load_markov(path));
            break;
        case ModelKind::Climatology:
            predictor = std::make_unique<ClimatologyPredictor>(load_climatology(path));
            break;
    }
    if (predictor->num_steps() != num_steps)
        throw py::value_error("model was built for " +
                              std::to_string(predictor->num_steps()) + " steps");
    std::vector<double> out;
    for (const Ppfd& p : predictor->predict_horizon(current_step, Ppfd(current_ppfd)))
        out.push_back(p.value);
    return out;
}

}  // namespace

PYBIND11_MODULE(_helios, m) {
    m.doc() = "Cost-optimal greenhouse supplemental lighting: light-response curve, "
              "schedule optimization, prediction scoring, and day simulation.";

    m.def(
        "etr",
        [](double ppfd, double a, double k) {
            return etr_from_ppfd(Ppfd(ppfd), make_params(a, k)).value;
        },
        py::arg("ppfd"), py::arg("a") = 121.0, py::arg("k") = 0.00277,
        "Electron transport rate of the saturating light-response curve.");

    m.def(
        "ppfd_for_etr",
        [](double etr, double a, double k) {
            return ppfd_from_etr(Etr(etr), make_params(a, k)).value;
        },
        py::arg("etr"), py::arg("a") = 121.0, py::arg("k") = 0.00277,
        "Inverse of etr(); raises for values at or beyond the asymptote.");

    m.def(
        "led_ppfd",
        [](double led_etr, double sun_ppfd, double a, double k) {
            const PhotosynthesisParams params = make_params(a, k);
            const Ppfd sun{sun_ppfd};
            return led_ppfd_for(Etr(led_etr), etr_from_ppfd(sun, params), sun, params)
                .value;
        },
        py::arg("led_etr"), py::arg("sun_ppfd") = 0.0, py::arg("a") = 121.0,
        py::arg("k") = 0.00277,
        "Lamp PPFD needed for an ETR increment on top of the given sunlight.");

    m.def(
        "watts_to_ppfd",
        [](double watts, double factor) {
            return helios::watts_to_ppfd(Irradiance(watts), factor).value;
        },
        py::arg("watts"), py::arg("factor") = kDefaultWattsToPpfd,
        "Convert GHI in W/m^2 to sunlight PPFD.");

    m.def("cost_conversion_factor", &cost_conversion_factor,
          py::arg("step_seconds") = 900.0, py::arg("efficacy_umol_per_j") = 2.8,
          "cent/kWh to cent/m^2 per control step.");

    m.def(
        "score",
        [](const std::vector<double>& observed, const std::vector<double>& predicted) {
            return score_dict(helios::score(observed, predicted));
        },
        py::arg("observed"), py::arg("predicted"),
        "R^2, absolute RMSE, and RMSE as a percent of the observed maximum.");

    m.def("solve_horizon", &solve, py::arg("prices"), py::arg("sun_ppfd"),
          py::arg("budget"), py::arg("a") = 121.0, py::arg("k") = 0.00277,
          py::arg("led_max_ppfd") = 200.0, py::arg("step_seconds") = 900.0,
          py::arg("efficacy_umol_per_j") = 2.8,
          "Minimum-cost LED ETR allocation meeting the remaining daily budget.");

    m.def("simulate_synthetic_day", &simulate_synthetic_day, py::arg("strategy"),
          py::arg("year") = 2021, py::arg("month") = 6, py::arg("day") = 15,
          py::arg("dpi_target") = 3.0, py::arg("price") = 10.0,
          py::arg("identical_days") = true, py::arg("train_year") = 2020,
          py::arg("seed") = 0,
          "Run one clear-sky synthetic day under baseline, markov, or heuristic "
          "control.");

    m.def(
        "model_kind",
        [](const std::filesystem::path& path) { return to_string(peek_model_kind(path)); },
        py::arg("path"), "Kind recorded in a saved model file.");

    m.def("predict_from_model", &predict_from_model, py::arg("path"),
          py::arg("current_step"), py::arg("current_ppfd"), py::arg("num_steps") = 64,
          py::arg("seed") = 0,
          "Sunlight forecast for the remaining steps from a saved model.");

    py::register_exception<ModelIoError>(m, "ModelIoError", PyExc_RuntimeError);
}
