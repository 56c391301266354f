"""Cost-optimal greenhouse supplemental lighting.

Python surface over the C++ core: the saturating light-response curve, the
remaining-day schedule optimizer, prediction scoring, saved-model forecasts,
and single-day simulations on synthetic clear-sky data.
"""

try:
    from ._helios import (
        cost_conversion_factor,
        etr,
        led_ppfd,
        model_kind,
        ppfd_for_etr,
        predict_from_model,
        score,
        simulate_synthetic_day,
        solve_horizon,
        watts_to_ppfd,
    )
except ImportError:  # in-tree builds leave the extension next to the build dir
    from _helios import (
        cost_conversion_factor,
        etr,
        led_ppfd,
        model_kind,
        ppfd_for_etr,
        predict_from_model,
        score,
        simulate_synthetic_day,
        solve_horizon,
        watts_to_ppfd,
    )

__version__ = "0.1.0"

__all__ = [
    "cost_conversion_factor",
    "etr",
    "led_ppfd",
    "model_kind",
    "ppfd_for_etr",
    "predict_from_model",
    "score",
    "simulate_synthetic_day",
    "solve_horizon",
    "watts_to_ppfd",
    "__version__",
]
