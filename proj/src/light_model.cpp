#include "helios/light_model.hpp"

#include <cmath>

namespace helios {

Ppfd watts_to_ppfd(Irradiance irr, double factor) {
    if (!(factor > 0.0)) throw std::domain_error("watts_to_ppfd: factor must be > 0");
    return Ppfd(factor * irr.value);
}

Etr etr_from_ppfd(Ppfd p, const PhotosynthesisParams& params) {
    params.validate();
    // -expm1 keeps precision for small k*p.
    return Etr(params.a * (-std::expm1(-params.k * p.value)));
}

Ppfd ppfd_from_etr(Etr e, const PhotosynthesisParams& params) {
    params.validate();
    if (e.value >= params.a)
        throw std::domain_error("ppfd_from_etr: ETR at or above the asymptote a");
    return Ppfd(-std::log1p(-e.value / params.a) / params.k);
}

Ppfd led_ppfd_for(Etr led_etr, Etr sun_etr, Ppfd sun_ppfd,
                  const PhotosynthesisParams& params) {
    params.validate();
    if (led_etr.value <= 0.0) return Ppfd(0.0);
    const double total = led_etr.value + sun_etr.value;
    if (total >= params.a)
        throw std::domain_error("led_ppfd_for: combined ETR at or above the asymptote a");
    const double combined_ppfd = -std::log1p(-total / params.a) / params.k;
    return Ppfd(std::max(0.0, combined_ppfd - sun_ppfd.value));
}

}  // namespace helios
