#pragma once

#include <stdexcept>

namespace helios {

/// Saturating light-response curve constants for a crop:
/// etr(p) = a * (1 - exp(-k * p)).
/// Defaults are the 'Green Towers' lettuce fit.
struct PhotosynthesisParams {
    double a = 121.0;     // ETR asymptote, umol m^-2 s^-1
    double k = 0.00277;   // initial slope / a, per unit PPFD

    void validate() const {
        if (!(a > 0.0)) throw std::domain_error("PhotosynthesisParams: a must be > 0");
        if (!(k > 0.0)) throw std::domain_error("PhotosynthesisParams: k must be > 0");
    }
};

// Quantities carry distinct types so PPFD-space and ETR-space values cannot
// be mixed silently. All are nonnegative by construction.

/// Photosynthetic photon flux density, umol m^-2 s^-1.
struct Ppfd {
    double value = 0.0;
    Ppfd() = default;
    explicit Ppfd(double v) : value(v) {
        if (!(v >= 0.0)) throw std::domain_error("Ppfd must be finite and >= 0");
    }
};

/// Electron transport rate, umol m^-2 s^-1. Curve-derived values are < a.
struct Etr {
    double value = 0.0;
    Etr() = default;
    explicit Etr(double v) : value(v) {
        if (!(v >= 0.0)) throw std::domain_error("Etr must be finite and >= 0");
    }
};

/// Solar power on a horizontal surface (GHI), W m^-2.
struct Irradiance {
    double value = 0.0;
    Irradiance() = default;
    explicit Irradiance(double v) : value(v) {
        if (!(v >= 0.0)) throw std::domain_error("Irradiance must be finite and >= 0");
    }
};

/// W m^-2 -> umol m^-2 s^-1 for sunlight. Crop/spectrum dependent; this is
/// the usual broadband value.
inline constexpr double kDefaultWattsToPpfd = 2.02;

Ppfd watts_to_ppfd(Irradiance irr, double factor = kDefaultWattsToPpfd);

/// etr(p) = a(1 - e^{-k p}); strictly increasing, bounded above by a.
Etr etr_from_ppfd(Ppfd p, const PhotosynthesisParams& params);

/// Inverse of etr_from_ppfd: p = -ln(1 - e/a) / k. Throws for e >= a,
/// which the curve never reaches.
Ppfd ppfd_from_etr(Etr e, const PhotosynthesisParams& params);

/// PPFD the LEDs must emit so that, with sunlight already providing
/// sun_etr (= etr(sun_ppfd)), the total ETR reaches led_etr + sun_etr:
///   (1/k) ln(a / (a - led_etr - sun_etr)) - sun_ppfd, clamped at 0.
/// The log term is the combined PPFD; subtracting the sun's share leaves
/// what the lamps contribute.
Ppfd led_ppfd_for(Etr led_etr, Etr sun_etr, Ppfd sun_ppfd,
                  const PhotosynthesisParams& params);

}  // namespace helios
