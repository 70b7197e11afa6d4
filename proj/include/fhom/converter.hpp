#ifndef FHOM_CONVERTER_HPP
#define FHOM_CONVERTER_HPP

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "fhom/spectra.hpp"

namespace fhom
{
// Interaction strength |g| tau_int and pump phase phi of the frequency beamsplitter.
struct BeamsplitterAngle
{
    double mixing_rad = 0.0;
    double pump_phase_rad = 0.0;
};

using BsMatrix = std::array<std::array<std::complex<double>, 2>, 2>;

// Monochromatic input-output map on the (upper, lower) annihilation operators:
// [[cos m, -e^{i phi} sin m], [e^{-i phi} sin m, cos m]].
inline BsMatrix bs_map(const BeamsplitterAngle& angle)
{
    const double c = std::cos(angle.mixing_rad);
    const double s = std::sin(angle.mixing_rad);
    const std::complex<double> eip = std::polar(1.0, angle.pump_phase_rad);
    return {{{std::complex<double>(c, 0.0), -eip * s},
             {std::conj(eip) * s, std::complex<double>(c, 0.0)}}};
}

// Pump-power map of the peak internal transition probability, R~(P) = A sin^2(sqrt(eta P)).
struct PumpCurve
{
    double amplitude = 0.0;   // dimensionless peak, in [0,1]
    double rate_per_mw = 0.0; // eta, 1/mW
};

inline double transition_peak(const PumpCurve& curve, double power_mw)
{
    if (!(power_mw >= 0.0))
        throw std::domain_error("transition_peak: pump power must be nonnegative");
    const double s = std::sin(std::sqrt(curve.rate_per_mw * power_mw));
    return curve.amplitude * s * s;
}

// Spectrally resolved converter response R(P, omega): peak R~(P), Gaussian in detuning.
struct ConverterResponse
{
    double peak = 0.0;
    double fwhm_ghz = std::numeric_limits<double>::infinity();
    double center_ghz = 0.0;
};

inline double response_at(const ConverterResponse& resp, double detuning_ghz)
{
    return GaussianProfile{resp.fwhm_ghz, resp.peak, resp.center_ghz}.value_at(detuning_ghz);
}

} // namespace fhom

#endif
