#ifndef FHOM_CONFIG_HPP
#define FHOM_CONFIG_HPP

#include <cmath>
#include <string>

#include "fhom/converter.hpp"
#include "fhom/errors.hpp"
#include "fhom/spectra.hpp"

namespace fhom
{
// The five model bandwidths, quoted in GHz under the config's width convention.
struct Bandwidths
{
    double in_upper = 0.0;  // heralded single photon spectrum
    double in_lower = 0.0;  // coherent pulse spectrum
    double converter = 0.0; // acceptance bandwidth of the waveguide response
    double out_upper = 0.0; // upper-arm output filter (two-pass)
    double out_lower = 0.0; // lower-arm output filter (two-pass)
};

// The three pump-independent loss products the calibration recovers.
struct LossBudget
{
    double tu = 0.0; // T_in,U * T~_out,U
    double tl = 0.0; // T_in,U * T~_out,L
    double mu = 0.0; // |alpha|^2 * T_in,L / T_in,U
};

// Background detection probabilities per pulse: d_U(P) quadratic, d_L(P) linear.
struct NoiseModel
{
    double du_quad_per_mw2 = 0.0;
    double du_lin_per_mw = 0.0;
    double du_const = 0.0;
    double dl_lin_per_mw = 0.0;
    double dl_const = 0.0;

    double d_upper(double power_mw) const
    {
        return (du_quad_per_mw2 * power_mw + du_lin_per_mw) * power_mw + du_const;
    }
    double d_lower(double power_mw) const
    {
        return dl_lin_per_mw * power_mw + dl_const;
    }
};

enum class InputKind
{
    coherent_lower,      // heralded single photon (upper) x weak coherent pulse (lower)
    single_photon_lower  // twin single photons
};

// Reading of the p_{L,s} staying factor: root-sum-square of the width ratio,
// 1/sqrt(1 + D_inL^2/D_outL^2), matching every sibling rate expression (default),
// or the linear-sum variant 1/(1 + D_inL/D_outL). Forward model and estimator must
// share the reading; the round-trip tests hold under either.
enum class StayingTermReading
{
    structural,
    linear_sum
};

struct ExperimentConfig
{
    Bandwidths bands;
    BandwidthConvention convention = BandwidthConvention::fwhm;
    LossBudget budget;
    PumpCurve pump;
    NoiseModel noise;
    InputKind input = InputKind::coherent_lower;
    double mean_photon_number = 0.1; // |alpha|^2 of the coherent pulse
    bool equalize_input_loss = false; // what-if: force T_in,L / T_in,U = 1
    bool narrow_upper_input = false;  // what-if: narrow D_in,U to D_in,L
    StayingTermReading pls_reading = StayingTermReading::structural;
    double repetition_rate_hz = 82.0e6; // for count-rate reporting only
    std::string label;

    Bandwidths effective_bands() const
    {
        Bandwidths b = bands;
        if (narrow_upper_input)
            b.in_upper = b.in_lower;
        return b;
    }

    // Effective bandwidths converted to FWHM for profile construction.
    Bandwidths fwhm_bands() const
    {
        Bandwidths b = effective_bands();
        b.in_upper = fwhm_from_width(b.in_upper, convention);
        b.in_lower = fwhm_from_width(b.in_lower, convention);
        b.converter = fwhm_from_width(b.converter, convention);
        b.out_upper = fwhm_from_width(b.out_upper, convention);
        b.out_lower = fwhm_from_width(b.out_lower, convention);
        return b;
    }

    void validate() const
    {
        auto positive = [](double v, const char* name, bool finite_required) {
            if (!(v > 0.0))
                throw config_error(std::string("config: ") + name + " must be positive");
            if (finite_required && std::isinf(v))
                throw config_error(std::string("config: ") + name + " must be finite");
        };
        positive(bands.in_upper, "in_upper bandwidth", true);
        positive(bands.in_lower, "in_lower bandwidth", true);
        positive(bands.converter, "converter bandwidth", false);
        positive(bands.out_upper, "out_upper bandwidth", false);
        positive(bands.out_lower, "out_lower bandwidth", false);
        auto in01 = [](double v, const char* name) {
            if (!(v >= 0.0 && v <= 1.0))
                throw config_error(std::string("config: ") + name + " must lie in [0,1]");
        };
        in01(budget.tu, "loss budget tu");
        in01(budget.tl, "loss budget tl");
        if (!(budget.mu >= 0.0))
            throw config_error("config: loss budget mu must be nonnegative");
        in01(pump.amplitude, "pump amplitude");
        if (!(pump.rate_per_mw >= 0.0))
            throw config_error("config: pump rate must be nonnegative");
        if (!(mean_photon_number >= 0.0))
            throw config_error("config: mean photon number must be nonnegative");
        if (input == InputKind::single_photon_lower && !equalize_input_loss &&
            !(mean_photon_number > 0.0))
            throw config_error("config: single-photon input needs mean_photon_number > 0 "
                               "to recover T_in,L/T_in,U from the calibrated mu");
        if (!(repetition_rate_hz > 0.0))
            throw config_error("config: repetition rate must be positive");
        validate_noise_range();
    }

private:
    void validate_noise_range() const
    {
        // d_U, d_L must be probabilities over the operating range [0, 300] mW.
        auto check = [](double d, const char* name) {
            if (!(d >= 0.0 && d <= 1.0))
                throw config_error(std::string("config: ") + name +
                                   " leaves [0,1] over the 0-300 mW operating range");
        };
        check(noise.d_upper(0.0), "noise d_U");
        check(noise.d_upper(300.0), "noise d_U");
        if (noise.du_quad_per_mw2 != 0.0)
        {
            const double vertex = -noise.du_lin_per_mw / (2.0 * noise.du_quad_per_mw2);
            if (vertex > 0.0 && vertex < 300.0)
                check(noise.d_upper(vertex), "noise d_U");
        }
        check(noise.d_lower(0.0), "noise d_L");
        check(noise.d_lower(300.0), "noise d_L");
    }
};

} // namespace fhom

#endif
