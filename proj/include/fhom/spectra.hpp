#ifndef FHOM_SPECTRA_HPP
#define FHOM_SPECTRA_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fhom/errors.hpp"

namespace fhom
{
inline constexpr double k_four_ln2 = 4.0 * std::numbers::ln2;

// sigma multiplier for exp(-x^2 / (2 sigma^2)) given a quoted width.
enum class BandwidthConvention
{
    fwhm,    // full width at half maximum (default)
    hwhm,    // half width at half maximum
    half_e,  // half width at 1/e of maximum
    half_e2, // half width at 1/e^2 of maximum (beam-radius style)
    rms_sigma
};

inline double sigma_from_width(double width, BandwidthConvention c)
{
    switch (c)
    {
    case BandwidthConvention::fwhm:      return width / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    case BandwidthConvention::hwhm:      return width / std::sqrt(2.0 * std::numbers::ln2);
    case BandwidthConvention::half_e:    return width / std::numbers::sqrt2;
    case BandwidthConvention::half_e2:   return width / 2.0;
    case BandwidthConvention::rms_sigma: return width;
    }
    throw config_error("sigma_from_width: unknown bandwidth convention");
}

// Quoted width under convention c expressed as a FWHM.
inline double fwhm_from_width(double width, BandwidthConvention c)
{
    if (std::isinf(width))
        return width;
    return sigma_from_width(width, c) * 2.0 * std::sqrt(2.0 * std::numbers::ln2);
}

// A Gaussian of optical frequency: peak * exp(-4 ln2 (nu - center)^2 / fwhm^2).
// Detunings are measured from the band center of the arm, in GHz.
struct GaussianProfile
{
    double fwhm_ghz = 0.0;
    double peak = 0.0;
    double center_ghz = 0.0;

    // Spectral density normalized so the frequency integral is 1.
    static GaussianProfile normalized(double fwhm_ghz, double center_ghz = 0.0)
    {
        if (!(fwhm_ghz > 0.0) || std::isinf(fwhm_ghz))
            throw std::domain_error("GaussianProfile::normalized: fwhm must be positive and finite");
        const double peak = (2.0 / fwhm_ghz) * std::sqrt(std::numbers::ln2 / std::numbers::pi);
        return {fwhm_ghz, peak, center_ghz};
    }

    // Transmittance or transition-probability profile; peak must sit in [0,1].
    static GaussianProfile response(double fwhm_ghz, double peak, double center_ghz = 0.0)
    {
        if (!(fwhm_ghz > 0.0))
            throw std::domain_error("GaussianProfile::response: fwhm must be positive");
        if (!(peak >= 0.0 && peak <= 1.0))
            throw std::domain_error("GaussianProfile::response: peak must lie in [0,1]");
        return {fwhm_ghz, peak, center_ghz};
    }

    double decay() const // exponent coefficient a in peak * exp(-a (nu-c)^2)
    {
        return std::isinf(fwhm_ghz) ? 0.0 : k_four_ln2 / (fwhm_ghz * fwhm_ghz);
    }

    double value_at(double nu_ghz) const
    {
        const double d = nu_ghz - center_ghz;
        return peak * std::exp(-decay() * d * d);
    }
};

// One multiplicative factor of a frequency integral. Square roots of spectra and of
// the converter response appear inside the interference integrals (exponent 1/2);
// `complement` marks the staying factor (1 - profile)^exponent.
struct SpectralFactor
{
    GaussianProfile profile;
    double exponent = 1.0;
    bool complement = false;
};

// Product of spectral factors integrated over frequency with the delay phase
// e^{-i 2 pi nu tau} (nu in GHz, tau in ps).
struct OverlapSpec
{
    std::vector<SpectralFactor> factors;
    double delay_ps = 0.0;
};

enum class WidthRole
{
    density, // normalized input spectrum
    response // unit-peak transmittance/response factor
};

struct WidthEntry
{
    double fwhm_ghz;
    WidthRole role;
};

// Closed-form ratio of the Gaussian product integral to the bare density integral:
// 1 / sqrt(1 + sum_i din^2 / dout_i^2). Depends only on width ratios.
inline double overlap_ratio(std::span<const WidthEntry> widths)
{
    std::size_t densities = 0;
    double din = 0.0;
    for (const auto& w : widths)
    {
        if (!(w.fwhm_ghz > 0.0))
            throw std::domain_error("overlap_ratio: widths must be positive");
        if (w.role == WidthRole::density)
        {
            ++densities;
            din = w.fwhm_ghz;
        }
    }
    if (densities != 1)
        throw std::domain_error("overlap_ratio: exactly one density width expected");
    if (std::isinf(din))
        throw std::domain_error("overlap_ratio: density width must be finite");
    double s = 1.0;
    for (const auto& w : widths)
        if (w.role == WidthRole::response && !std::isinf(w.fwhm_ghz))
            s += (din * din) / (w.fwhm_ghz * w.fwhm_ghz);
    return 1.0 / std::sqrt(s);
}

inline double overlap_ratio(double density_fwhm, std::initializer_list<double> response_fwhms)
{
    std::vector<WidthEntry> entries;
    entries.push_back({density_fwhm, WidthRole::density});
    for (double w : response_fwhms)
        entries.push_back({w, WidthRole::response});
    return overlap_ratio(std::span<const WidthEntry>(entries));
}

namespace detail
{
// integral over R of exp(-a v^2 + (br + i bi) v + logc), a > 0
inline std::complex<double> gaussian_integral(double a, double br, double bi, double logc)
{
    const std::complex<double> b(br, bi);
    const std::complex<double> expo = b * b / (4.0 * a) + logc;
    return std::sqrt(std::numbers::pi / a) * std::exp(expo);
}

struct SpecAccumulator
{
    double a = 0.0;    // quadratic coefficient from plain factors
    double br = 0.0;   // linear coefficient from centers
    double logc = 0.0; // log of constant prefactor
    const SpectralFactor* comp = nullptr; // single finite-width complement factor
    bool vanishes = false;

    static SpecAccumulator build(const OverlapSpec& spec)
    {
        if (spec.factors.empty())
            throw std::domain_error("interference integral: empty profile list");
        if (!std::isfinite(spec.delay_ps))
            throw std::domain_error("interference integral: delay must be finite");
        SpecAccumulator acc;
        for (const auto& f : spec.factors)
        {
            if (!(f.exponent > 0.0))
                throw std::domain_error("interference integral: exponents must be positive");
            if (!(f.profile.fwhm_ghz > 0.0))
                throw std::domain_error("interference integral: widths must be positive");
            const double a = f.profile.decay();
            const double p = f.profile.peak;
            const double c = f.profile.center_ghz;
            if (f.complement)
            {
                if (!(p >= 0.0 && p <= 1.0))
                    throw std::domain_error("interference integral: complement peak must lie in [0,1]");
                if (a == 0.0)
                {
                    if (p >= 1.0)
                    {
                        acc.vanishes = true;
                        return acc;
                    }
                    acc.logc += f.exponent * std::log1p(-p);
                }
                else if (p == 0.0)
                {
                    continue; // (1 - 0)^e = 1
                }
                else
                {
                    if (acc.comp != nullptr)
                        throw std::invalid_argument(
                            "interference integral: at most one finite-width complement factor supported");
                    acc.comp = &f;
                }
            }
            else
            {
                if (p == 0.0)
                {
                    acc.vanishes = true;
                    return acc;
                }
                if (p < 0.0)
                    throw std::domain_error("interference integral: peaks must be nonnegative");
                acc.a += f.exponent * a;
                acc.br += 2.0 * f.exponent * a * c;
                acc.logc += f.exponent * (std::log(p) - a * c * c);
            }
        }
        if (!(acc.a > 0.0))
            throw std::domain_error("interference integral: integrand has no decaying factor");
        return acc;
    }
};
} // namespace detail

// Closed-form evaluation of an OverlapSpec. Pure Gaussian products evaluate in one
// step; a staying factor (1 - p G)^e expands into the binomial series in G, each
// term again a Gaussian integral. At delay 0 the result is real and nonnegative.
inline std::complex<double> interference_integral(const OverlapSpec& spec)
{
    const auto acc = detail::SpecAccumulator::build(spec);
    if (acc.vanishes)
        return {0.0, 0.0};
    const double bi = -2.0 * std::numbers::pi * spec.delay_ps * 1e-3; // GHz * ps

    if (acc.comp == nullptr)
        return detail::gaussian_integral(acc.a, acc.br, bi, acc.logc);

    const double p = acc.comp->profile.peak;
    const double e = acc.comp->exponent;
    const double ca = acc.comp->profile.decay();
    const double cc = acc.comp->profile.center_ghz;

    std::complex<double> sum = 0.0;
    double scale = 0.0;
    double coeff = 1.0; // binom(e, k) * (-p)^k
    int small_streak = 0;
    constexpr int k_budget = 400000;
    for (int k = 0;; ++k)
    {
        const std::complex<double> term =
            coeff * detail::gaussian_integral(acc.a + k * ca, acc.br + 2.0 * k * ca * cc, bi,
                                              acc.logc - k * ca * cc * cc);
        sum += term;
        scale = std::max(scale, std::abs(term));
        if (k >= 1 && std::abs(term) <= 1e-16 * scale)
        {
            if (++small_streak >= 2)
                break;
        }
        else
        {
            small_streak = 0;
        }
        if (k >= k_budget)
        {
            std::ostringstream os;
            os.precision(17);
            os << "interference integral: staying-factor series exceeded " << k_budget
               << " terms (peak " << p << " too close to unity)";
            throw numerical_error(os.str());
        }
        coeff *= (e - k) / (k + 1) * (-p);
    }
    return sum;
}

// Independent verification path: adaptive Gauss-Kronrod quadrature of the literal
// integrand over +-8 combined RMS widths around the product center.
inline std::complex<double> quadrature_oracle(const OverlapSpec& spec)
{
    const auto acc = detail::SpecAccumulator::build(spec);
    if (acc.vanishes)
        return {0.0, 0.0};

    const double center = acc.br / (2.0 * acc.a);
    const double sigma = 1.0 / std::sqrt(2.0 * acc.a);
    const double lo = center - 8.0 * sigma;
    const double hi = center + 8.0 * sigma;
    const double omega = 2.0 * std::numbers::pi * spec.delay_ps * 1e-3;

    auto magnitude = [&spec](double v) {
        double y = 1.0;
        for (const auto& f : spec.factors)
        {
            const double g = f.profile.value_at(v);
            y *= std::pow(f.complement ? 1.0 - g : g, f.exponent);
        }
        return y;
    };

    using quad = boost::math::quadrature::gauss_kronrod<double, 31>;
    constexpr double tol = 1e-11;
    constexpr std::size_t max_depth = 15;

    double err_re = 0.0, l1_re = 0.0;
    const double re = quad::integrate([&](double v) { return magnitude(v) * std::cos(omega * v); },
                                      lo, hi, max_depth, tol, &err_re, &l1_re);
    double im = 0.0, err_im = 0.0, l1_im = 0.0;
    if (spec.delay_ps != 0.0)
        im = quad::integrate([&](double v) { return magnitude(v) * -std::sin(omega * v); },
                             lo, hi, max_depth, tol, &err_im, &l1_im);

    const double budget = tol * std::max({1.0, l1_re, l1_im});
    if (err_re > budget || err_im > budget)
    {
        std::ostringstream os;
        os.precision(17);
        os << "quadrature oracle failed to converge: error=(" << err_re << "," << err_im
           << ") L1=(" << l1_re << "," << l1_im << ") window=[" << lo << "," << hi
           << "] delay_ps=" << spec.delay_ps;
        throw numerical_error(os.str());
    }
    return {re, im};
}

} // namespace fhom

#endif
