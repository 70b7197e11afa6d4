#ifndef FHOM_HOM_HPP
#define FHOM_HOM_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fhom/config.hpp"
#include "fhom/converter.hpp"
#include "fhom/forward.hpp"
#include "fhom/spectra.hpp"

namespace fhom
{
struct NoClickProbs
{
    double p_u0 = 0.0;   // no click in the upper output mode
    double p_l0 = 0.0;   // no click in the lower output mode
    double p_u0l0 = 0.0; // no click in either
};

namespace detail
{
struct HomTerms
{
    double e_u = 0.0;   // int F_L R tu G_outU   (upper-arm exposure to the lower input)
    double e_l = 0.0;   // int F_L T tl G_outL
    double s_u = 0.0;   // int F_U (1 - T tu G_outU)
    double s_l = 0.0;   // int F_U (1 - R tl G_outL)
    double s_ul = 0.0;  // int F_U (1 - T tu G_outU - R tl G_outL)
    double j_uu = 0.0;  // tu * int e^{-i w tau} sqrt(F_U F_L T R) G_outU, real for centered profiles
    double j_ll = 0.0;
    double weight = 0.0; // mu for coherent input, T_inL/T_inU for twin photons
    double d_u = 0.0;
    double d_l = 0.0;
    bool coherent = true;
};

// Interference integral of the dip: int e^{-i 2 pi nu tau} sqrt(F_U F_L T R) G_out dnu.
inline double dip_integral(const Bandwidths& fwhm, double r_tilde, double out_fwhm, double delay_ps)
{
    OverlapSpec spec;
    spec.delay_ps = delay_ps;
    spec.factors.push_back({GaussianProfile::normalized(fwhm.in_upper), 0.5, false});
    spec.factors.push_back({GaussianProfile::normalized(fwhm.in_lower), 0.5, false});
    spec.factors.push_back({GaussianProfile::response(fwhm.converter, r_tilde), 0.5, false});
    spec.factors.push_back({GaussianProfile::response(fwhm.converter, r_tilde), 0.5, true});
    spec.factors.push_back({GaussianProfile::response(out_fwhm, 1.0), 1.0, false});
    // centered symmetric profiles make the integral real for every delay
    return interference_integral(spec).real();
}

inline HomTerms hom_terms(const ExperimentConfig& config, double power_mw,
                          std::optional<double> delay_ps)
{
    config.validate();
    if (!(power_mw >= 0.0))
        throw std::domain_error("hom: pump power must be nonnegative");

    const Bandwidths quoted = config.effective_bands();
    const double r_tilde = std::clamp(transition_peak(config.pump, power_mw), 0.0, 1.0);
    const RateFactors f = RateFactors::from(quoted); // width ratios, convention-free

    HomTerms t;
    t.d_u = std::clamp(config.noise.d_upper(power_mw), 0.0, 1.0);
    t.d_l = std::clamp(config.noise.d_lower(power_mw), 0.0, 1.0);
    t.e_u = config.budget.tu * r_tilde * f.q_lt;
    t.e_l = config.budget.tl * (f.k_ls - r_tilde * f.q_ls);
    t.s_u = 1.0 - config.budget.tu * (f.k_us - r_tilde * f.q_us);
    t.s_l = 1.0 - config.budget.tl * r_tilde * f.q_ut;
    t.s_ul = t.s_u + t.s_l - 1.0;

    t.coherent = config.input == InputKind::coherent_lower;
    if (t.coherent)
        t.weight = config.equalize_input_loss ? config.mean_photon_number : config.budget.mu;
    else
        t.weight = config.equalize_input_loss ? 1.0 : config.budget.mu / config.mean_photon_number;

    if (!t.coherent && (t.weight * t.e_u > 1.0 || t.weight * t.e_l > 1.0))
        throw config_error("hom: single-photon loss ratio T_in,L/T_in,U exceeds the physical bound");

    if (delay_ps)
    {
        if (!std::isfinite(*delay_ps))
            throw std::domain_error("hom: delay must be finite");
        const Bandwidths fw = config.fwhm_bands();
        t.j_uu = config.budget.tu * dip_integral(fw, r_tilde, fw.out_upper, *delay_ps);
        t.j_ll = config.budget.tl * dip_integral(fw, r_tilde, fw.out_lower, *delay_ps);
    }
    return t;
}

inline NoClickProbs assemble_no_click(const HomTerms& t)
{
    NoClickProbs p;
    const double w = t.weight;
    const double j_diff = t.j_uu - t.j_ll;
    if (t.coherent)
    {
        p.p_u0 = (1.0 - t.d_u) * std::exp(-w * t.e_u) * (t.s_u + w * t.j_uu * t.j_uu);
        p.p_l0 = (1.0 - t.d_l) * std::exp(-w * t.e_l) * (t.s_l + w * t.j_ll * t.j_ll);
        p.p_u0l0 = (1.0 - t.d_u) * (1.0 - t.d_l) * std::exp(-w * (t.e_u + t.e_l)) *
                   (t.s_ul + w * j_diff * j_diff);
    }
    else
    {
        p.p_u0 = (1.0 - t.d_u) * (t.s_u * (1.0 - w * t.e_u) + w * t.j_uu * t.j_uu);
        p.p_l0 = (1.0 - t.d_l) * (t.s_l * (1.0 - w * t.e_l) + w * t.j_ll * t.j_ll);
        p.p_u0l0 = (1.0 - t.d_u) * (1.0 - t.d_l) *
                   (t.s_ul * (1.0 - w * (t.e_u + t.e_l)) + w * j_diff * j_diff);
    }
    return p;
}
} // namespace detail

// No-click probabilities at given transition peak and noise, delay nullopt meaning
// the tau -> infinity limit (interference integrals exactly zero). This is the entry
// point the flat-spectrum oracle comparison drives directly.
inline NoClickProbs no_click_probs_at(const ExperimentConfig& config, double power_mw,
                                      std::optional<double> delay_ps)
{
    return detail::assemble_no_click(detail::hom_terms(config, power_mw, delay_ps));
}

inline NoClickProbs no_click_probs(const ExperimentConfig& config, double power_mw, double delay_ps)
{
    return no_click_probs_at(config, power_mw, delay_ps);
}

inline NoClickProbs no_click_probs_tail(const ExperimentConfig& config, double power_mw)
{
    return no_click_probs_at(config, power_mw, std::nullopt);
}

inline double coincidence_from(const NoClickProbs& p)
{
    return 1.0 - p.p_u0 - p.p_l0 + p.p_u0l0;
}

inline double coincidence(const ExperimentConfig& config, double power_mw, double delay_ps)
{
    return coincidence_from(no_click_probs(config, power_mw, delay_ps));
}

inline double coincidence_tail(const ExperimentConfig& config, double power_mw)
{
    return coincidence_from(no_click_probs_tail(config, power_mw));
}

// Dip visibility 1 - p_c(0) / p_c(inf); the baseline is the analytic tau -> inf limit.
inline double visibility(const ExperimentConfig& config, double power_mw)
{
    const double tail = coincidence_tail(config, power_mw);
    if (!(tail > 0.0))
        throw degenerate_input_error("visibility: coincidence probability vanishes at infinite delay");
    return 1.0 - coincidence(config, power_mw, 0.0) / tail;
}

struct DipCurve
{
    std::vector<double> delay_ps;
    std::vector<double> p_c;
    double visibility = 0.0;
    double fwhm_ps = std::numeric_limits<double>::quiet_NaN();
};

namespace detail
{
// width of the dip at half depth, by linear interpolation on each flank
inline double dip_fwhm(std::span<const double> delay, std::span<const double> pc, double tail,
                       double dip_floor)
{
    const double half = 0.5 * (dip_floor + tail);
    if (!(tail - dip_floor > 0.0))
        return std::numeric_limits<double>::quiet_NaN();
    auto cross = [&](bool right) -> double {
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(delay.size());
        std::ptrdiff_t center = std::min_element(pc.begin(), pc.end()) - pc.begin();
        const std::ptrdiff_t step = right ? 1 : -1;
        for (std::ptrdiff_t i = center; i + step >= 0 && i + step < n; i += step)
        {
            const double a = pc[static_cast<std::size_t>(i)];
            const double b = pc[static_cast<std::size_t>(i + step)];
            if ((a - half) * (b - half) <= 0.0 && a != b)
            {
                const double frac = (half - a) / (b - a);
                return delay[static_cast<std::size_t>(i)] +
                       frac * (delay[static_cast<std::size_t>(i + step)] -
                               delay[static_cast<std::size_t>(i)]);
            }
        }
        return std::numeric_limits<double>::quiet_NaN();
    };
    return cross(true) - cross(false);
}
} // namespace detail

// Sample the coincidence dip over a symmetric delay range.
inline DipCurve dip_scan(const ExperimentConfig& config, double power_mw, double tau_min_ps,
                         double tau_max_ps, int n_points)
{
    if (n_points < 3)
        throw std::domain_error("dip_scan: need at least 3 points");
    if (!(tau_max_ps > 0.0) || std::abs(tau_min_ps + tau_max_ps) > 1e-9 * tau_max_ps)
        throw std::domain_error("dip_scan: delay range must be symmetric about zero");
    DipCurve curve;
    curve.delay_ps.reserve(static_cast<std::size_t>(n_points));
    curve.p_c.reserve(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i)
    {
        const double tau = tau_min_ps + (tau_max_ps - tau_min_ps) * i / (n_points - 1);
        curve.delay_ps.push_back(tau);
        curve.p_c.push_back(coincidence(config, power_mw, tau));
    }
    const double tail = coincidence_tail(config, power_mw);
    const double dip_floor = coincidence(config, power_mw, 0.0);
    curve.visibility = tail > 0.0 ? 1.0 - dip_floor / tail : 0.0;
    curve.fwhm_ps = detail::dip_fwhm(curve.delay_ps, curve.p_c, tail, dip_floor);
    return curve;
}

inline std::vector<std::pair<double, double>> visibility_sweep(const ExperimentConfig& config,
                                                               std::span<const double> powers_mw)
{
    std::vector<std::pair<double, double>> out;
    out.reserve(powers_mw.size());
    for (double p : powers_mw)
        out.emplace_back(p, visibility(config, p));
    return out;
}

} // namespace fhom

#endif
