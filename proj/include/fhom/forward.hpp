#ifndef FHOM_FORWARD_HPP
#define FHOM_FORWARD_HPP

#include <cmath>

#include "fhom/config.hpp"
#include "fhom/converter.hpp"
#include "fhom/spectra.hpp"

namespace fhom
{
// Detection probabilities per pulse of the four single-arm events at one pump power.
struct CountRates
{
    double power_mw = 0.0;
    double p_ut = 0.0; // upper input, transition (detected in the lower band)
    double p_us = 0.0; // upper input, staying
    double p_lt = 0.0; // lower input, transition
    double p_ls = 0.0; // lower input, staying
};

// Closed-form width factors shared by the forward model and the estimator.
// q_* multiply the transition/conversion terms, k_* the no-conversion staying terms.
struct RateFactors
{
    double q_ut = 0.0; // 1/sqrt(1 + DinU^2/DW^2 + DinU^2/DoutL^2)
    double q_us = 0.0; // 1/sqrt(1 + DinU^2/DW^2 + DinU^2/DoutU^2)
    double q_lt = 0.0; // 1/sqrt(1 + DinL^2/DW^2 + DinL^2/DoutU^2)
    double q_ls = 0.0; // 1/sqrt(1 + DinL^2/DW^2 + DinL^2/DoutL^2)
    double k_us = 0.0; // 1/sqrt(1 + DinU^2/DoutU^2)
    double k_ls = 0.0; // staying factor of p_Ls, reading-dependent

    static RateFactors from(const Bandwidths& b,
                            StayingTermReading reading = StayingTermReading::structural)
    {
        RateFactors f;
        f.q_ut = overlap_ratio(b.in_upper, {b.converter, b.out_lower});
        f.q_us = overlap_ratio(b.in_upper, {b.converter, b.out_upper});
        f.q_lt = overlap_ratio(b.in_lower, {b.converter, b.out_upper});
        f.q_ls = overlap_ratio(b.in_lower, {b.converter, b.out_lower});
        f.k_us = overlap_ratio(b.in_upper, {b.out_upper});
        f.k_ls = reading == StayingTermReading::structural
                     ? overlap_ratio(b.in_lower, {b.out_lower})
                     : 1.0 / (1.0 + b.in_lower / b.out_lower); // linear-sum variant
        return f;
    }
};

// The four closed-form count-rate expressions at a given internal transition peak.
inline CountRates rates_at_transition(const Bandwidths& bands, const LossBudget& budget,
                                      double r_tilde, double power_mw = 0.0,
                                      StayingTermReading reading = StayingTermReading::structural)
{
    if (!(r_tilde >= 0.0 && r_tilde <= 1.0))
        throw std::domain_error("rates_at_transition: r_tilde must lie in [0,1]");
    const RateFactors f = RateFactors::from(bands, reading);
    CountRates r;
    r.power_mw = power_mw;
    r.p_ut = budget.tl * r_tilde * f.q_ut;
    r.p_us = budget.tu * (f.k_us - r_tilde * f.q_us);
    r.p_lt = budget.mu * budget.tu * r_tilde * f.q_lt;
    r.p_ls = budget.mu * budget.tl * (f.k_ls - r_tilde * f.q_ls);
    return r;
}

inline CountRates predict_rates(const ExperimentConfig& config, double power_mw)
{
    config.validate();
    const double r_tilde = transition_peak(config.pump, power_mw);
    return rates_at_transition(config.effective_bands(), config.budget, r_tilde, power_mw,
                               config.pls_reading);
}

} // namespace fhom

#endif
