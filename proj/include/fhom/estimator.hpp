#ifndef FHOM_ESTIMATOR_HPP
#define FHOM_ESTIMATOR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "fhom/config.hpp"
#include "fhom/converter.hpp"
#include "fhom/forward.hpp"

namespace fhom
{
// Coefficients of A R~^2 + B R~ + C = 0 linking the four measured rates to the
// internal transition probability. The rate ratio that cancels every loss product
// is (p_ut p_lt) / (p_us p_ls): transition product over staying product. BReading
// keeps an alternate second term of B (built from out_lower/converter and
// out_lower/in_lower width ratios) that fails the round-trip consistency check;
// it exists only so the failure stays demonstrable.
struct QuadraticCoefficients
{
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    enum class BReading
    {
        standard,
        alternate
    };

    static QuadraticCoefficients from_rates(const CountRates& r, const Bandwidths& bands,
                                            StayingTermReading reading = StayingTermReading::structural,
                                            BReading b_reading = BReading::standard)
    {
        if (!(r.p_us > 0.0) || !(r.p_ls > 0.0))
            throw degenerate_input_error("quadratic coefficients: staying rates must be positive");
        if (!(r.p_ut >= 0.0) || !(r.p_lt >= 0.0))
            throw degenerate_input_error("quadratic coefficients: transition rates must be nonnegative");

        const RateFactors f = RateFactors::from(bands, reading);
        const double ratio = (r.p_ut * r.p_lt) / (r.p_us * r.p_ls);

        QuadraticCoefficients q;
        q.a = f.q_ut * f.q_lt - ratio * f.q_us * f.q_ls;
        if (b_reading == BReading::standard)
        {
            q.b = ratio * (f.k_us * f.q_ls + f.k_ls * f.q_us);
        }
        else
        {
            const double il = bands.in_lower, ol = bands.out_lower, wg = bands.converter;
            const double second = 1.0 / std::sqrt((1.0 + il * il / (ol * ol)) *
                                                  (1.0 + ol * ol / (wg * wg) + ol * ol / (il * il)));
            q.b = ratio * (f.k_us * f.q_ls + second);
        }
        q.c = -ratio * f.k_us * f.k_ls;
        return q;
    }
};

// Solve the quadratic and return the physical root (-B + sqrt(B^2 - 4AC)) / (2A).
inline double estimate_transition(const CountRates& rates, const Bandwidths& bands,
                                  StayingTermReading reading = StayingTermReading::structural)
{
    const auto q = QuadraticCoefficients::from_rates(rates, bands, reading);
    double root;
    if (std::abs(q.a) < 1e-12 * std::abs(q.b))
    {
        // linear degeneration when the bandwidth ratios cancel A
        root = -q.c / q.b;
    }
    else
    {
        const double disc = q.b * q.b - 4.0 * q.a * q.c;
        if (disc < 0.0)
        {
            std::ostringstream os;
            os.precision(17);
            os << "estimate_transition: negative discriminant " << disc
               << " at power " << rates.power_mw << " mW";
            throw inconsistent_data_error(os.str());
        }
        root = (-q.b + std::sqrt(disc)) / (2.0 * q.a);
    }
    constexpr double tol = 1e-6;
    if (root < -tol || root > 1.0 + tol)
    {
        std::ostringstream os;
        os.precision(17);
        os << "estimate_transition: root " << root << " outside [0,1] at power "
           << rates.power_mw << " mW";
        throw unphysical_data_error(os.str());
    }
    return std::clamp(root, 0.0, 1.0);
}

// The three closed-form loss products given the transition probability.
inline LossBudget estimate_losses(const CountRates& rates, double r_tilde, const Bandwidths& bands,
                                  StayingTermReading reading = StayingTermReading::structural)
{
    if (!(r_tilde > 0.0) || !(r_tilde <= 1.0))
        throw degenerate_input_error("estimate_losses: r_tilde must lie in (0,1]");
    if (!(rates.p_ut > 0.0) || !(rates.p_us >= 0.0))
        throw degenerate_input_error("estimate_losses: p_ut must be positive");
    const RateFactors f = RateFactors::from(bands, reading);
    const double stay_u = f.k_us - r_tilde * f.q_us;
    const double stay_l = f.k_ls - r_tilde * f.q_ls;
    if (!(stay_u > 0.0) || !(stay_l > 0.0))
        throw degenerate_input_error("estimate_losses: staying-term parenthesis vanished");
    LossBudget budget;
    budget.tu = rates.p_us / stay_u;
    budget.tl = rates.p_ut / (r_tilde * f.q_ut);
    budget.mu = (rates.p_ls / rates.p_ut) * r_tilde * f.q_ut / stay_l;
    return budget;
}

// First-order sensitivity of the quadratic root to each of the four rates,
// from implicit differentiation of A R~^2 + B R~ + C = 0. A, B, C are linear in
// the rate ratio, so d/dp enters through d(log ratio)/dp only.
struct TransitionSensitivity
{
    double d_put = 0.0;
    double d_pus = 0.0;
    double d_plt = 0.0;
    double d_pls = 0.0;

    // sigma(R~) for Poisson-limited rates measured over N pulses, times sqrt(N).
    double sigma_scaled_by_sqrt_n(const CountRates& r) const
    {
        auto var = [](double p) { return p * (1.0 - p); };
        return std::sqrt(d_put * d_put * var(r.p_ut) + d_pus * d_pus * var(r.p_us) +
                         d_plt * d_plt * var(r.p_lt) + d_pls * d_pls * var(r.p_ls));
    }
};

inline TransitionSensitivity transition_sensitivity(const CountRates& rates, const Bandwidths& bands,
                                                    StayingTermReading reading = StayingTermReading::structural)
{
    const auto q = QuadraticCoefficients::from_rates(rates, bands, reading);
    const double r = estimate_transition(rates, bands, reading);
    const RateFactors f = RateFactors::from(bands, reading);
    // ratio-independent part of A; B and C are entirely ratio-proportional
    const double a0 = f.q_ut * f.q_lt;
    const double dfd_logratio = (q.a - a0) * r * r + q.b * r + q.c;
    const double dfdr = 2.0 * q.a * r + q.b;
    if (dfdr == 0.0)
        throw degenerate_input_error("transition_sensitivity: stationary root");
    const double droot_dlogratio = -dfd_logratio / dfdr;
    TransitionSensitivity s;
    s.d_put = droot_dlogratio / rates.p_ut;
    s.d_plt = droot_dlogratio / rates.p_lt;
    s.d_pus = -droot_dlogratio / rates.p_us;
    s.d_pls = -droot_dlogratio / rates.p_ls;
    return s;
}

// --- least-squares fit kernels ------------------------------------------------

struct PumpFit
{
    PumpCurve curve;
    double residual_norm = 0.0;
    int iterations = 0;
    bool amplitude_clamped = false; // fitted A exceeded 1 and was clamped
};

namespace detail
{
struct PumpFitCandidate
{
    double a = 0.0;
    double eta = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
};

// The model is linear in A, so A is profiled out analytically and the residual is
// minimized over eta alone; this removes the shallow A*eta valley of the raw
// two-parameter landscape. SSR(eta) = sum y^2 - (sum y s)^2 / sum s^2 with
// s = sin^2(sqrt(eta P)).
inline double profiled_amplitude(std::span<const std::pair<double, double>> samples, double eta)
{
    double ys = 0.0, ss = 0.0;
    for (const auto& [p, y] : samples)
    {
        const double s = std::pow(std::sin(std::sqrt(eta * p)), 2);
        ys += y * s;
        ss += s * s;
    }
    return ss > 0.0 ? ys / ss : 0.0;
}

inline double pump_ssr(std::span<const std::pair<double, double>> samples, double eta, double a)
{
    double ssr = 0.0;
    for (const auto& [p, y] : samples)
    {
        const double r = a * std::pow(std::sin(std::sqrt(eta * p)), 2) - y;
        ssr += r * r;
    }
    return ssr;
}

// golden-section search for eta on a log-spaced bracket around eta_center
inline PumpFitCandidate pump_fit_from(std::span<const std::pair<double, double>> samples,
                                      double eta_center)
{
    auto objective = [&](double log_eta) {
        const double eta = std::exp(log_eta);
        return pump_ssr(samples, eta, profiled_amplitude(samples, eta));
    };
    double lo = std::log(eta_center) - std::log(64.0);
    double hi = std::log(eta_center) + std::log(64.0);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = objective(x1);
    double f2 = objective(x2);
    PumpFitCandidate out;
    int iterations = 0;
    while (hi - lo > 1e-15 && iterations < 400)
    {
        ++iterations;
        if (f1 < f2)
        {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        }
        else
        {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        }
    }
    out.eta = std::exp(0.5 * (lo + hi));
    out.a = profiled_amplitude(samples, out.eta);
    out.residual_norm = std::sqrt(pump_ssr(samples, out.eta, out.a));
    out.iterations = iterations;
    return out;
}
} // namespace detail

// Nonlinear least squares of R~(P) = A sin^2(sqrt(eta P)). The sin^2 landscape
// aliases, so eta is multi-started from the small-angle slope of the first sample.
inline PumpFit fit_pump_curve(std::span<const std::pair<double, double>> samples)
{
    if (samples.size() < 3)
        throw std::invalid_argument("fit_pump_curve: need at least 3 samples");
    double max_y = 0.0;
    double first_p = 0.0, first_y = 0.0;
    std::vector<double> powers;
    for (const auto& [p, y] : samples)
    {
        if (!(p >= 0.0))
            throw std::invalid_argument("fit_pump_curve: powers must be nonnegative");
        powers.push_back(p);
        max_y = std::max(max_y, y);
        if (first_p == 0.0 && p > 0.0 && y > 0.0)
        {
            first_p = p;
            first_y = y;
        }
    }
    std::sort(powers.begin(), powers.end());
    if (std::unique(powers.begin(), powers.end()) - powers.begin() < 3)
        throw std::invalid_argument("fit_pump_curve: need at least 3 distinct powers");

    const double a0 = std::min(max_y, 1.0);
    double eta0 = first_p > 0.0 && a0 > 0.0 ? first_y / (a0 * first_p) : 1e-3;
    if (!(eta0 > 0.0) || !std::isfinite(eta0))
        eta0 = 1e-3;

    const std::array<double, 5> eta_scales = {1.0, 0.5, 2.0, 0.25, 4.0};
    std::optional<detail::PumpFitCandidate> best;
    for (double s : eta_scales)
    {
        const auto r = detail::pump_fit_from(samples, eta0 * s);
        if (!best || r.residual_norm < best->residual_norm)
            best = r;
    }
    if (!std::isfinite(best->residual_norm) || !(best->eta > 0.0))
    {
        std::ostringstream os;
        os.precision(17);
        os << "fit_pump_curve: search failed to converge; best iterate A=" << best->a
           << " eta=" << best->eta << " residual=" << best->residual_norm;
        throw fit_error(os.str());
    }
    PumpFit fit;
    fit.curve.amplitude = best->a;
    fit.curve.rate_per_mw = best->eta;
    fit.residual_norm = best->residual_norm;
    fit.iterations = best->iterations;
    if (fit.curve.amplitude > 1.0)
    {
        // physical probability bound; noise can push the fitted peak slightly past 1
        fit.curve.amplitude = 1.0;
        fit.amplitude_clamped = true;
    }
    return fit;
}

struct NoiseFit
{
    NoiseModel model;
    double residual_upper = 0.0;
    double residual_lower = 0.0;
};

namespace detail
{
// ordinary least squares on a polynomial design, solved by Gaussian elimination
inline std::vector<double> ols_poly(std::span<const std::pair<double, double>> samples, int degree)
{
    const int n = degree + 1;
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> rhs(n, 0.0);
    for (const auto& [x, y] : samples)
    {
        std::vector<double> row(n);
        double v = 1.0;
        for (int j = 0; j < n; ++j)
        {
            row[j] = v;
            v *= x;
        }
        for (int i = 0; i < n; ++i)
        {
            rhs[i] += row[i] * y;
            for (int j = 0; j < n; ++j)
                m[i * n + j] += row[i] * row[j];
        }
    }
    // partial pivoting
    for (int col = 0; col < n; ++col)
    {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(m[r * n + col]) > std::abs(m[pivot * n + col]))
                pivot = r;
        if (std::abs(m[pivot * n + col]) < 1e-250)
            throw fit_error("fit_noise: rank-deficient design matrix");
        if (pivot != col)
        {
            for (int j = 0; j < n; ++j)
                std::swap(m[pivot * n + j], m[col * n + j]);
            std::swap(rhs[pivot], rhs[col]);
        }
        for (int r = col + 1; r < n; ++r)
        {
            const double f = m[r * n + col] / m[col * n + col];
            for (int j = col; j < n; ++j)
                m[r * n + j] -= f * m[col * n + j];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> coeff(n, 0.0);
    for (int i = n - 1; i >= 0; --i)
    {
        double s = rhs[i];
        for (int j = i + 1; j < n; ++j)
            s -= m[i * n + j] * coeff[j];
        coeff[i] = s / m[i * n + i];
    }
    return coeff;
}

inline double poly_residual(std::span<const std::pair<double, double>> samples,
                            std::span<const double> coeff)
{
    double rn = 0.0;
    for (const auto& [x, y] : samples)
    {
        double v = 0.0;
        double xp = 1.0;
        for (double c : coeff)
        {
            v += c * xp;
            xp *= x;
        }
        rn += (v - y) * (v - y);
    }
    return std::sqrt(rn);
}
} // namespace detail

// OLS fits of d_U(P) = A P^2 + B P + C and d_L(P) = D P + E.
inline NoiseFit fit_noise(std::span<const std::pair<double, double>> samples_u,
                          std::span<const std::pair<double, double>> samples_l)
{
    if (samples_u.size() < 3)
        throw std::invalid_argument("fit_noise: need at least 3 upper-noise samples");
    if (samples_l.size() < 2)
        throw std::invalid_argument("fit_noise: need at least 2 lower-noise samples");
    const auto cu = detail::ols_poly(samples_u, 2);
    const auto cl = detail::ols_poly(samples_l, 1);
    NoiseFit fit;
    fit.model.du_const = cu[0];
    fit.model.du_lin_per_mw = cu[1];
    fit.model.du_quad_per_mw2 = cu[2];
    fit.model.dl_const = cl[0];
    fit.model.dl_lin_per_mw = cl[1];
    fit.residual_upper = detail::poly_residual(samples_u, cu);
    fit.residual_lower = detail::poly_residual(samples_l, cl);
    return fit;
}

// --- calibration orchestration --------------------------------------------------

struct PowerEstimate
{
    double power_mw = 0.0;
    double r_tilde = 0.0;
    LossBudget budget;
    TransitionSensitivity sensitivity;
    double sigma_r_sqrt_n = 0.0; // multiply by 1/sqrt(N pulses) for an error bar
};

struct CalibrationResult
{
    std::vector<PowerEstimate> per_power;
    LossBudget budget_mean;
    LossBudget budget_stddev;
    double budget_max_rel_spread = 0.0; // worst relative deviation from the mean
    PumpFit pump;
    std::optional<NoiseFit> noise;
};

inline CalibrationResult calibrate(std::span<const CountRates> rates, const Bandwidths& bands,
                                   StayingTermReading reading = StayingTermReading::structural,
                                   std::span<const std::pair<double, double>> noise_u = {},
                                   std::span<const std::pair<double, double>> noise_l = {})
{
    if (rates.empty())
        throw std::invalid_argument("calibrate: no measurement rows");
    CalibrationResult out;
    std::vector<std::pair<double, double>> pump_samples;
    for (const auto& r : rates)
    {
        PowerEstimate est;
        est.power_mw = r.power_mw;
        est.r_tilde = estimate_transition(r, bands, reading);
        est.budget = estimate_losses(r, est.r_tilde, bands, reading);
        est.sensitivity = transition_sensitivity(r, bands, reading);
        est.sigma_r_sqrt_n = est.sensitivity.sigma_scaled_by_sqrt_n(r);
        pump_samples.emplace_back(r.power_mw, est.r_tilde);
        out.per_power.push_back(est);
    }
    const double n = static_cast<double>(out.per_power.size());
    for (const auto& e : out.per_power)
    {
        out.budget_mean.tu += e.budget.tu / n;
        out.budget_mean.tl += e.budget.tl / n;
        out.budget_mean.mu += e.budget.mu / n;
    }
    for (const auto& e : out.per_power)
    {
        const double du = e.budget.tu - out.budget_mean.tu;
        const double dl = e.budget.tl - out.budget_mean.tl;
        const double dm = e.budget.mu - out.budget_mean.mu;
        out.budget_stddev.tu += du * du / n;
        out.budget_stddev.tl += dl * dl / n;
        out.budget_stddev.mu += dm * dm / n;
        out.budget_max_rel_spread =
            std::max({out.budget_max_rel_spread, std::abs(du) / std::max(out.budget_mean.tu, 1e-300),
                      std::abs(dl) / std::max(out.budget_mean.tl, 1e-300),
                      std::abs(dm) / std::max(out.budget_mean.mu, 1e-300)});
    }
    out.budget_stddev.tu = std::sqrt(out.budget_stddev.tu);
    out.budget_stddev.tl = std::sqrt(out.budget_stddev.tl);
    out.budget_stddev.mu = std::sqrt(out.budget_stddev.mu);
    if (pump_samples.size() >= 3)
        out.pump = fit_pump_curve(pump_samples);
    if (!noise_u.empty() || !noise_l.empty())
        out.noise = fit_noise(noise_u, noise_l);
    return out;
}

} // namespace fhom

#endif
