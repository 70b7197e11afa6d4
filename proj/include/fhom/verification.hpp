#ifndef FHOM_VERIFICATION_HPP
#define FHOM_VERIFICATION_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "fhom/fock_oracle.hpp"
#include "fhom/hom.hpp"
#include "fhom/spectra.hpp"

namespace fhom
{
namespace detail
{
// mt19937_64 with a fixed uniform mapping so reports are identical across toolchains
struct CheckRng
{
    std::mt19937_64 eng;
    explicit CheckRng(std::uint64_t seed) : eng(seed) {}
    double uniform(double lo, double hi)
    {
        const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
    int pick(int n) { return static_cast<int>(eng() % static_cast<std::uint64_t>(n)); }
};
} // namespace detail

struct SpectralCheckReport
{
    int cases = 0;
    double max_rel_dev = 0.0;
    double tolerance = 1e-9;
    std::string worst_case;
    bool pass() const { return max_rel_dev < tolerance; }
};

// Closed form vs adaptive quadrature over random width/delay combinations, both for
// plain Gaussian products and for dip-style integrands with the staying factor.
// Deviations are measured relative to the zero-delay magnitude of the same spec.
inline SpectralCheckReport run_spectral_check(std::uint64_t seed, int n_cases = 1000)
{
    detail::CheckRng rng(seed);
    SpectralCheckReport report;
    report.cases = n_cases;
    for (int i = 0; i < n_cases; ++i)
    {
        OverlapSpec spec;
        spec.delay_ps = rng.uniform(-20.0, 20.0);
        const bool with_complement = i % 2 == 1;
        std::ostringstream desc;
        desc.precision(17);
        if (with_complement)
        {
            const double in_u = rng.uniform(10.0, 1000.0);
            const double in_l = rng.uniform(10.0, 1000.0);
            const double wg = rng.uniform(10.0, 1000.0);
            const double out = rng.uniform(10.0, 1000.0);
            const double peak = rng.uniform(0.05, 0.95);
            spec.factors.push_back({GaussianProfile::normalized(in_u), 0.5, false});
            spec.factors.push_back({GaussianProfile::normalized(in_l), 0.5, false});
            spec.factors.push_back({GaussianProfile::response(wg, peak), 0.5, false});
            spec.factors.push_back({GaussianProfile::response(wg, peak), 0.5, true});
            spec.factors.push_back({GaussianProfile::response(out, 1.0), 1.0, false});
            desc << "dip-style widths=(" << in_u << "," << in_l << "," << wg << "," << out
                 << ") peak=" << peak;
        }
        else
        {
            const int n_factors = 2 + rng.pick(3);
            spec.factors.push_back({GaussianProfile::normalized(rng.uniform(10.0, 1000.0)),
                                    rng.pick(2) == 0 ? 1.0 : 0.5, false});
            for (int k = 1; k < n_factors; ++k)
                spec.factors.push_back(
                    {GaussianProfile::response(rng.uniform(10.0, 1000.0), rng.uniform(0.1, 1.0)),
                     rng.pick(2) == 0 ? 1.0 : 0.5, false});
            desc << "product of " << n_factors << " gaussians";
        }
        desc << " delay_ps=" << spec.delay_ps;

        OverlapSpec at_zero = spec;
        at_zero.delay_ps = 0.0;
        const double scale = std::abs(interference_integral(at_zero));
        const auto cf = interference_integral(spec);
        const auto q = quadrature_oracle(spec);
        const double dev = std::abs(cf - q) / std::max(scale, 1e-300);
        if (dev > report.max_rel_dev)
        {
            report.max_rel_dev = dev;
            report.worst_case = desc.str();
        }
    }
    return report;
}

struct FockCheckReport
{
    int cases = 0;
    double max_abs_dev = 0.0;
    double tolerance = 1e-7;
    std::string worst_case;
    bool pass() const { return max_abs_dev < tolerance; }
};

// Analytic no-click closed forms vs brute-force Fock evolution in the
// single-frequency-bin (flat spectrum) limit, both input kinds.
inline FockCheckReport run_fock_check(std::uint64_t seed, int n_cases = 200, int n_max = 12)
{
    detail::CheckRng rng(seed);
    FockCheckReport report;
    report.cases = n_cases;
    const double inf = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_cases; ++i)
    {
        NetworkParams net;
        net.r_tilde = rng.uniform(0.02, 0.98);
        net.t_in_u = rng.uniform(0.05, 1.0);
        net.t_in_l = rng.uniform(0.05, 1.0);
        net.t_out_u = rng.uniform(0.05, 1.0);
        net.t_out_l = rng.uniform(0.05, 1.0);
        net.pump_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double alpha_sq = rng.uniform(0.01, 0.5);
        const InputKind kind =
            i % 2 == 0 ? InputKind::coherent_lower : InputKind::single_photon_lower;

        const auto evolved = apply_network(prepare(kind, alpha_sq, n_max), net);
        const auto oracle = no_click_probs_oracle(evolved);

        ExperimentConfig config;
        config.bands = {100.0, 100.0, inf, inf, inf}; // identical inputs, flat responses
        config.budget.tu = net.t_in_u * net.t_out_u;
        config.budget.tl = net.t_in_u * net.t_out_l;
        config.budget.mu = alpha_sq * net.t_in_l / net.t_in_u;
        config.pump = {net.r_tilde, std::numbers::pi * std::numbers::pi / 4.0}; // peak at P = 1
        config.input = kind;
        config.mean_photon_number = alpha_sq;
        const auto analytic = no_click_probs(config, 1.0, 0.0);

        const double dev = std::max({std::abs(analytic.p_u0 - oracle.p_u0),
                                     std::abs(analytic.p_l0 - oracle.p_l0),
                                     std::abs(analytic.p_u0l0 - oracle.p_u0l0)});
        if (dev > report.max_abs_dev)
        {
            report.max_abs_dev = dev;
            std::ostringstream os;
            os.precision(17);
            os << (kind == InputKind::coherent_lower ? "coherent" : "single-photon")
               << " r_tilde=" << net.r_tilde << " t_in=(" << net.t_in_u << "," << net.t_in_l
               << ") t_out=(" << net.t_out_u << "," << net.t_out_l << ") alpha_sq=" << alpha_sq
               << " phase=" << net.pump_phase;
            report.worst_case = os.str();
        }
    }
    return report;
}

} // namespace fhom

#endif
