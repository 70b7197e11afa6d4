// Acceptance suite: drives the bundled paper configuration through the model and
// checks every headline number, round trip, and oracle bound at its stated
// tolerance. Prints one pass/fail line per criterion; exits nonzero on any failure.
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "fhom/config_io.hpp"
#include "fhom/fhom.hpp"

using namespace fhom;

namespace
{
int failures = 0;

struct Timer
{
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int criterion, bool pass, const std::string& detail, double seconds,
            double budget_seconds)
{
    const bool in_time = seconds < budget_seconds;
    if (!pass || !in_time)
        ++failures;
    std::printf("[%s] criterion %d: %s  [%.2f s / %.0f s]%s\n",
                pass && in_time ? "PASS" : "FAIL", criterion, detail.c_str(), seconds,
                budget_seconds, in_time ? "" : " (over time budget)");
}

std::string fmt(const char* pattern, ...)
{
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return buf;
}

double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
} // namespace

int main(int argc, char** argv)
{
    const std::string config_path = argc > 1 ? argv[1] : "configs/paper.json";
    ExperimentConfig paper;
    try
    {
        paper = load_config(config_path);
    }
    catch (const std::exception& e)
    {
        std::fprintf(stderr, "cannot load %s: %s\n", config_path.c_str(), e.what());
        return 2;
    }

    // 1. peak of the visibility sweep: 190 +- 20 mW, V_max 0.81 +- 0.02
    {
        Timer t;
        double best_p = 0.0, best_v = 0.0;
        for (double p = 1.0; p <= 350.0; p += 1.0)
        {
            const double v = visibility(paper, p);
            if (v > best_v)
            {
                best_v = v;
                best_p = p;
            }
        }
        const bool pass = best_p >= 170.0 && best_p <= 210.0 && std::abs(best_v - 0.81) <= 0.02;
        report(1, pass,
               fmt("peak visibility — argmax %.0f mW (target 190±20), Vmax %.4f (target 0.81±0.02)",
                   best_p, best_v),
               t.seconds(), 10.0);
    }

    // 2. what-if predictions at 190 mW: 0.95, 0.93, 0.98, each +- 0.01
    {
        Timer t;
        auto single = paper;
        single.input = InputKind::single_photon_lower;
        single.equalize_input_loss = true;
        auto narrowed = paper;
        narrowed.narrow_upper_input = true;
        auto both = single;
        both.narrow_upper_input = true;
        const double v_single = visibility(single, 190.0);
        const double v_band = visibility(narrowed, 190.0);
        const double v_both = visibility(both, 190.0);
        const bool pass = std::abs(v_single - 0.95) <= 0.01 && std::abs(v_band - 0.93) <= 0.01 &&
                          std::abs(v_both - 0.98) <= 0.01;
        report(2, pass,
               fmt("what-ifs at 190 mW — single-photon %.4f (0.95±0.01), bandwidth %.4f "
                   "(0.93±0.01), both %.4f (0.98±0.01)",
                   v_single, v_band, v_both),
               t.seconds(), 5.0);
    }

    // 3. 140 mW dip: visibility 0.71 +- 0.05 and FWHM 6 +- 2 ps; if the default FWHM
    //    width convention misses the band, the sensitivity table below must name a
    //    convention that lands, and the bundled config must pin it.
    {
        Timer t;
        const struct
        {
            BandwidthConvention convention;
            const char* name;
        } conventions[] = {{BandwidthConvention::fwhm, "fwhm"},
                           {BandwidthConvention::hwhm, "hwhm"},
                           {BandwidthConvention::half_e, "half_e"},
                           {BandwidthConvention::half_e2, "half_e2"},
                           {BandwidthConvention::rms_sigma, "rms_sigma"}};
        double fwhm_by_convention[5] = {};
        double vis_140 = 0.0;
        bool any_convention_lands = false;
        for (int i = 0; i < 5; ++i)
        {
            auto cfg = paper;
            cfg.convention = conventions[i].convention;
            const auto curve = dip_scan(cfg, 140.0, -40.0, 40.0, 1601);
            fwhm_by_convention[i] = curve.fwhm_ps;
            vis_140 = curve.visibility;
            if (std::abs(curve.fwhm_ps - 6.0) <= 2.0)
                any_convention_lands = true;
        }
        auto pinned = dip_scan(paper, 140.0, -40.0, 40.0, 1601);
        const bool fwhm_convention_ok = std::abs(fwhm_by_convention[0] - 6.0) <= 2.0;
        const bool pinned_ok = std::abs(pinned.fwhm_ps - 6.0) <= 2.0;
        const bool vis_ok = std::abs(vis_140 - 0.71) <= 0.05;
        const bool pass = vis_ok && (fwhm_convention_ok || (any_convention_lands && pinned_ok));
        report(3, pass,
               fmt("140 mW dip — visibility %.4f (0.71±0.05), FWHM %.3f ps under the pinned '%s' "
                   "convention (6±2 ps)",
                   vis_140, pinned.fwhm_ps, convention_name(paper.convention).c_str()),
               t.seconds(), 60.0);
        std::printf("    sensitivity: dip FWHM by bandwidth convention at 140 mW\n");
        for (int i = 0; i < 5; ++i)
            std::printf("      %-9s %8.4f ps  %s%s\n", conventions[i].name, fwhm_by_convention[i],
                        std::abs(fwhm_by_convention[i] - 6.0) <= 2.0 ? "within 6±2"
                                                                     : "outside 6±2",
                        conventions[i].convention == paper.convention ? "  <- pinned" : "");
    }

    // 4. sweep passes the experimental bands at 50 and 290 mW
    {
        Timer t;
        const double v50 = visibility(paper, 50.0);
        const double v290 = visibility(paper, 290.0);
        const bool pass = std::abs(v50 - 0.34) <= 0.10 && std::abs(v290 - 0.65) <= 0.10;
        report(4, pass,
               fmt("experimental bands — V(50) %.4f (0.34±0.10), V(290) %.4f (0.65±0.10)", v50,
                   v290),
               t.seconds(), 5.0);
    }

    // 5. estimator round trip over 500 random configurations, plus power-independence
    {
        Timer t;
        std::mt19937_64 rng(20250810);
        double worst_rel = 0.0;
        const Bandwidths bands = paper.effective_bands();
        for (int i = 0; i < 500; ++i)
        {
            const LossBudget truth{uniform(rng, 0.01, 1.0), uniform(rng, 0.01, 1.0),
                                   uniform(rng, 0.01, 1.0)};
            const double rt = uniform(rng, 0.05, 0.95);
            const auto rates = rates_at_transition(bands, truth, rt);
            const double rt_est = estimate_transition(rates, bands);
            const auto est = estimate_losses(rates, rt_est, bands);
            worst_rel = std::max({worst_rel, std::abs(rt_est - rt) / rt,
                                  std::abs(est.tu - truth.tu) / truth.tu,
                                  std::abs(est.tl - truth.tl) / truth.tl,
                                  std::abs(est.mu - truth.mu) / truth.mu});
        }
        double worst_spread = 0.0;
        for (int i = 0; i < 20; ++i)
        {
            const LossBudget truth{uniform(rng, 0.05, 0.9), uniform(rng, 0.05, 0.9),
                                   uniform(rng, 0.05, 0.9)};
            const PumpCurve pump{uniform(rng, 0.5, 0.99), uniform(rng, 0.002, 0.006)};
            std::vector<CountRates> rates;
            for (double p = 20.0; p <= 300.0; p += 28.0)
                rates.push_back(rates_at_transition(bands, truth, transition_peak(pump, p), p));
            const auto cal = calibrate(rates, bands);
            worst_spread = std::max(worst_spread, cal.budget_max_rel_spread);
        }
        const bool pass = worst_rel < 1e-9 && worst_spread < 1e-9;
        report(5, pass,
               fmt("estimator round trip — worst relative error %.2e (tol 1e-9), worst per-power "
                   "budget spread %.2e (tol 1e-9)",
                   worst_rel, worst_spread),
               t.seconds(), 5.0);
    }

    // 6. oracle equivalence: spectral closed form vs quadrature, analytic vs fock
    {
        Timer t;
        const auto spectral = run_spectral_check(12345, 1000);
        const auto fock = run_fock_check(12346, 200);
        const bool pass = spectral.pass() && fock.pass();
        report(6, pass,
               fmt("oracle equivalence — spectral max dev %.2e (tol 1e-9, n=1000), fock max dev "
                   "%.2e (tol 1e-7, n=200)",
                   spectral.max_rel_dev, fock.max_abs_dev),
               t.seconds(), 60.0);
        if (!spectral.pass())
            std::printf("    worst spectral case: %s\n", spectral.worst_case.c_str());
        if (!fock.pass())
            std::printf("    worst fock case: %s\n", fock.worst_case.c_str());
    }

    // 7. exact HOM null for the ideal balanced lossless twin-photon interferometer
    {
        Timer t;
        ExperimentConfig ideal;
        ideal.bands = {120.0, 120.0, std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity()};
        ideal.budget = {1.0, 1.0, 1.0};
        ideal.pump = {0.5, std::numbers::pi * std::numbers::pi / 4.0}; // R = 1/2 at P = 1
        ideal.input = InputKind::single_photon_lower;
        ideal.mean_photon_number = 1.0;
        const double pc0 = coincidence(ideal, 1.0, 0.0);
        const double vis = visibility(ideal, 1.0);
        const bool pass = std::abs(pc0) <= 1e-12 && std::abs(vis - 1.0) <= 1e-12;
        report(7, pass, fmt("exact HOM null — p_c(0) = %.2e (tol 1e-12), |V-1| = %.2e (tol 1e-12)",
                            pc0, std::abs(vis - 1.0)),
               t.seconds(), 5.0);
    }

    // 8. fit recovery: pump curve within 1e-6, noise coefficients within 1e-10
    {
        Timer t;
        std::vector<std::pair<double, double>> pump_samples;
        for (double p = 20.0; p <= 300.0; p += 20.0)
            pump_samples.emplace_back(p, transition_peak({0.99, 0.0036}, p));
        const auto pump_fit_result = fit_pump_curve(pump_samples);
        const double pump_err = std::max(std::abs(pump_fit_result.curve.amplitude - 0.99),
                                         std::abs(pump_fit_result.curve.rate_per_mw - 0.0036));
        NoiseModel fig_s2;
        fig_s2.du_quad_per_mw2 = 9.5e-8;
        fig_s2.dl_lin_per_mw = 2.5e-5;
        fig_s2.dl_const = 6.1e-4;
        std::vector<std::pair<double, double>> su, sl;
        for (double p = 0.0; p <= 300.0; p += 25.0)
        {
            su.emplace_back(p, fig_s2.d_upper(p));
            sl.emplace_back(p, fig_s2.d_lower(p));
        }
        const auto noise_fit_result = fit_noise(su, sl);
        const double noise_err =
            std::max({std::abs(noise_fit_result.model.du_quad_per_mw2 - fig_s2.du_quad_per_mw2),
                      std::abs(noise_fit_result.model.du_lin_per_mw),
                      std::abs(noise_fit_result.model.du_const),
                      std::abs(noise_fit_result.model.dl_lin_per_mw - fig_s2.dl_lin_per_mw),
                      std::abs(noise_fit_result.model.dl_const - fig_s2.dl_const)});
        const bool pass = pump_err < 1e-6 && noise_err < 1e-10;
        report(8, pass,
               fmt("fit recovery — pump-curve error %.2e (tol 1e-6), noise-coefficient error "
                   "%.2e (tol 1e-10)",
                   pump_err, noise_err),
               t.seconds(), 5.0);
    }

    if (failures == 0)
        std::printf("all acceptance criteria satisfied\n");
    else
        std::printf("%d criterion(s) FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
