#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "fhom/forward.hpp"

using namespace fhom;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();

ExperimentConfig paper_config()
{
    ExperimentConfig cfg;
    cfg.bands = {740.0, 93.0, 140.0, 70.0, 92.0};
    cfg.budget = {0.078, 0.081, 0.047};
    cfg.pump = {0.99, 0.0036};
    return cfg;
}
} // namespace

TEST_CASE("no conversion means no transition counts", "[forward]")
{
    auto cfg = paper_config();
    const auto r = predict_rates(cfg, 0.0);
    CHECK(r.p_ut == 0.0);
    CHECK(r.p_lt == 0.0);
    CHECK(r.p_us > 0.0);
    CHECK(r.p_ls > 0.0);
}

TEST_CASE("lossless full conversion through flat responses", "[forward]")
{
    ExperimentConfig cfg;
    cfg.bands = {100.0, 100.0, kInf, kInf, kInf};
    cfg.budget = {1.0, 1.0, 1.0};
    cfg.pump = {1.0, std::numbers::pi * std::numbers::pi / 4.0}; // R~ = 1 at P = 1
    const auto r = predict_rates(cfg, 1.0);
    CHECK_THAT(r.p_ut, WithinAbs(1.0, 1e-12));
    CHECK_THAT(r.p_us, WithinAbs(0.0, 1e-12));
    CHECK_THAT(r.p_lt, WithinAbs(1.0, 1e-12));
    CHECK_THAT(r.p_ls, WithinAbs(0.0, 1e-12));
}

TEST_CASE("paper-parameter regression goldens", "[forward]")
{
    // frozen from the first verified run, cross-checked against an independent
    // quadrature evaluation of the count-rate overlap integrals
    auto cfg = paper_config();
    const auto r50 = predict_rates(cfg, 50.0);
    CHECK_THAT(r50.p_ut, WithinRel(0.0014042832907994729, 1e-12));
    CHECK_THAT(r50.p_us, WithinRel(0.0062424005678441219, 1e-12));
    CHECK_THAT(r50.p_lt, WithinRel(0.00034346066345525088, 1e-12));
    CHECK_THAT(r50.p_ls, WithinRel(0.0022704248631125771, 1e-12));
    const auto r140 = predict_rates(cfg, 140.0);
    CHECK_THAT(r140.p_ut, WithinRel(0.0035204695343459356, 1e-12));
    CHECK_THAT(r140.p_us, WithinRel(0.0045799527002631556, 1e-12));
    CHECK_THAT(r140.p_lt, WithinRel(0.00086103908653080647, 1e-12));
    CHECK_THAT(r140.p_ls, WithinRel(0.001657185539192954, 1e-12));
    const auto r290 = predict_rates(cfg, 290.0);
    CHECK_THAT(r290.p_ut, WithinRel(0.0060301225235645066, 1e-12));
    CHECK_THAT(r290.p_us, WithinRel(0.0026084025718101042, 1e-12));
    CHECK_THAT(r290.p_lt, WithinRel(0.001474851902197606, 1e-12));
    CHECK_THAT(r290.p_ls, WithinRel(0.00092992539983865173, 1e-12));
}

TEST_CASE("rate curves have the measured shapes over the pump range", "[forward]")
{
    auto cfg = paper_config();
    double prev_us = 1.0;
    double prev_ut = -1.0;
    for (double p = 0.0; p <= 300.0; p += 5.0)
    {
        const auto r = predict_rates(cfg, p);
        CHECK(r.p_us < prev_us);
        CHECK(r.p_ut > prev_ut);
        prev_us = r.p_us;
        prev_ut = r.p_ut;
        for (double v : {r.p_ut, r.p_us, r.p_lt, r.p_ls})
        {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(r.p_ut + r.p_us <= 1.0);
    }
    // saturation: the transition curve flattens as R~ approaches its peak
    const double slope_low =
        predict_rates(cfg, 20.0).p_ut - predict_rates(cfg, 10.0).p_ut;
    const double slope_high =
        predict_rates(cfg, 300.0).p_ut - predict_rates(cfg, 290.0).p_ut;
    CHECK(slope_high < 0.5 * slope_low);
}

TEST_CASE("transition rate is monotone in the internal transition probability", "[forward]")
{
    auto cfg = paper_config();
    double prev = -1.0;
    for (double rt = 0.0; rt <= 1.0; rt += 0.05)
    {
        const auto r = rates_at_transition(cfg.bands, cfg.budget, rt);
        CHECK(r.p_ut > prev);
        prev = r.p_ut;
    }
}

TEST_CASE("lower-arm rates are exactly linear in mu", "[forward]")
{
    auto cfg = paper_config();
    const auto base = rates_at_transition(cfg.bands, cfg.budget, 0.37);
    for (double scale : {0.5, 2.0, 10.0})
    {
        LossBudget b = cfg.budget;
        b.mu *= scale;
        const auto r = rates_at_transition(cfg.bands, b, 0.37);
        CHECK_THAT(r.p_lt, WithinRel(base.p_lt * scale, 1e-14));
        CHECK_THAT(r.p_ls, WithinRel(base.p_ls * scale, 1e-14));
        CHECK(r.p_ut == base.p_ut);
        CHECK(r.p_us == base.p_us);
    }
}

TEST_CASE("incomplete config is rejected", "[forward]")
{
    ExperimentConfig cfg; // zero bandwidths
    CHECK_THROWS_AS(predict_rates(cfg, 10.0), config_error);
    auto bad = paper_config();
    bad.budget.tu = 1.5;
    CHECK_THROWS_AS(predict_rates(bad, 10.0), config_error);
    CHECK_THROWS_AS(rates_at_transition(paper_config().bands, paper_config().budget, 1.5),
                    std::domain_error);
}

TEST_CASE("staying-term reading switch changes only p_ls", "[forward]")
{
    auto cfg = paper_config();
    const auto structural = rates_at_transition(cfg.bands, cfg.budget, 0.4, 0.0,
                                                StayingTermReading::structural);
    const auto linear = rates_at_transition(cfg.bands, cfg.budget, 0.4, 0.0,
                                              StayingTermReading::linear_sum);
    CHECK(structural.p_ut == linear.p_ut);
    CHECK(structural.p_us == linear.p_us);
    CHECK(structural.p_lt == linear.p_lt);
    CHECK(structural.p_ls != linear.p_ls);
}
