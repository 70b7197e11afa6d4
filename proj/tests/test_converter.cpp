#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "fhom/converter.hpp"

using namespace fhom;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
double unitarity_defect(const BsMatrix& m)
{
    double worst = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
        {
            std::complex<double> s = 0.0;
            for (int k = 0; k < 2; ++k)
                s += m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                     std::conj(m[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]);
            const double target = i == j ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(s - target));
        }
    return worst;
}

BsMatrix multiply(const BsMatrix& a, const BsMatrix& b)
{
    BsMatrix out{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                    a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                    b[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
    return out;
}
} // namespace

TEST_CASE("bs_map limits", "[converter]")
{
    const auto id = bs_map({0.0, 0.3});
    CHECK_THAT(id[0][0].real(), WithinAbs(1.0, 1e-15));
    CHECK_THAT(std::abs(id[0][1]), WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(id[1][0]), WithinAbs(0.0, 1e-15));

    const auto swap = bs_map({std::numbers::pi / 2.0, 0.0});
    CHECK_THAT(std::abs(swap[0][0]), WithinAbs(0.0, 1e-15));
    CHECK_THAT(swap[0][1].real(), WithinAbs(-1.0, 1e-15));
    CHECK_THAT(swap[1][0].real(), WithinAbs(1.0, 1e-15));

    // pi/4 mixing works as a half BS: every amplitude has magnitude 1/sqrt(2)
    const auto half = bs_map({std::numbers::pi / 4.0, 0.0});
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK_THAT(std::abs(half[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]),
                       WithinRel(std::numbers::sqrt2 / 2.0, 1e-14));
}

TEST_CASE("bs_map is unitary for random angles", "[converter]")
{
    std::mt19937_64 rng(11);
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    for (int i = 0; i < 100; ++i)
    {
        const BeamsplitterAngle angle{uniform(-10.0, 10.0), uniform(0.0, 2.0 * std::numbers::pi)};
        CHECK(unitarity_defect(bs_map(angle)) < 1e-12);
    }
}

TEST_CASE("bs_map composes additively at equal phase", "[converter]")
{
    std::mt19937_64 rng(13);
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    for (int i = 0; i < 50; ++i)
    {
        const double phase = uniform(0.0, 2.0 * std::numbers::pi);
        const double t1 = uniform(-2.0, 2.0);
        const double t2 = uniform(-2.0, 2.0);
        const auto composed = multiply(bs_map({t1, phase}), bs_map({t2, phase}));
        const auto direct = bs_map({t1 + t2, phase});
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                CHECK(std::abs(composed[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -
                               direct[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) <
                      1e-12);
    }
}

TEST_CASE("transition_peak follows the pump curve", "[converter]")
{
    const PumpCurve paper{0.99, 0.0036};
    CHECK(transition_peak(paper, 0.0) == 0.0);
    // main text quotes ~0.4 at 140 mW, ~0.2 at 50 mW, ~0.7 at 290 mW
    CHECK_THAT(transition_peak(paper, 140.0), WithinRel(0.4205694625829739, 1e-13));
    CHECK_THAT(transition_peak(paper, 50.0), WithinRel(0.16776133500485216, 1e-13));
    CHECK_THAT(transition_peak(paper, 290.0), WithinRel(0.7203827115396945, 1e-13));
    CHECK_THROWS_AS(transition_peak(paper, -1.0), std::domain_error);

    for (double p : {1.0, 42.0, 350.0, 2000.0})
    {
        const double r = transition_peak(paper, p);
        CHECK(r >= 0.0);
        CHECK(r <= paper.amplitude);
    }
}

TEST_CASE("response_at is a gaussian with the quoted half-maximum", "[converter]")
{
    const ConverterResponse resp{0.42, 140.0, 0.0};
    CHECK_THAT(response_at(resp, 0.0), WithinRel(0.42, 1e-15));
    CHECK_THAT(response_at(resp, 70.0), WithinRel(0.21, 1e-12));
    CHECK(response_at(resp, 1e5) < 1e-300);
    CHECK(response_at(resp, 35.0) + response_at(resp, -35.0) ==
          2.0 * response_at(resp, 35.0)); // even in the detuning

    // probability conservation of the spectrally resolved response
    for (double nu : {0.0, 10.0, 55.0, 140.0})
    {
        const double r = response_at(resp, nu);
        const double t = 1.0 - r;
        CHECK(r >= 0.0);
        CHECK(r <= resp.peak);
        CHECK(r + t == 1.0);
    }
}
