#include "../support/oracle.h"

#include "fssecm/constants.h"
#include "fssecm/errors.h"
#include "fssecm/extraction.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace fssecm;
using namespace fssecm::units;

namespace {

first_order_geometry prototype_geometry() {
    first_order_geometry g;
    g.a = 8.5 * mm;
    g.w = 6.8 * mm;
    g.s = 0.3 * mm;
    g.s1 = 0.2 * mm;
    g.g = 0.5 * mm;
    g.h = 0.635 * mm;
    g.eps_r = 10.2;
    g.tan_delta = 0.0023;
    return g;
}

extracted_circuit prototype_circuit() {
    return {4.9 * nh, 0.5 * pf, 4.0 * nh, 0.35 * pf, 0.8 * nh};
}

// Values frozen from a separate desk calculation of the four formulas.
constexpr double desk_l_s = 4.918046585668135e-09;
constexpr double desk_c_s = 5.115165333588338e-13;
constexpr double desk_l_p = 4.0511917975995435e-09;
constexpr double desk_c_p = 3.1021808743455244e-13;

} // namespace

TEST(ExtractionTest, EffectivePermittivity) {
    EXPECT_DOUBLE_EQ(effective_permittivity(1.0), 1.0);
    EXPECT_DOUBLE_EQ(effective_permittivity(10.2), 5.6);
    EXPECT_DOUBLE_EQ(effective_permittivity(3.0), 2.0);
}

TEST(ExtractionTest, PrototypeGeometryValues) {
    const extracted_circuit c = extract_circuit(prototype_geometry());
    EXPECT_NEAR(c.l_s / desk_l_s, 1.0, 1e-12);
    EXPECT_NEAR(c.c_s / desk_c_s, 1.0, 1e-12);
    EXPECT_NEAR(c.l_p / desk_l_p, 1.0, 1e-12);
    EXPECT_NEAR(c.c_p / desk_c_p, 1.0, 1e-12);
    EXPECT_EQ(c.l_par, 0.0);

    EXPECT_NEAR(c.l_s / nh, 4.918, 0.0005);
    EXPECT_NEAR(c.c_s / pf, 0.5115, 0.00005);
    EXPECT_NEAR(c.l_p / nh, 4.052, 0.001);
    EXPECT_NEAR(c.c_p / pf, 0.310, 0.0005);
}

TEST(ExtractionTest, HandEvaluationOfEachFormula) {
    const double a = 8.5e-3;
    const double pi = oracle::pi;
    const double ls = a / (2 * pi) * oracle::mu0 * std::log(1.0 / std::sin(pi * 0.3e-3 / (2 * a)));
    const double cp = (a - 0.5e-3 - 0.2e-3) / pi * oracle::eps0 * 5.6 *
                      std::log(1.0 / std::sin(pi * 0.2e-3 / (a - 0.5e-3 - 0.2e-3)));
    const extracted_circuit c = extract_circuit(prototype_geometry());
    EXPECT_NEAR(c.l_s / ls, 1.0, 1e-14);
    EXPECT_NEAR(c.c_p / cp, 1.0, 1e-14);
}

TEST(ExtractionTest, InvalidGeometryRejected) {
    auto expect_invalid = [](first_order_geometry g) {
        try {
            extract_circuit(g);
            FAIL();
        } catch (const fss_error& e) {
            EXPECT_EQ(e.category(), error_category::invalid_geometry);
        }
    };
    auto g = prototype_geometry();
    g.s = 0.0;
    expect_invalid(g);
    g = prototype_geometry();
    g.s = g.a;
    expect_invalid(g);
    g = prototype_geometry();
    g.g = 9.0 * mm;
    expect_invalid(g);
    g = prototype_geometry();
    g.s1 = 4.0 * mm;   // s1 >= a - g - s1
    expect_invalid(g);
    g = prototype_geometry();
    g.w = 9.0 * mm;
    expect_invalid(g);
    g = prototype_geometry();
    g.h = 0.0;
    expect_invalid(g);
    g = prototype_geometry();
    g.eps_r = 0.5;
    expect_invalid(g);
    EXPECT_THROW(log_csc(0.0), fss_error);
    EXPECT_THROW(log_csc(constants::pi), fss_error);
}

TEST(ExtractionTest, SurfaceImpedanceMatchesParallelCombination) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> f(0.2e9, 15e9);
    const extracted_circuit c = prototype_circuit();
    for (int i = 0; i < 100; ++i) {
        const double freq = f(rng);
        const complex ref = oracle::parallel_tank_notch(freq, c.l_s, c.c_s, c.l_p, c.c_p);
        const impedance z = surface_impedance(c, freq);
        ASSERT_FALSE(z.is_open());
        EXPECT_LT(std::abs(z.value() - ref) / std::abs(ref), 1e-10);
    }
}

TEST(ExtractionTest, SurfaceImpedanceZeroAndLowFrequencyLimit) {
    const extracted_circuit c = prototype_circuit();
    const double f0 = predict_resonances(c).f0;
    EXPECT_LT(std::abs(surface_impedance(c, f0).value()), 1e-12);
    const double f = 1e3;
    const complex z = surface_impedance(c, f).value();
    const double wl = 2.0 * constants::pi * f * c.l_p;
    EXPECT_NEAR(z.imag() / wl, 1.0, 1e-9);
    EXPECT_NEAR(z.real(), 0.0, 1e-18);
}

TEST(ExtractionTest, PredictedResonancesForPrototypeCircuit) {
    const resonance_prediction p = predict_resonances(prototype_circuit());
    EXPECT_NEAR(p.f0 / 3215415414.8468075, 1.0, 1e-12);
    EXPECT_NEAR(p.f_u / 4253594774.7241178, 1.0, 1e-12);
    EXPECT_NEAR(p.f_l / 2385833466.1541705, 1.0, 1e-12);
    EXPECT_NEAR(p.f0 / ghz, 3.2152, 0.0005);
    EXPECT_NEAR(p.f_l / ghz, 2.386, 0.0005);
    EXPECT_NEAR(p.f_u / ghz, 4.252, 0.002);
}

TEST(ExtractionTest, ZeroPredictionIgnoresTankAndParasitic) {
    extracted_circuit c = prototype_circuit();
    const double f0 = predict_resonances(c).f0;
    c.l_p *= 3.1;
    c.c_p *= 0.2;
    c.l_par = 7e-9;
    EXPECT_EQ(predict_resonances(c).f0, f0);
}

TEST(ExtractionTest, ExactPolesOfPrototypeCircuit) {
    const extracted_circuit c = prototype_circuit();
    const pole_pair p = exact_poles(c);
    EXPECT_NEAR(p.lower / 2209423416.116911, 1.0, 1e-10);
    EXPECT_NEAR(p.upper / 6190336405.141117, 1.0, 1e-10);

    // |Z_s| maxima found by a dense scan.
    const auto maxima = oracle::local_maxima(
        [&](double f) {
            return std::abs(oracle::parallel_tank_notch(f, c.l_s, c.c_s, c.l_p, c.c_p));
        },
        1e9, 8e9, 70001);
    ASSERT_EQ(maxima.size(), 2u);
    EXPECT_NEAR(p.lower / maxima[0], 1.0, 1e-6);
    EXPECT_NEAR(p.upper / maxima[1], 1.0, 1e-6);
}

TEST(ExtractionTest, DecoupledLimitOfPoles) {
    extracted_circuit c = prototype_circuit();
    c.l_s = 1e-3;
    const pole_pair p = exact_poles(c);
    const double tank_f = 1.0 / (2.0 * constants::pi * std::sqrt(c.l_p * c.c_p));
    EXPECT_LT(p.lower, 0.01 * tank_f);
    EXPECT_NEAR(p.upper / tank_f, 1.0, 1e-3);
}

TEST(ExtractionTest, PolesInterlaceTheZero) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> logv(-2.0, 2.0);
    for (int i = 0; i < 1000; ++i) {
        const extracted_circuit c{4.9 * nh * std::exp(logv(rng)), 0.5 * pf * std::exp(logv(rng)),
                                  4.0 * nh * std::exp(logv(rng)), 0.35 * pf * std::exp(logv(rng)),
                                  0.0};
        const pole_pair p = exact_poles(c);
        const double f0 = predict_resonances(c).f0;
        EXPECT_LT(p.lower, f0);
        EXPECT_LT(f0, p.upper);
    }
}

TEST(ExtractionTest, NonPositiveCircuitRejectedByPoleSolver) {
    extracted_circuit c = prototype_circuit();
    c.c_p = 0.0;
    EXPECT_THROW(exact_poles(c), fss_error);
}

TEST(ExtractionTest, MonotoneInEachDimension) {
    const first_order_geometry base = prototype_geometry();
    extracted_circuit prev = extract_circuit(base);
    for (double s = 0.35; s < 8.0; s += 0.05) {
        auto g = base;
        g.s = s * mm;
        const extracted_circuit c = extract_circuit(g);
        EXPECT_LT(c.l_s, prev.l_s);
        prev = c;
    }
    prev = extract_circuit(base);
    for (double gap = 0.55; gap < 2.5; gap += 0.05) {
        auto g = base;
        g.g = gap * mm;
        const extracted_circuit c = extract_circuit(g);
        EXPECT_LT(c.c_s, prev.c_s);
        EXPECT_LT(c.l_p, prev.l_p);
        prev = c;
    }
    // C_p falls with s1 while the csc argument stays below pi/2.
    prev = extract_circuit(base);
    for (double s1 = 0.25; s1 < (8.5 - 0.5) / 3.0; s1 += 0.05) {
        auto g = base;
        g.s1 = s1 * mm;
        const extracted_circuit c = extract_circuit(g);
        EXPECT_LT(c.c_p, prev.c_p);
        prev = c;
    }
    prev = extract_circuit(base);
    for (double w = 6.85; w < 8.5; w += 0.05) {
        auto g = base;
        g.w = w * mm;
        const extracted_circuit c = extract_circuit(g);
        EXPECT_GT(c.c_s, prev.c_s);
        prev = c;
    }
}
