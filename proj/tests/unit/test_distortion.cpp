#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "xol/distortion.hpp"
#include "xol/error.hpp"

using Catch::Approx;
using namespace xol;

namespace {

std::vector<DistortionMeasure> all_measures() {
    return {DistortionMeasure::var(0.75),      DistortionMeasure::es(0.75),   DistortionMeasure::es(0.95),
            DistortionMeasure::dual_power(2.0), DistortionMeasure::dual_power(3.5),
            DistortionMeasure::gini(0.0),       DistortionMeasure::gini(0.5), DistortionMeasure::gini(1.0),
            DistortionMeasure::pht(0.3),        DistortionMeasure::pht(0.0),  DistortionMeasure::wang(0.0),
            DistortionMeasure::wang(1.0)};
}

// φ_h(Z) = ∫ z h′(Φ̄(z)) φ(z) dz for smooth h, by Simpson.
double phi_oracle(const DistortionMeasure& m) {
    return oracle::simpson([&](double z) { return z * m.h_prime(1.0 - oracle::normal_cdf(z)) * oracle::normal_pdf(z); },
                           -8.0, 8.0, 200000);
}

} // namespace

TEST_CASE("distortion function examples", "[distortion]") {
    CHECK(distortion_h(DistortionMeasure::es(0.75), 0.1) == Approx(0.4).epsilon(1e-14));
    CHECK(distortion_h(DistortionMeasure::wang(0.0), 0.3) == Approx(0.3).epsilon(1e-14));
    CHECK(distortion_h(DistortionMeasure::gini(1.0), 0.5) == Approx(0.75).epsilon(1e-14));
}

TEST_CASE("distortion functions are valid on a fine grid", "[distortion]") {
    for (const auto& m : all_measures()) {
        INFO(m.to_string());
        CHECK(m.h(0.0) == Approx(0.0).margin(1e-15));
        CHECK(m.h(1.0) == Approx(1.0).margin(1e-15));
        double prev = 0.0;
        for (int i = 0; i <= 1000; ++i) {
            const double v = m.h(i / 1000.0);
            CHECK(v >= prev - 1e-15);
            prev = v;
        }
    }
}

TEST_CASE("phi examples", "[distortion]") {
    const double z = oracle::normal_quantile(0.75);
    CHECK(DistortionMeasure::var(0.75).phi() == Approx(z).epsilon(1e-12));
    CHECK(DistortionMeasure::var(0.75).phi() == Approx(0.67449).margin(5e-6));
    // Closed form φ(z_p)/(1−p).
    CHECK(DistortionMeasure::es(0.75).phi() == Approx(oracle::normal_pdf(z) / 0.25).epsilon(1e-12));
    CHECK(DistortionMeasure::wang(0.0).phi() == Approx(0.0).margin(1e-12));
}

TEST_CASE("phi for smooth distortions matches an independent Simpson integral", "[distortion]") {
    for (const auto& m : {DistortionMeasure::dual_power(2.0), DistortionMeasure::dual_power(3.5),
                          DistortionMeasure::gini(0.5), DistortionMeasure::gini(1.0), DistortionMeasure::wang(0.7)}) {
        INFO(m.to_string());
        CHECK(m.phi() == Approx(phi_oracle(m)).epsilon(1e-8));
    }
    CHECK(DistortionMeasure::gini(1.0).phi() == Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-10));
    CHECK(DistortionMeasure::dual_power(2.0).phi() == Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-10));
}

TEST_CASE("Choquet evaluation agrees with the closed forms", "[distortion]") {
    for (double p : {0.55, 0.75, 0.9, 0.99}) {
        CHECK(phi_h_choquet(DistortionMeasure::var(p)) == Approx(DistortionMeasure::var(p).phi()).epsilon(1e-8));
        CHECK(phi_h_choquet(DistortionMeasure::es(p)) == Approx(DistortionMeasure::es(p).phi()).epsilon(1e-8));
    }
    for (const auto& m : all_measures()) {
        INFO(m.to_string());
        CHECK(phi_h_choquet(m) == Approx(m.phi()).margin(1e-8));
    }
}

TEST_CASE("ES dominates VaR", "[distortion]") {
    for (int i = 1; i < 100; ++i) {
        const double p = i / 100.0;
        CHECK(DistortionMeasure::es(p).phi() >= DistortionMeasure::var(p).phi());
    }
}

TEST_CASE("Wang transform shifts the normal by beta", "[distortion]") {
    for (double b : {0.0, 0.25, 1.0, 2.5}) CHECK(DistortionMeasure::wang(b).phi() == Approx(b).margin(1e-8));
}

TEST_CASE("measure parsing and validation", "[distortion]") {
    CHECK(DistortionMeasure::parse("var:0.75").kind() == DistortionKind::VaR);
    CHECK(DistortionMeasure::parse("es:0.9").param() == 0.9);
    CHECK(DistortionMeasure::parse("dualpower:2").kind() == DistortionKind::DualPower);
    CHECK(DistortionMeasure::parse("gini:0.5").kind() == DistortionKind::Gini);
    CHECK(DistortionMeasure::parse("pht:0.3").kind() == DistortionKind::PHT);
    CHECK(DistortionMeasure::parse("wang:1.0").kind() == DistortionKind::Wang);
    const auto m = DistortionMeasure::parse(DistortionMeasure::pht(0.3).to_string());
    CHECK(m.param() == 0.3);
    CHECK_THROWS_AS(DistortionMeasure::parse("var:1.5"), Error);
    CHECK_THROWS_AS(DistortionMeasure::parse("gini:2"), Error);
    CHECK_THROWS_AS(DistortionMeasure::parse("pht:1"), Error);
    CHECK_THROWS_AS(DistortionMeasure::parse("dualpower:0.5"), Error);
    CHECK_THROWS_AS(DistortionMeasure::parse("bogus:1"), Error);
    CHECK_THROWS_AS(DistortionMeasure::parse("var"), Error);
}
