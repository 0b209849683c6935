#include <cmath>
#include <random>

#include "doctest.h"

#include "droc/ambiguity.hpp"
#include "droc/errors.hpp"

using namespace droc;

namespace {

const AmbiguitySpec kFermentation{2.2, 0.2, 1.76, 2.64};

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::InternalError;
}

}  // namespace

TEST_CASE("characteristic grid placements") {
    const DiscreteSupport s = characteristic_grid(kFermentation, 10);
    REQUIRE(s.size() == 10);
    CHECK(s.points.front() == doctest::Approx(1.76));
    CHECK(s.points.back() == doctest::Approx(2.64));
    CHECK(s.points[3] == doctest::Approx(1.76 + 0.88 * 3 / 9));
    const DiscreteSupport mid = characteristic_grid(kFermentation, 4, Placement::Midpoint);
    CHECK(mid.points[0] == doctest::Approx(1.76 + 0.11));
    const DiscreteSupport two = characteristic_grid({0.5, 0.5, 0, 1}, 2);
    CHECK(two.points == std::vector<double>{0.0, 1.0});
    CHECK(code_of([] { characteristic_grid(kFermentation, 1); }) == ErrorCode::TooFewPoints);
    CHECK(max_cell_width(kFermentation, 8) == doctest::Approx(0.11));
}

TEST_CASE("moment LP data") {
    const DiscreteSupport s = characteristic_grid(kFermentation, 10);
    const MomentLPData d = build_moment_lp(kFermentation, s, VectorXd::Zero(10));
    CHECK(d.b[0] == 1.0);
    CHECK(d.b[1] == doctest::Approx(2.2));
    CHECK(d.b[2] == doctest::Approx(4.88));
    CHECK(d.a(2, 4) == doctest::Approx(s.points[4] * s.points[4]));
    CHECK(code_of([&] { build_moment_lp(kFermentation, s, VectorXd::Zero(9)); }) == ErrorCode::DimensionMismatch);
    CHECK(code_of([&] { build_moment_lp(kFermentation, DiscreteSupport{{1.0, 2.0}}, VectorXd::Zero(2)); }) ==
          ErrorCode::OutOfDomain);
}

TEST_CASE("ambiguity set feasibility") {
    CHECK_NOTHROW(kFermentation.validate());
    // (mu - pl)(pu - mu) = 0.25 is the largest admissible variance on [0, 1] at mu = 0.5.
    CHECK_NOTHROW(AmbiguitySpec{0.5, 0.5, 0, 1}.validate());
    CHECK(code_of([] { AmbiguitySpec{0.5, 0.51, 0, 1}.validate(); }) == ErrorCode::Infeasible);
    CHECK(code_of([] { AmbiguitySpec{1.5, 0.1, 0, 1}.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("uniform density cells carry equal mass") {
    const Density d = uniform_density(kFermentation);
    const DiscretizedDensity r = discretize_density(kFermentation, d, 8, 16);
    for (int i = 0; i < 8; ++i) CHECK(r.weights[i] == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(r.raw_mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("truncated normal cell masses agree with Monte Carlo") {
    // Oracle: rejection sampling of N(2.2, 0.2) into [1.76, 2.64], 1e6 accepted draws.
    const int m = 10;
    const Density d = truncnorm_density(2.2, 0.2, 1.76, 2.64);
    const DiscretizedDensity r = discretize_density(kFermentation, d, m, 64, Placement::Midpoint);
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> N(2.2, 0.2);
    std::vector<double> counts(m, 0.0);
    const int draws = 1'000'000;
    for (int n = 0; n < draws;) {
        const double x = N(rng);
        if (x < 1.76 || x > 2.64) continue;
        counts[std::min(m - 1, static_cast<int>((x - 1.76) / 0.088))] += 1.0;
        ++n;
    }
    for (int i = 0; i < m; ++i) CHECK(std::abs(r.weights[i] - counts[i] / draws) < 2e-3);
    CHECK(r.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("moment errors respect the cell-width bounds and shrink with m") {
    // Symmetric densities on equally spaced points have e1 = 0 up to rounding,
    // so the halving check needs the skewed density to say anything.
    const std::vector<Density> densities = {uniform_density(kFermentation), truncnorm_density(2.2, 0.2, 1.76, 2.64),
                                            truncnorm_density(2.0, 0.25, 1.76, 2.64)};
    for (size_t k = 0; k < densities.size(); ++k) {
        const Density& d = densities[k];
        const AmbiguitySpec mom = density_moments(d, 1.76, 2.64);
        double prev = 1e9;
        for (int m : {10, 20, 40, 80}) {
            const DiscretizedDensity r = discretize_density(kFermentation, d, m, 64);
            const MomentErrors e = moment_discretization_error(mom, r.support, r.weights);
            const double dp = max_cell_width(kFermentation, m);
            CHECK(e.e1 <= dp);
            CHECK(e.e2 <= 2 * 2.64 * dp);
            if (k < 2)
                CHECK(e.e1 <= 1e-12);
            else
                CHECK(e.e1 <= 0.5 * prev);
            prev = e.e1;
        }
    }
}

TEST_CASE("density moments of the uniform law") {
    const AmbiguitySpec mom = density_moments(uniform_density({0.5, 0.1, 0, 1}), 0, 1);
    CHECK(mom.mu == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mom.sigma == doctest::Approx(std::sqrt(1.0 / 12.0)).epsilon(1e-10));
}

TEST_CASE("bad densities are rejected") {
    CHECK(code_of([] { table_density({1.76, 2.2, 2.64}, {1.0, -0.5, 1.0}); }) == ErrorCode::InvalidDensity);
    const Density dips{"dips", [](double p) { return p < 2.0 ? 2.0 : -0.1; }};
    CHECK(code_of([&] { discretize_density(kFermentation, dips, 10, 16); }) == ErrorCode::InvalidDensity);
    const Density light{"half", [](double) { return 0.5 / 0.88; }};
    CHECK(code_of([&] { discretize_density(kFermentation, light, 10, 16); }) == ErrorCode::MassMismatch);
}

TEST_CASE("placement names") {
    CHECK(parse_placement("midpoint") == Placement::Midpoint);
    CHECK(to_string(Placement::Paper) == "paper");
    CHECK_THROWS_AS(parse_placement("left"), Error);
}
