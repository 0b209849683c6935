#include <cmath>
#include <random>

#include "doctest.h"

#include "droc/errors.hpp"
#include "droc/outer.hpp"
#include "test_helpers.hpp"

using namespace droc;
using namespace droc::testing;

namespace {

PenaltyProblem toy_problem(const DynamicsModel& model, AmbiguitySpec spec, int m, int pieces, double lo, double hi) {
    return PenaltyProblem(model, ControlGrid::uniform(pieces, scalar_box(lo, hi)), spec, characteristic_grid(spec, m));
}

PenaltyProblem fedbatch_problem() {
    const AmbiguitySpec spec{2.2, 0.2, 1.76, 2.64};
    return PenaltyProblem(fedbatch_model(calibrated_fedbatch(), 25.0, vec({0.1, 20, 3})),
                          ControlGrid::uniform(25, scalar_box(0, 0.04)), spec, characteristic_grid(spec, 10));
}

SolverOptions fast_options() {
    SolverOptions o;
    o.initial_step = InitialStep::BarzilaiBorwein;
    o.scaling = Scaling::Normalized;
    return o;
}

}  // namespace

TEST_CASE("smoothed max is C1 and exact outside the band") {
    const double eps = 1e-3;
    CHECK(smooth_constraint(-2e-3, eps) == 0.0);
    CHECK(smooth_constraint(-eps, eps) == 0.0);
    CHECK(smooth_constraint(0.0, eps) == doctest::Approx(eps / 4));
    CHECK(smooth_constraint(eps, eps) == doctest::Approx(eps));
    CHECK(smooth_constraint(0.5, eps) == 0.5);
    for (double g : {-eps, -0.3 * eps, 0.0, 0.7 * eps, eps}) {
        const double h = 1e-9;
        const double fd = (smooth_constraint(g + h, eps) - smooth_constraint(g - h, eps)) / (2 * h);
        CHECK(smooth_constraint_derivative(g, eps) == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("projection keeps only admissible gradient components") {
    const VectorXd lo = vec({0, 0, 0}), hi = vec({1, 1, 1});
    const VectorXd v = vec({0, 0.5, 1});
    const VectorXd g = vec({2, -3, -4, 5, -6, 7});
    const VectorXd pg = projected_gradient(g, v, lo, hi);
    CHECK(pg == vec({0, -3, 0, 5, -6, 7}));
    CHECK(projected_gradient_norm(g, v, lo, hi) == 7.0);
    CHECK(projected_gradient(vec({-2, 1, 4, 0, 0, 0}), v, lo, hi) == vec({-2, 1, 4, 0, 0, 0}));
}

TEST_CASE("merit gradient matches central differences on the fermentation problem") {
    PenaltyProblem p = fedbatch_problem();
    p.rho = 100.0;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0.0, 0.04), Y(-3.0, 3.0);
    for (int trial = 0; trial < 5; ++trial) {
        VectorXd v(25);
        for (int j = 0; j < 25; ++j) v[j] = U(rng);
        // y near the feasible boundary so the smoothing band is exercised.
        const Vector3d y(Y(rng) - 4.0, Y(rng) * 0.1, Y(rng) * 0.01);
        const MeritEval e = merit_at(p, v, y, true);
        const VectorXd fd = merit_fd_gradient(p, v, y);
        const VectorXd an = e.gradient();
        CHECK((fd - an).norm() <= 1e-4 * an.norm());
    }
}

TEST_CASE("merit pieces add up") {
    PenaltyProblem p = toy_problem(drift_model(0.0), {0.0, 0.5, -1, 1}, 5, 2, -1, 1);
    p.rho = 7.0;
    const Vector3d y(0.1, -0.2, 0.3);
    const MeritEval e = merit_at(p, vec({0.3, -0.1}), y, true);
    // x(1) = 0.1 + p.
    for (int i = 0; i < 5; ++i) {
        const double pi = p.support.points[i];
        CHECK(e.costs[i] == doctest::Approx((0.1 + pi) * (0.1 + pi)));
        CHECK(e.g[i] == doctest::Approx(e.costs[i] - (0.1 + -0.2 * pi + 0.3 * pi * pi)));
    }
    double G = 0.0;
    for (int i = 0; i < 5; ++i) G += smooth_constraint(e.g[i], p.epsilon);
    CHECK(e.G == doctest::Approx(G));
    CHECK(e.value == doctest::Approx(y.dot(p.lp.b) + 3.5 * G * G));
}

TEST_CASE("zero dynamics: converges to the zero-cost bound") {
    PenaltyProblem p = toy_problem(zero_model(), {0.0, 0.5, -1, 1}, 5, 2, -1, 1);
    const SolveReport r = solve(p, SolverOptions{}, vec({0.2, -0.4}), Vector3d(1.0, 0.0, 0.0));
    CHECK(r.status == SolveStatus::Converged);
    // The smoothed constraint admits g up to -epsilon, hence the epsilon slack.
    CHECK(std::abs(r.objective) <= 1.5 * p.epsilon);
    CHECK(r.max_g <= 1e-6 + p.epsilon);
}

TEST_CASE("quadratic toy matches a grid search over constant controls") {
    const AmbiguitySpec spec{0.2, 0.3, -1, 1};
    PenaltyProblem p = toy_problem(drift_model(0.0), spec, 9, 1, -1, 1);
    // Oracle: for x(1) = c + p the worst-case E[(c + p)^2] is fixed by the
    // moments, c^2 + 2 c mu + mu^2 + sigma^2; scan c on a fine grid.
    double best = INFINITY;
    for (int k = 0; k <= 200000; ++k) {
        const double c = -1.0 + 2.0 * k / 200000;
        best = std::min(best, c * c + 2 * c * spec.mu + spec.second_moment());
    }
    const SolveReport r = solve(p, fast_options(), vec({0.7}), Vector3d(1.0, 1.0, 1.0));
    CHECK(r.objective >= 0.0);
    CHECK(r.objective == doctest::Approx(best).epsilon(0).scale(0).epsilon(1e-3 / best));
    CHECK(r.v[0] == doctest::Approx(-0.2).epsilon(0.02));
}

TEST_CASE("schedule invariants and sufficient decrease") {
    PenaltyProblem p = toy_problem(linear_model(1.0), {0.5, 0.2, 0, 1}, 7, 3, -1, 1);
    SolverOptions o = fast_options();
    o.schedule.max_outer = 8;
    const SolveReport r = solve(p, o, vec({0.5, 0.5, 0.5}), Vector3d(2.0, 0.0, 0.0));
    REQUIRE(r.trace.size() >= 2);
    for (size_t k = 1; k < r.trace.size(); ++k) {
        CHECK(r.trace[k].rho >= r.trace[k - 1].rho);
        CHECK(r.trace[k].omega < r.trace[k - 1].omega);
        CHECK(r.trace[k].eta <= r.trace[k - 1].eta);
    }
    CHECK(r.trace[0].omega == doctest::Approx(1.0 / o.schedule.rho0));
    CHECK(r.trace[0].eta == doctest::Approx(std::pow(o.schedule.rho0, -0.1)));
    for (const auto& a : r.armijo_log) {
        CHECK(a[2] < 0.0);
        CHECK(a[1] <= a[0] + a[2]);
    }
}

TEST_CASE("unit-step and scaled variants agree on the linear toy") {
    PenaltyProblem p = toy_problem(linear_model(1.0), {0.5, 0.2, 0, 1}, 7, 2, -1, 1);
    SolverOptions plain;
    plain.schedule.max_outer = 12;
    SolverOptions fast = fast_options();
    fast.schedule.max_outer = 12;
    const SolveReport a = solve(p, plain, vec({0.0, 0.0}), Vector3d(1.0, 0.0, 0.0));
    const SolveReport b = solve(p, fast, vec({0.0, 0.0}), Vector3d(1.0, 0.0, 0.0));
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(5e-3));
}

TEST_CASE("multistart is reproducible and picks the best draw") {
    PenaltyProblem p = fedbatch_problem();
    const MultistartResult a = multistart_init(p, 12, 42);
    const MultistartResult b = multistart_init(p, 12, 42);
    CHECK(a.draw == b.draw);
    CHECK(a.v == b.v);
    CHECK(a.value == b.value);
    CHECK(a.value == doctest::Approx(a.y.dot(p.lp.b)));
    for (int M : {1, 3}) CHECK(multistart_init(p, M, 42).value >= a.value);
    CHECK(multistart_init(p, 1, 42).v == multistart_init(p, 1, 42).v);
    CHECK_THROWS_AS(multistart_init(p, 0, 42), Error);
    // Dual-ISP starts are feasible: y'a^i >= h_i.
    const MeritEval e = merit_at(p, a.v, a.y, false);
    CHECK(e.max_g <= 1e-9);
}

TEST_CASE("moment-infeasible supports are refused") {
    const AmbiguitySpec spec{0.0, 0.9, -1, 1};
    PenaltyProblem p(drift_model(0.0), ControlGrid::uniform(1, scalar_box(-1, 1)), spec,
                     DiscreteSupport{{-0.2, 0.0, 0.2}});
    try {
        solve(p, SolverOptions{}, vec({0.0}), Vector3d::Zero());
        FAIL("expected Infeasible");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Infeasible);
        CHECK(std::string(e.what()).find("moment-infeasible support") != std::string::npos);
    }
}

TEST_CASE("option names") {
    CHECK(parse_strategy("alt-direction") == Strategy::AltDirection);
    CHECK(parse_initial_step("bb") == InitialStep::BarzilaiBorwein);
    CHECK(parse_scaling("normalized") == Scaling::Normalized);
    CHECK_THROWS_AS(parse_strategy("pso"), Error);
    AlgorithmSchedule bad;
    bad.alpha1 = 0.5;
    CHECK_THROWS_AS(bad.validate(), Error);
}
