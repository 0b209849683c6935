#include <random>

#include "doctest.h"

#include "droc/dynamics.hpp"
#include "droc/errors.hpp"

using namespace droc;

namespace {

FedBatchParams calibrated() {
    FedBatchParams p;
    p.S_star = 100.0;
    return p;
}

VectorXd vec(std::initializer_list<double> xs) {
    VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

}  // namespace

TEST_CASE("fed-batch right-hand side at the initial state") {
    // Hand-evaluated: mu_X(20) = 2.7 * 20/300 * (1 - 20/100) = 0.144.
    const DynamicsModel m = fedbatch_model(calibrated(), 25.0, vec({0.1, 20, 3}));
    const VectorXd f = eval_rhs(m, m.x0, vec({0.01}), 2.2);
    CHECK(f[0] == doctest::Approx(0.235).epsilon(1e-12));
    CHECK(f[1] == doctest::Approx(67.1930894308943).epsilon(1e-12));
    CHECK(f[2] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(m.cost(vec({4.0, 1.0, 3.0})) == -4.0);
}

TEST_CASE("growth rate vanishes at zero substrate and at S_star") {
    const FedBatchParams p = calibrated();
    CHECK(fedbatch_growth_rate(p, 0.0) == 0.0);
    CHECK(fedbatch_growth_rate(p, 20.0) == doctest::Approx(0.144));
    CHECK(fedbatch_growth_rate(p, 100.0) == 0.0);
    CHECK(fedbatch_growth_rate(p, 150.0) < 0.0);
}

TEST_CASE("analytic Jacobians agree with central differences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> X(0.1, 5), S(0, 300), V(1, 4), U(0, 0.04), P(1.76, 2.64);
    const DynamicsModel models[] = {fedbatch_model(calibrated(), 25.0, vec({0.1, 20, 3})), drift_model(0.3),
                                    linear_model(1.0), zero_model()};
    for (const auto& m : models) {
        for (int trial = 0; trial < 20; ++trial) {
            VectorXd x = m.n_x == 3 ? vec({X(rng), S(rng), V(rng)}) : vec({X(rng) - 2.0});
            VectorXd u = vec({U(rng)});
            const double p = P(rng);
            const MatrixXd jx = m.rhs_jac_x(x, u, p), jxf = fd_jacobian_x(m, x, u, p);
            const MatrixXd ju = m.rhs_jac_u(x, u, p), juf = fd_jacobian_u(m, x, u, p);
            const double sx = std::max(1.0, jx.cwiseAbs().maxCoeff());
            const double su = std::max(1.0, ju.cwiseAbs().maxCoeff());
            CHECK((jx - jxf).cwiseAbs().maxCoeff() / sx < 1e-6);
            CHECK((ju - juf).cwiseAbs().maxCoeff() / su < 1e-6);
        }
    }
}

TEST_CASE("cost gradients match differences") {
    const DynamicsModel m = linear_model(1.0);
    const VectorXd x = vec({0.7});
    CHECK(m.cost_grad(x)(0) == doctest::Approx(1.4));
    const DynamicsModel fb = fedbatch_model(calibrated(), 25.0, vec({0.1, 20, 3}));
    CHECK(fb.cost_grad(vec({1, 2, 3})).isApprox(RowVectorXd::Unit(3, 0) * -1.0));
}

TEST_CASE("fed-batch input validation") {
    SUBCASE("missing S_star") {
        CHECK_THROWS_AS(fedbatch_model(FedBatchParams{}, 25.0, vec({0.1, 20, 3})), Error);
    }
    SUBCASE("zero volume divides by zero") {
        const DynamicsModel m = fedbatch_model(calibrated(), 25.0, vec({0.1, 20, 3}));
        try {
            eval_rhs(m, vec({0.1, 20, 0}), vec({0.01}), 2.2);
            FAIL("expected DivisionByZero");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DivisionByZero);
        }
    }
    SUBCASE("dimension mismatch") {
        const DynamicsModel m = fedbatch_model(calibrated(), 25.0, vec({0.1, 20, 3}));
        CHECK_THROWS_AS(eval_rhs(m, vec({0.1, 20}), vec({0.01}), 2.2), Error);
    }
}

TEST_CASE("control box membership") {
    ControlBox box{vec({0.0}), vec({0.04})};
    CHECK(box.contains(vec({0.0})));
    CHECK(box.contains(vec({0.04})));
    CHECK_FALSE(box.contains(vec({0.05})));
    ControlBox bad{vec({1.0}), vec({0.0})};
    CHECK_THROWS_AS(bad.validate(), Error);
}
