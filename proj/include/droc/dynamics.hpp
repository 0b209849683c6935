#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace droc {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

// Any state component above this magnitude aborts integration.
inline constexpr double kBlowupThreshold = 1e12;

// Controlled ODE family x' = f(x, u, p) on normalized time [0, 1] with a
// terminal (Mayer) cost h(x). Any physical horizon t_f is already folded
// into rhs; t_f is kept for reporting and time-axis output only.
struct DynamicsModel {
    using Rhs = std::function<VectorXd(const VectorXd& x, const VectorXd& u, double p)>;
    using Jacobian = std::function<MatrixXd(const VectorXd& x, const VectorXd& u, double p)>;
    using Cost = std::function<double(const VectorXd& x)>;
    using CostGradient = std::function<RowVectorXd(const VectorXd& x)>;

    std::string name;
    int n_x = 0;
    int n_u = 0;
    double t_f = 1.0;
    VectorXd x0;
    Rhs rhs;
    Jacobian rhs_jac_x;  // n_x x n_x
    Jacobian rhs_jac_u;  // n_x x n_u
    Cost cost;
    CostGradient cost_grad;  // 1 x n_x

    void validate() const;
};

// Box U = [lower, upper] for the control values.
struct ControlBox {
    VectorXd lower;
    VectorXd upper;

    int dim() const { return static_cast<int>(lower.size()); }
    bool contains(const VectorXd& u) const;
    void validate() const;
};

struct FedBatchParams {
    double d_X = 0.05;    // 1/h
    double mu_m = 2.7;    // 1/h
    double K_S = 280.0;   // g/L
    double S_star = 0.0;  // g/L, no published value; must be supplied
    double Y_S = 0.082;
    double rho_S = 945.0;  // g/L
    double m_S = 2.2;      // nominal maintenance rate; the uncertain parameter

    void validate() const;
};

// f(x, u, p) with dimension and finiteness checks.
VectorXd eval_rhs(const DynamicsModel& model, const VectorXd& x, const VectorXd& u, double p);

// Fed-batch fermentation (state [X, S, V]) rescaled to normalized time,
// terminal cost h(x) = -X. The parameter p passed to rhs is m_S.
DynamicsModel fedbatch_model(const FedBatchParams& params, double t_f, const VectorXd& x0);

// Specific growth rate mu_X(S).
double fedbatch_growth_rate(const FedBatchParams& params, double S);

// Built-in scalar test problems.
DynamicsModel zero_model();                        // x' = 0, h = 0
DynamicsModel drift_model(double x0);              // x' = u + p, h = x^2
DynamicsModel linear_model(double x0);             // x' = -p x + u, h = x^2

// Central finite-difference Jacobians of rhs, used to check the analytic ones.
MatrixXd fd_jacobian_x(const DynamicsModel& model, const VectorXd& x, const VectorXd& u, double p,
                       double rel_step = 1e-6);
MatrixXd fd_jacobian_u(const DynamicsModel& model, const VectorXd& x, const VectorXd& u, double p,
                       double rel_step = 1e-6);

}  // namespace droc
