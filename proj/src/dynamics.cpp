#include "droc/dynamics.hpp"

#include <cmath>

#include "droc/errors.hpp"

namespace droc {

void DynamicsModel::validate() const {
    if (n_x < 1 || n_u < 1) throw Error(ErrorCode::InvalidArgument, "model dimensions must be >= 1");
    if (!(t_f > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_f must be positive");
    if (x0.size() != n_x) throw Error(ErrorCode::DimensionMismatch, "x0 has wrong dimension");
    if (!rhs || !rhs_jac_x || !rhs_jac_u || !cost || !cost_grad)
        throw Error(ErrorCode::InvalidArgument, "model '" + name + "' is missing an evaluator");
}

bool ControlBox::contains(const VectorXd& u) const {
    if (u.size() != lower.size()) return false;
    for (Eigen::Index i = 0; i < u.size(); ++i)
        if (u[i] < lower[i] || u[i] > upper[i]) return false;
    return true;
}

void ControlBox::validate() const {
    if (lower.size() == 0 || lower.size() != upper.size())
        throw Error(ErrorCode::DimensionMismatch, "control box bounds must be non-empty and equal length");
    for (Eigen::Index i = 0; i < lower.size(); ++i)
        if (!(lower[i] <= upper[i]))
            throw Error(ErrorCode::InvalidArgument, "control box lower bound exceeds upper bound");
}

void FedBatchParams::validate() const {
    for (double v : {d_X, mu_m, K_S, S_star, Y_S, rho_S, m_S})
        if (!(v > 0.0) || !std::isfinite(v))
            throw Error(ErrorCode::InvalidArgument, "fed-batch parameters must be positive and finite");
}

VectorXd eval_rhs(const DynamicsModel& model, const VectorXd& x, const VectorXd& u, double p) {
    if (x.size() != model.n_x || u.size() != model.n_u)
        throw Error(ErrorCode::DimensionMismatch, "eval_rhs: state/control dimension mismatch");
    VectorXd dx = model.rhs(x, u, p);
    if (!dx.allFinite()) throw Error(ErrorCode::NumericalBlowup, "non-finite right-hand side");
    return dx;
}

double fedbatch_growth_rate(const FedBatchParams& params, double S) {
    return params.mu_m * S / (S + params.K_S) * (1.0 - S / params.S_star);
}

namespace {

double growth_rate_dS(const FedBatchParams& c, double S) {
    const double den = S + c.K_S;
    return c.mu_m * (c.K_S / (den * den) * (1.0 - S / c.S_star) - S / den / c.S_star);
}

void require_volume(double V) {
    if (V == 0.0) throw Error(ErrorCode::DivisionByZero, "fed-batch volume is zero");
}

}  // namespace

DynamicsModel fedbatch_model(const FedBatchParams& params, double t_f, const VectorXd& x0) {
    params.validate();
    if (x0.size() != 3) throw Error(ErrorCode::DimensionMismatch, "fed-batch x0 must be [X, S, V]");
    const FedBatchParams c = params;

    DynamicsModel m;
    m.name = "fedbatch";
    m.n_x = 3;
    m.n_u = 1;
    m.t_f = t_f;
    m.x0 = x0;

    m.rhs = [c, t_f](const VectorXd& x, const VectorXd& u, double mS) {
        const double X = x[0], S = x[1], V = x[2];
        require_volume(V);
        const double mu = fedbatch_growth_rate(c, S);
        const double qS = mS + mu / c.Y_S;
        VectorXd dx(3);
        dx[0] = (mu - c.d_X) * X;
        dx[1] = -qS * X + (c.rho_S - S) / V * u[0];
        dx[2] = u[0];
        return VectorXd(t_f * dx);
    };

    m.rhs_jac_x = [c, t_f](const VectorXd& x, const VectorXd& u, double mS) {
        const double X = x[0], S = x[1], V = x[2];
        require_volume(V);
        const double mu = fedbatch_growth_rate(c, S);
        const double dmu = growth_rate_dS(c, S);
        MatrixXd J = MatrixXd::Zero(3, 3);
        J(0, 0) = mu - c.d_X;
        J(0, 1) = dmu * X;
        J(1, 0) = -(mS + mu / c.Y_S);
        J(1, 1) = -dmu / c.Y_S * X - u[0] / V;
        J(1, 2) = -(c.rho_S - S) * u[0] / (V * V);
        return MatrixXd(t_f * J);
    };

    m.rhs_jac_u = [c, t_f](const VectorXd& x, const VectorXd&, double) {
        require_volume(x[2]);
        MatrixXd J(3, 1);
        J << 0.0, (c.rho_S - x[1]) / x[2], 1.0;
        return MatrixXd(t_f * J);
    };

    m.cost = [](const VectorXd& x) { return -x[0]; };
    m.cost_grad = [](const VectorXd&) {
        RowVectorXd g = RowVectorXd::Zero(3);
        g[0] = -1.0;
        return g;
    };
    return m;
}

namespace {

DynamicsModel scalar_model(std::string name, double x0) {
    DynamicsModel m;
    m.name = std::move(name);
    m.n_x = 1;
    m.n_u = 1;
    m.t_f = 1.0;
    m.x0 = VectorXd::Constant(1, x0);
    m.cost = [](const VectorXd& x) { return x[0] * x[0]; };
    m.cost_grad = [](const VectorXd& x) { return RowVectorXd::Constant(1, 2.0 * x[0]); };
    return m;
}

}  // namespace

DynamicsModel zero_model() {
    DynamicsModel m = scalar_model("toy:zero", 0.0);
    m.rhs = [](const VectorXd&, const VectorXd&, double) { return VectorXd::Zero(1); };
    m.rhs_jac_x = [](const VectorXd&, const VectorXd&, double) { return MatrixXd::Zero(1, 1); };
    m.rhs_jac_u = [](const VectorXd&, const VectorXd&, double) { return MatrixXd::Zero(1, 1); };
    m.cost = [](const VectorXd&) { return 0.0; };
    m.cost_grad = [](const VectorXd&) { return RowVectorXd::Zero(1); };
    return m;
}

DynamicsModel drift_model(double x0) {
    DynamicsModel m = scalar_model("toy:drift", x0);
    m.rhs = [](const VectorXd&, const VectorXd& u, double p) { return VectorXd::Constant(1, u[0] + p); };
    m.rhs_jac_x = [](const VectorXd&, const VectorXd&, double) { return MatrixXd::Zero(1, 1); };
    m.rhs_jac_u = [](const VectorXd&, const VectorXd&, double) { return MatrixXd::Ones(1, 1); };
    return m;
}

DynamicsModel linear_model(double x0) {
    DynamicsModel m = scalar_model("toy:linear", x0);
    m.rhs = [](const VectorXd& x, const VectorXd& u, double p) {
        return VectorXd::Constant(1, -p * x[0] + u[0]);
    };
    m.rhs_jac_x = [](const VectorXd&, const VectorXd&, double p) { return MatrixXd::Constant(1, 1, -p); };
    m.rhs_jac_u = [](const VectorXd&, const VectorXd&, double) { return MatrixXd::Ones(1, 1); };
    return m;
}

MatrixXd fd_jacobian_x(const DynamicsModel& model, const VectorXd& x, const VectorXd& u, double p,
                       double rel_step) {
    MatrixXd J(model.n_x, model.n_x);
    for (int j = 0; j < model.n_x; ++j) {
        const double h = rel_step * std::max(1.0, std::abs(x[j]));
        VectorXd xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        J.col(j) = (model.rhs(xp, u, p) - model.rhs(xm, u, p)) / (2.0 * h);
    }
    return J;
}

MatrixXd fd_jacobian_u(const DynamicsModel& model, const VectorXd& x, const VectorXd& u, double p,
                       double rel_step) {
    MatrixXd J(model.n_x, model.n_u);
    for (int j = 0; j < model.n_u; ++j) {
        const double h = rel_step * std::max(1.0, std::abs(u[j]));
        VectorXd up = u, um = u;
        up[j] += h;
        um[j] -= h;
        J.col(j) = (model.rhs(x, up, p) - model.rhs(x, um, p)) / (2.0 * h);
    }
    return J;
}

}  // namespace droc
