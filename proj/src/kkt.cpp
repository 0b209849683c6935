#include "droc/kkt.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "droc/errors.hpp"

namespace droc {

CostatePath integrate_costates(const DynamicsModel& model, const ControlGrid& grid, double p, double theta,
                               const Trajectory& traj) {
    if (traj.mesh.size() != traj.states.size() || traj.mesh.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "costates need a forward trajectory on its mesh");
    const int n_u = grid.n_u();
    const std::size_t N = traj.mesh.size();

    CostatePath out;
    out.mesh = traj.mesh;
    out.lambda.resize(N);
    out.piece_gradient = VectorXd::Zero(grid.n_params());

    RowVectorXd lam = theta * model.cost_grad(traj.states.back());
    out.lambda[N - 1] = lam;

    for (std::size_t j = N - 1; j-- > 0;) {
        const double t0 = traj.mesh[j], t1 = traj.mesh[j + 1];
        const double h = t1 - t0;
        const int k = grid.piece_index(0.5 * (t0 + t1));
        const VectorXd u = grid.piece_value(k);
        const VectorXd& x0 = traj.states[j];
        const VectorXd& x1 = traj.states[j + 1];
        const VectorXd f0 = model.rhs(x0, u, p);
        const VectorXd f1 = model.rhs(x1, u, p);
        const VectorXd xm = 0.5 * (x0 + x1) + h / 8.0 * (f0 - f1);

        const MatrixXd Jx1 = model.rhs_jac_x(x1, u, p), Jxm = model.rhs_jac_x(xm, u, p), Jx0 = model.rhs_jac_x(x0, u, p);
        const MatrixXd Ju1 = model.rhs_jac_u(x1, u, p), Jum = model.rhs_jac_u(xm, u, p), Ju0 = model.rhs_jac_u(x0, u, p);

        // Reversed time tau = 1 - t: dlambda/dtau = lambda df/dx.
        const RowVectorXd k1 = lam * Jx1;
        const RowVectorXd k2 = (lam + 0.5 * h * k1) * Jxm;
        const RowVectorXd k3 = (lam + 0.5 * h * k2) * Jxm;
        const RowVectorXd k4 = (lam + h * k3) * Jx0;
        const RowVectorXd r = h / 6.0 *
                              (lam * Ju1 + 2.0 * (lam + 0.5 * h * k1) * Jum + 2.0 * (lam + 0.5 * h * k2) * Jum +
                               (lam + h * k3) * Ju0);
        out.piece_gradient.segment(k * n_u, n_u) += r.transpose();
        lam += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!lam.allFinite() || lam.cwiseAbs().maxCoeff() > kBlowupThreshold)
            throw Error(ErrorCode::NumericalBlowup, "costate escaped at t = " + std::to_string(t0));
        out.lambda[j] = lam;
    }
    return out;
}

KKTCertificate verify(const PenaltyProblem& problem, const VectorXd& v, const Vector3d& y) {
    const ControlGrid grid = problem.grid.with_flat(v);
    const TrajectoryBundle bundle =
        integrate_scenarios(problem.model, grid, problem.support.points, problem.integrator, false);

    KKTCertificate cert;
    cert.costs = terminal_costs(problem.model, bundle);
    MomentLPData data = problem.lp;
    data.c = cert.costs;
    const LPResult isp = solve_isp(data);
    if (isp.status != LPStatus::Optimal) throw Error(ErrorCode::Infeasible, "moment-infeasible support");

    cert.theta = isp.primal;
    cert.g = constraint_value(cert.costs, data, y);
    cert.max_constraint = cert.g.maxCoeff();
    cert.moment_residual = (data.b - data.a * cert.theta).cwiseAbs().maxCoeff();
    cert.complementarity_residual = cert.theta.cwiseProduct(cert.g).cwiseAbs().maxCoeff();

    VectorXd r = VectorXd::Zero(grid.n_params());
    cert.costates.resize(bundle.size());
    for (std::size_t i = 0; i < bundle.size(); ++i) {
        const double th = cert.theta[static_cast<Eigen::Index>(i)];
        if (th <= 0.0) continue;
        cert.costates[i] = integrate_costates(problem.model, grid, bundle[i].param, th, bundle[i]);
        r += cert.costates[i].piece_gradient;
        const RowVectorXd want = th * problem.model.cost_grad(bundle[i].terminal_state());
        cert.costate_terminal_residual =
            std::max(cert.costate_terminal_residual, (cert.costates[i].lambda.back() - want).cwiseAbs().maxCoeff());
    }
    cert.raw_stationarity_residual = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
    cert.stationarity = projected_gradient(r, v, grid.flat_lower(), grid.flat_upper());
    cert.stationarity_residual = r.size() ? cert.stationarity.cwiseAbs().maxCoeff() : 0.0;
    return cert;
}

bool certificate_passes(const KKTCertificate& cert, const KKTTolerances& tol) {
    return cert.moment_residual <= tol.moment && cert.complementarity_residual <= tol.complementarity &&
           cert.stationarity_residual <= tol.stationarity;
}

std::string KKTCertificate::to_text() const {
    std::ostringstream os;
    os << std::setprecision(12);
    os << "# first-order optimality certificate\n";
    os << "# moment residual uses ||b - sum theta_i a^i|| with theta = worst-case probabilities;\n";
    os << "# the sign-flipped form b + sum theta_i a^i = 0 cannot hold for theta >= 0\n";
    os << "# stationarity is the box-projected piecewise integral of sum_i lambda^i df/du\n";
    os << "costate_terminal_residual = " << costate_terminal_residual << "\n";
    os << "moment_residual = " << moment_residual << "\n";
    os << "complementarity_residual = " << complementarity_residual << "\n";
    os << "stationarity_residual = " << stationarity_residual << "\n";
    os << "raw_stationarity_residual = " << raw_stationarity_residual << "\n";
    os << "max_constraint = " << max_constraint << "\n";
    for (Eigen::Index i = 0; i < theta.size(); ++i) os << "theta_" << i + 1 << " = " << theta[i] << "\n";
    return os.str();
}

}  // namespace droc
