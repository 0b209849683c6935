#pragma once

#include <string>
#include <vector>

#include "droc/outer.hpp"

namespace droc {

// Backward costate solution for one scenario on its forward mesh.
struct CostatePath {
    std::vector<double> mesh;
    std::vector<RowVectorXd> lambda;  // lambda(t) at every mesh point
    // Integral of lambda df/du_l over each control piece, flattened like v.
    // With theta = 1 this is the gradient of h(x(1)) with respect to v.
    VectorXd piece_gradient;
};

// lambda' = -lambda df/dx, lambda(1) = theta dh/dx, by RK4 on the reversed
// forward mesh. Forward states between mesh points come from cubic Hermite
// interpolation using f at the mesh nodes.
CostatePath integrate_costates(const DynamicsModel& model, const ControlGrid& grid, double p, double theta,
                               const Trajectory& trajectory);

struct KKTCertificate {
    VectorXd theta;                    // worst-case probabilities q* at the candidate
    VectorXd costs;                    // h(x^i(1))
    VectorXd g;                        // h_i - y'a^i
    double costate_terminal_residual = 0.0;
    double moment_residual = 0.0;      // ||b - sum theta_i a^i||_inf
    double complementarity_residual = 0.0;  // max_i |theta_i g_i|
    double stationarity_residual = 0.0;     // sup |projected piece integrals|
    double raw_stationarity_residual = 0.0; // same without box projection
    double max_constraint = 0.0;            // max_i g_i
    VectorXd stationarity;                  // projected piece integrals
    std::vector<CostatePath> costates;      // only scenarios with theta_i > 0 carry a path

    // Flat "key = value" text report.
    std::string to_text() const;
};

struct KKTTolerances {
    double moment = 1e-5;
    double complementarity = 1e-5;
    double stationarity = 1e-5;
};

KKTCertificate verify(const PenaltyProblem& problem, const VectorXd& v, const Vector3d& y);

bool certificate_passes(const KKTCertificate& cert, const KKTTolerances& tol);

}  // namespace droc
