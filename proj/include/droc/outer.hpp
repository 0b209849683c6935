#pragma once

#include <array>
#include <functional>
#include <cstdint>
#include <string>
#include <vector>

#include "droc/ambiguity.hpp"
#include "droc/control.hpp"
#include "droc/integrator.hpp"
#include "droc/lp.hpp"

namespace droc {

// Penalty/tolerance schedule of the outer loop. Initial tolerances are
// omega_0 = 1/rho0 and eta_0 = rho0^-0.1.
struct AlgorithmSchedule {
    double rho0 = 10.0;
    double alpha1 = 10.0;  // penalty growth, > 1
    double alpha2 = 0.5;   // gradient-tolerance shrink, < 1
    double alpha3 = 0.5;   // feasibility-tolerance shrink, < 1
    double omega_star = 1e-5;
    double eta_star = 1e-6;
    int max_outer = 30;
    int max_inner = 2000;  // projected-gradient iterations per outer round

    void validate() const;
};

enum class Strategy {
    Joint,         // (v, y) together by projected gradient
    AltDirection,  // y exact from Dual-ISP at each v, gradient steps in v only
};

Strategy parse_strategy(const std::string& name);
std::string to_string(Strategy strategy);

enum class InitialStep {
    Unit,              // every line search starts at step 1
    BarzilaiBorwein,   // first trial from the last two iterates, clamped to [1e-10, 1e10]
};

InitialStep parse_initial_step(const std::string& name);
std::string to_string(InitialStep step);

enum class Scaling {
    None,
    // Steps taken in coordinates where every control box has unit width and y
    // multiplies the moment basis [1, t, t^2] with t = (p - mid) / half_width.
    Normalized,
};

Scaling parse_scaling(const std::string& name);
std::string to_string(Scaling scaling);

struct TraceRecord {
    int k;
    double rho;
    double omega;
    double eta;
    double merit;
    double ytb;
    double G_eps;
    double max_g;
    double pg_norm;
    int inner_steps;  // projected-gradient steps taken this round
};

struct SolverOptions {
    AlgorithmSchedule schedule;
    double epsilon = 1e-3;
    bool epsilon_decrease = false;  // geometric epsilon schedule, off by default
    double epsilon_factor = 0.5;
    double epsilon_min = 1e-6;
    Strategy strategy = Strategy::Joint;
    InitialStep initial_step = InitialStep::BarzilaiBorwein;
    Scaling scaling = Scaling::Normalized;
    double armijo_c1 = 1e-4;
    double min_step = 1e-14;
    IntegratorOptions integrator;
    // Called after every outer round.
    std::function<void(const TraceRecord&)> on_outer;

    void validate() const;
};

// Everything the merit function needs except the iterate itself.
struct PenaltyProblem {
    DynamicsModel model;
    ControlGrid grid;  // template: breakpoints and box; values are replaced by v
    AmbiguitySpec spec;
    DiscreteSupport support;
    MomentLPData lp;  // b and a^i; c is filled per evaluation
    double epsilon = 1e-3;
    double rho = 10.0;
    IntegratorOptions integrator;

    PenaltyProblem(DynamicsModel model, ControlGrid grid, AmbiguitySpec spec, DiscreteSupport support,
                   double epsilon = 1e-3, double rho = 10.0, IntegratorOptions integrator = {});

    int n_v() const { return grid.n_params(); }
    int m() const { return support.size(); }
    VectorXd lower() const { return grid.flat_lower(); }
    VectorXd upper() const { return grid.flat_upper(); }
};

// g_i = h_i - y'a^i.
VectorXd constraint_value(const VectorXd& costs, const MomentLPData& data, const Vector3d& y);

// C^1 smoothing of max{0, g} with half-width epsilon, and its derivative.
double smooth_constraint(double g, double epsilon);
double smooth_constraint_derivative(double g, double epsilon);

struct MeritEval {
    double value = 0.0;
    double ytb = 0.0;
    double G = 0.0;       // sum of smoothed constraints
    double max_g = 0.0;   // largest unsmoothed constraint
    VectorXd costs;
    VectorXd g;
    VectorXd grad_v;      // empty when evaluated without sensitivities
    Vector3d grad_y = Vector3d::Zero();

    bool has_gradient() const { return grad_v.size() > 0; }
    VectorXd gradient() const;  // [grad_v; grad_y]
};

TrajectoryBundle integrate_problem(const PenaltyProblem& problem, const VectorXd& v, bool with_sensitivities);

// Merit yb + rho/2 G_eps^2 from precomputed scenario trajectories; gradients
// are produced when every trajectory carries sensitivities.
MeritEval merit(const PenaltyProblem& problem, const Vector3d& y, const TrajectoryBundle& trajectories);
MeritEval merit_at(const PenaltyProblem& problem, const VectorXd& v, const Vector3d& y, bool with_gradient = true);

// Central differences of the merit in (v, y); test/diagnostic oracle.
// Inside the smoothing band the merit curvature scales like rho/epsilon, so the
// central-difference step must sit well below epsilon times the control scale.
VectorXd merit_fd_gradient(const PenaltyProblem& problem, const VectorXd& v, const Vector3d& y, double step = 1e-7);

// Partial projection of d in R^{n_v+3}: at a lower bound keep min{0, d_i},
// at an upper bound keep max{0, d_i}; interior and y components unchanged.
VectorXd projected_gradient(const VectorXd& grad, const VectorXd& v, const VectorXd& lower, const VectorXd& upper);
double projected_gradient_norm(const VectorXd& grad, const VectorXd& v, const VectorXd& lower, const VectorXd& upper);


enum class SolveStatus { Converged, MaxIterations, LineSearchFailure };
std::string to_string(SolveStatus status);

struct SolveReport {
    SolveStatus status = SolveStatus::MaxIterations;
    VectorXd v;
    Vector3d y = Vector3d::Zero();
    double objective = 0.0;  // y'b at the reported iterate
    double merit = 0.0;
    double G_eps = 0.0;
    double max_g = 0.0;
    double pg_norm = 0.0;
    double epsilon = 0.0;
    double rho = 0.0;
    int outer_iterations = 0;
    int inner_iterations = 0;
    int merit_evaluations = 0;
    std::vector<TraceRecord> trace;
    // Every accepted step, as (merit before, merit after, c1 * grad'(z_new - z_old));
    // kept so the sufficient-decrease property can be audited.
    std::vector<std::array<double, 3>> armijo_log;
};

SolveReport solve(PenaltyProblem problem, const SolverOptions& options, const VectorXd& v0, const Vector3d& y0);

struct MultistartResult {
    VectorXd v;
    Vector3d y;
    double value = 0.0;  // y'b with y optimal for the drawn control
    int draw = 0;        // winning draw, 0-based
};

// Best of M uniform random controls, y from Dual-ISP at each; deterministic in
// the seed regardless of thread count.
MultistartResult multistart_init(const PenaltyProblem& problem, int M, std::uint64_t seed);

}  // namespace droc
