#pragma once

#include <Eigen/Dense>

#include "droc/ambiguity.hpp"

namespace droc {

using Eigen::MatrixXd;

enum class LPStatus { Optimal, Infeasible, Unbounded };

std::string to_string(LPStatus status);

enum class PivotRule {
    Bland,    // lowest-index entering and leaving variables; cannot cycle
    Dantzig,  // largest reduced cost; faster, falls back to Bland on stalls
};

struct SimplexOptions {
    PivotRule rule = PivotRule::Bland;
    int max_iterations = 10000;
    double optimality_tol = 1e-11;
    double pivot_tol = 1e-11;
    double feasibility_tol = 1e-9;
};

struct LPResult {
    LPStatus status = LPStatus::Infeasible;
    VectorXd primal;  // q
    VectorXd dual;    // y, from the final basis
    double objective = 0.0;
    int iterations = 0;
};

// max c'x  s.t.  A x = b, x >= 0 by two-phase primal simplex on a dense
// tableau. Rows are equilibrated before pivoting; the dual vector returned is
// for the unscaled rows, so that A'y >= c and y'b = c'x at optimality.
LPResult simplex_maximize(const MatrixXd& A, const VectorXd& b, const VectorXd& c, const SimplexOptions& opts = {});

// Phase 1 only: is {x >= 0 : A x = b} non-empty?
bool simplex_feasible(const MatrixXd& A, const VectorXd& b, const SimplexOptions& opts = {});

// Worst-case expectation sup_q sum q_i c_i over distributions on the support
// matching the moments. Unbounded cannot happen (sum q = 1) and is raised as
// InternalError.
LPResult solve_isp(const MomentLPData& data, const SimplexOptions& opts = {});

// min y'b s.t. y'a^i >= c_i, read off the same tableau; objective is y'b.
LPResult solve_dual_isp(const MomentLPData& data, const SimplexOptions& opts = {});

bool check_feasible_support(const AmbiguitySpec& spec, const DiscreteSupport& support);

}  // namespace droc
