#include "droc/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "droc/errors.hpp"

namespace droc {

std::string to_string(LPStatus status) {
    switch (status) {
        case LPStatus::Optimal: return "Optimal";
        case LPStatus::Infeasible: return "Infeasible";
        case LPStatus::Unbounded: return "Unbounded";
    }
    return "Unknown";
}

namespace {

// Tableau [B^-1 A | B^-1 | B^-1 b] over structural columns 0..n-1 and
// artificial columns n..n+r-1. Reduced costs are recomputed from the basis
// each iteration rather than carried as an objective row.
class DenseSimplex {
public:
    DenseSimplex(const MatrixXd& A, const VectorXd& b, const SimplexOptions& opts)
        : r_(static_cast<int>(A.rows())), n_(static_cast<int>(A.cols())), opts_(opts), row_scale_(r_) {
        if (b.size() != r_) throw Error(ErrorCode::DimensionMismatch, "LP: rhs length does not match rows");
        T_ = MatrixXd::Zero(r_, n_ + r_ + 1);
        for (int i = 0; i < r_; ++i) {
            double s = A.row(i).cwiseAbs().maxCoeff();
            if (s == 0.0) s = 1.0;
            if (b[i] < 0.0) s = -s;
            row_scale_[i] = 1.0 / s;
            T_.block(i, 0, 1, n_) = A.row(i) * row_scale_[i];
            T_(i, n_ + i) = 1.0;
            T_(i, rhs()) = b[i] * row_scale_[i];
        }
        basis_.resize(r_);
        for (int i = 0; i < r_; ++i) basis_[i] = n_ + i;
    }

    // Returns false if the constraints are infeasible.
    bool phase1() {
        std::vector<double> cost(n_ + r_, 0.0);
        for (int i = 0; i < r_; ++i) cost[n_ + i] = -1.0;
        if (!optimize(cost, /*allow_artificial=*/true))
            throw Error(ErrorCode::InternalError, "LP phase 1 reported unbounded");
        double infeasibility = 0.0;
        for (int i = 0; i < r_; ++i)
            if (basis_[i] >= n_) infeasibility += T_(i, rhs());
        if (infeasibility > opts_.feasibility_tol) return false;
        drive_out_artificials();
        return true;
    }

    // Returns false if unbounded.
    bool phase2(const VectorXd& c) {
        std::vector<double> cost(n_ + r_, 0.0);
        for (int j = 0; j < n_; ++j) cost[j] = c[j];
        cost_ = cost;
        return optimize(cost, /*allow_artificial=*/false);
    }

    VectorXd primal() const {
        VectorXd x = VectorXd::Zero(n_);
        for (int i = 0; i < r_; ++i)
            if (basis_[i] < n_) x[basis_[i]] = std::max(0.0, T_(i, rhs()));
        return x;
    }

    // y = D (c_B' B^-1); the artificial block of the tableau holds B^-1 of the
    // scaled system.
    VectorXd dual() const {
        VectorXd y = VectorXd::Zero(r_);
        for (int i = 0; i < r_; ++i) {
            const double cb = cost_[basis_[i]];
            if (cb != 0.0) y += cb * T_.block(i, n_, 1, r_).transpose();
        }
        for (int i = 0; i < r_; ++i) y[i] *= row_scale_[i];
        return y;
    }

    int iterations() const { return iterations_; }

private:
    int rhs() const { return n_ + r_; }

    double reduced_cost(const std::vector<double>& cost, int j) const {
        double z = 0.0;
        for (int i = 0; i < r_; ++i) z += cost[basis_[i]] * T_(i, j);
        return cost[j] - z;
    }

    bool is_basic(int j) const {
        for (int b : basis_)
            if (b == j) return true;
        return false;
    }

    int choose_entering(const std::vector<double>& cost, bool allow_artificial, bool bland) const {
        const int limit = allow_artificial ? n_ + r_ : n_;
        int best = -1;
        double best_d = opts_.optimality_tol;
        for (int j = 0; j < limit; ++j) {
            if (is_basic(j)) continue;
            const double d = reduced_cost(cost, j);
            if (d > best_d) {
                best = j;
                if (bland) break;
                best_d = d;
            }
        }
        return best;
    }

    int choose_leaving(int j) const {
        int leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < r_; ++i) {
            const double a = T_(i, j);
            if (a <= opts_.pivot_tol) continue;
            const double ratio = std::max(0.0, T_(i, rhs())) / a;
            if (ratio < best - 1e-14 || (std::abs(ratio - best) <= 1e-14 && leave >= 0 && basis_[i] < basis_[leave])) {
                best = ratio;
                leave = i;
            }
        }
        return leave;
    }

    void pivot(int row, int col) {
        T_.row(row) /= T_(row, col);
        for (int i = 0; i < r_; ++i) {
            if (i == row) continue;
            const double f = T_(i, col);
            if (f != 0.0) T_.row(i) -= f * T_.row(row);
        }
        basis_[row] = col;
        ++iterations_;
    }

    bool optimize(const std::vector<double>& cost, bool allow_artificial) {
        cost_ = cost;
        int stall = 0;
        for (;;) {
            if (iterations_ >= opts_.max_iterations)
                throw Error(ErrorCode::InternalError, "LP iteration limit reached");
            // Dantzig can cycle under degeneracy; after a run of degenerate
            // pivots switch to Bland for the rest of the phase.
            const bool bland = opts_.rule == PivotRule::Bland || stall > 50;
            const int enter = choose_entering(cost, allow_artificial, bland);
            if (enter < 0) return true;
            const int leave = choose_leaving(enter);
            if (leave < 0) return false;
            stall = T_(leave, rhs()) <= opts_.pivot_tol ? stall + 1 : 0;
            pivot(leave, enter);
        }
    }

    void drive_out_artificials() {
        for (int i = 0; i < r_; ++i) {
            if (basis_[i] < n_) continue;
            T_(i, rhs()) = 0.0;
            int col = -1;
            double best = 1e-9;
            for (int j = 0; j < n_; ++j) {
                if (!is_basic(j) && std::abs(T_(i, j)) > best) {
                    best = std::abs(T_(i, j));
                    col = j;
                }
            }
            // No structural entry: the row is redundant and its artificial
            // stays basic at zero for good.
            if (col >= 0) pivot(i, col);
        }
    }

    int r_;
    int n_;
    SimplexOptions opts_;
    VectorXd row_scale_;
    MatrixXd T_;
    std::vector<int> basis_;
    std::vector<double> cost_;
    int iterations_ = 0;
};

}  // namespace

LPResult simplex_maximize(const MatrixXd& A, const VectorXd& b, const VectorXd& c, const SimplexOptions& opts) {
    if (c.size() != A.cols()) throw Error(ErrorCode::DimensionMismatch, "LP: cost length does not match columns");
    DenseSimplex lp(A, b, opts);
    LPResult res;
    if (!lp.phase1()) {
        res.status = LPStatus::Infeasible;
        res.iterations = lp.iterations();
        return res;
    }
    const bool bounded = lp.phase2(c);
    res.iterations = lp.iterations();
    if (!bounded) {
        res.status = LPStatus::Unbounded;
        return res;
    }
    res.status = LPStatus::Optimal;
    res.primal = lp.primal();
    res.dual = lp.dual();
    res.objective = c.dot(res.primal);
    return res;
}

bool simplex_feasible(const MatrixXd& A, const VectorXd& b, const SimplexOptions& opts) {
    DenseSimplex lp(A, b, opts);
    return lp.phase1();
}

LPResult solve_isp(const MomentLPData& data, const SimplexOptions& opts) {
    if (data.m() < 1) throw Error(ErrorCode::InvalidArgument, "ISP needs at least one support point");
    LPResult res = simplex_maximize(data.a, data.b, data.c, opts);
    if (res.status == LPStatus::Unbounded) throw Error(ErrorCode::InternalError, "ISP reported unbounded");
    return res;
}

LPResult solve_dual_isp(const MomentLPData& data, const SimplexOptions& opts) {
    LPResult res = solve_isp(data, opts);
    if (res.status == LPStatus::Optimal) res.objective = res.dual.dot(data.b);
    return res;
}

bool check_feasible_support(const AmbiguitySpec& spec, const DiscreteSupport& support) {
    if (support.size() == 0) return false;
    const MomentLPData data = build_moment_lp(spec, support, VectorXd::Zero(support.size()));
    return simplex_feasible(data.a, data.b);
}

}  // namespace droc
