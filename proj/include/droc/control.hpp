#pragma once

#include <vector>

#include "droc/dynamics.hpp"

namespace droc {

// 1-based (piece, component) address of a flat control parameter.
struct DirectionIndex {
    int piece;
    int component;
    bool operator==(const DirectionIndex&) const = default;
};

// Flat index j (1-based) -> (k, l). Parameters are flattened piece-major:
// v = [v^1_1 .. v^1_nu, v^2_1 .. v^2_nu, ...]; a zero remainder maps to l = n_u.
DirectionIndex direction_index(int j, int n_u, int n_pieces);
int flat_index(DirectionIndex d, int n_u);

// Piecewise-constant control on normalized time: row k-1 of values is held on
// [t_{k-1}, t_k); the last piece is closed at t = 1.
class ControlGrid {
public:
    ControlGrid(std::vector<double> breakpoints, MatrixXd values, ControlBox box);

    static ControlGrid uniform(int n_pieces, const ControlBox& box, const VectorXd& value);
    static ControlGrid uniform(int n_pieces, const ControlBox& box);  // lower bound everywhere

    int pieces() const { return static_cast<int>(values_.rows()); }
    int n_u() const { return static_cast<int>(values_.cols()); }
    int n_params() const { return pieces() * n_u(); }

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const MatrixXd& values() const { return values_; }
    const ControlBox& box() const { return box_; }

    double piece_start(int k) const { return breakpoints_[k]; }  // 0-based piece
    double piece_end(int k) const { return breakpoints_[k + 1]; }

    // 0-based piece owning t.
    int piece_index(double t) const;
    VectorXd eval(double t) const;
    VectorXd piece_value(int k) const { return values_.row(k).transpose(); }

    VectorXd flatten() const;
    ControlGrid with_values(const MatrixXd& values) const;
    ControlGrid with_flat(const VectorXd& v) const;

    // Flattened box bounds, aligned with flatten().
    VectorXd flat_lower() const;
    VectorXd flat_upper() const;

private:
    std::vector<double> breakpoints_;
    MatrixXd values_;
    ControlBox box_;
};

VectorXd eval_control(const ControlGrid& grid, double t);

// Componentwise clamp of raw values into the grid's box.
ControlGrid project_to_box(const ControlGrid& grid, const MatrixXd& raw);
VectorXd clamp_flat(const VectorXd& v, const VectorXd& lower, const VectorXd& upper);

}  // namespace droc
