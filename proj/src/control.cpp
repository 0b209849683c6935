#include "droc/control.hpp"

#include <algorithm>

#include "droc/errors.hpp"

namespace droc {

DirectionIndex direction_index(int j, int n_u, int n_pieces) {
    if (n_u < 1 || j < 1 || j > n_pieces * n_u)
        throw Error(ErrorCode::OutOfDomain, "direction index " + std::to_string(j) + " out of range");
    return {(j - 1) / n_u + 1, (j - 1) % n_u + 1};
}

int flat_index(DirectionIndex d, int n_u) { return (d.piece - 1) * n_u + d.component; }

ControlGrid::ControlGrid(std::vector<double> breakpoints, MatrixXd values, ControlBox box)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)), box_(std::move(box)) {
    box_.validate();
    if (breakpoints_.size() < 2 || breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0)
        throw Error(ErrorCode::InvalidArgument, "breakpoints must start at 0 and end at 1");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i)
        if (!(breakpoints_[i] > breakpoints_[i - 1]))
            throw Error(ErrorCode::InvalidArgument, "breakpoints must be strictly increasing");
    if (values_.rows() != static_cast<Eigen::Index>(breakpoints_.size()) - 1 || values_.cols() != box_.dim())
        throw Error(ErrorCode::DimensionMismatch, "control values do not match grid/box dimensions");
    for (Eigen::Index k = 0; k < values_.rows(); ++k)
        if (!box_.contains(values_.row(k).transpose()))
            throw Error(ErrorCode::OutOfDomain, "control value outside box on piece " + std::to_string(k + 1));
}

ControlGrid ControlGrid::uniform(int n_pieces, const ControlBox& box, const VectorXd& value) {
    if (n_pieces < 1) throw Error(ErrorCode::InvalidArgument, "need at least one control piece");
    std::vector<double> bp(n_pieces + 1);
    for (int k = 0; k <= n_pieces; ++k) bp[k] = static_cast<double>(k) / n_pieces;
    bp.back() = 1.0;
    MatrixXd values = value.transpose().replicate(n_pieces, 1);
    return ControlGrid(std::move(bp), std::move(values), box);
}

ControlGrid ControlGrid::uniform(int n_pieces, const ControlBox& box) {
    return uniform(n_pieces, box, box.lower);
}

int ControlGrid::piece_index(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::OutOfDomain, "control evaluated outside [0, 1]");
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    int k = static_cast<int>(it - breakpoints_.begin()) - 1;
    return std::min(k, pieces() - 1);
}

VectorXd ControlGrid::eval(double t) const { return piece_value(piece_index(t)); }

VectorXd ControlGrid::flatten() const {
    VectorXd v(n_params());
    for (int k = 0; k < pieces(); ++k) v.segment(k * n_u(), n_u()) = values_.row(k).transpose();
    return v;
}

ControlGrid ControlGrid::with_values(const MatrixXd& values) const {
    return ControlGrid(breakpoints_, values, box_);
}

ControlGrid ControlGrid::with_flat(const VectorXd& v) const {
    if (v.size() != n_params()) throw Error(ErrorCode::DimensionMismatch, "flat control has wrong length");
    MatrixXd values(pieces(), n_u());
    for (int k = 0; k < pieces(); ++k) values.row(k) = v.segment(k * n_u(), n_u()).transpose();
    return with_values(values);
}

VectorXd ControlGrid::flat_lower() const { return box_.lower.replicate(pieces(), 1); }
VectorXd ControlGrid::flat_upper() const { return box_.upper.replicate(pieces(), 1); }

VectorXd eval_control(const ControlGrid& grid, double t) { return grid.eval(t); }

ControlGrid project_to_box(const ControlGrid& grid, const MatrixXd& raw) {
    if (raw.rows() != grid.pieces() || raw.cols() != grid.n_u())
        throw Error(ErrorCode::DimensionMismatch, "project_to_box: shape mismatch");
    MatrixXd clamped = raw;
    for (int k = 0; k < raw.rows(); ++k)
        for (int l = 0; l < raw.cols(); ++l)
            clamped(k, l) = std::clamp(raw(k, l), grid.box().lower[l], grid.box().upper[l]);
    return grid.with_values(clamped);
}

VectorXd clamp_flat(const VectorXd& v, const VectorXd& lower, const VectorXd& upper) {
    return v.cwiseMax(lower).cwiseMin(upper);
}

}  // namespace droc
