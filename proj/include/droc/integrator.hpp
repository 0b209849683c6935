#pragma once

#include <optional>
#include <span>
#include <vector>

#include "droc/control.hpp"
#include "droc/dynamics.hpp"

namespace droc {

struct IntegratorOptions {
    int steps_per_piece = 10;
    // Keep S(t) at every mesh point, not just S(1).
    bool store_sensitivity_path = false;
};

// One scenario's trajectory on a breakpoint-aligned mesh.
struct Trajectory {
    double param = 0.0;
    std::vector<double> mesh;
    std::vector<VectorXd> states;
    std::optional<MatrixXd> terminal_sensitivity;  // n_x x n_v, columns s^j(1)
    std::vector<MatrixXd> sensitivity_path;         // only with store_sensitivity_path

    const VectorXd& terminal_state() const { return states.back(); }
    bool has_sensitivities() const { return terminal_sensitivity.has_value(); }
};

// Per-scenario trajectories, one entry per support point, in support order.
using TrajectoryBundle = std::vector<Trajectory>;

// Classical RK4 with h = |I_k| / steps_per_piece inside each control piece.
Trajectory integrate(const DynamicsModel& model, const ControlGrid& grid, double p,
                     const IntegratorOptions& opts = {});

// State plus all n_v forward sensitivity columns in one augmented RK4 pass.
Trajectory integrate_with_sensitivities(const DynamicsModel& model, const ControlGrid& grid, double p,
                                        const IntegratorOptions& opts = {});

// dh/dx(x(1)) * S(1).
RowVectorXd cost_gradient(const DynamicsModel& model, const Trajectory& traj);

// Scenario batch over the support. The OpenMP version distributes scenarios
// across threads; the serial version is the reference it must match bit for bit.
TrajectoryBundle integrate_scenarios(const DynamicsModel& model, const ControlGrid& grid,
                                     std::span<const double> params, const IntegratorOptions& opts,
                                     bool with_sensitivities);
TrajectoryBundle integrate_scenarios_serial(const DynamicsModel& model, const ControlGrid& grid,
                                            std::span<const double> params, const IntegratorOptions& opts,
                                            bool with_sensitivities);

// h(x^i(1)) for every scenario.
VectorXd terminal_costs(const DynamicsModel& model, const TrajectoryBundle& bundle);

}  // namespace droc
