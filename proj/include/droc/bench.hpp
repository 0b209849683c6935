#pragma once

#include <string>
#include <vector>

#include "droc/ambiguity.hpp"
#include "droc/control.hpp"
#include "droc/dynamics.hpp"
#include "droc/integrator.hpp"
#include "droc/lp.hpp"

namespace droc {

// Fed-batch benchmark: model, ambiguity set, control grid and the published
// reference numbers, loaded from a versioned JSON data file.
struct BenchmarkCase {
    std::string name;
    FedBatchParams params;
    VectorXd x0;
    double t_f = 25.0;
    AmbiguitySpec spec;
    int m = 10;
    Placement placement = Placement::Paper;
    int pieces = 25;
    ControlBox box;
    int steps_per_piece = 10;

    VectorXd reference_control;
    VectorXd reference_biomass;
    VectorXd reference_q;
    double reference_J_star = 0.0;
    double reference_J_tilde_star = 0.0;

    DynamicsModel model() const;
    DiscreteSupport support() const;
    ControlGrid reference_grid() const;
    ControlGrid constant_grid(double u) const;
    IntegratorOptions integrator() const;
};

std::string default_benchmark_path();
BenchmarkCase load_benchmark(const std::string& path = default_benchmark_path());

// Terminal biomass X(1) per scenario under the reference control.
VectorXd reproduce_trajectories(const BenchmarkCase& bc);

struct WorstCase {
    LPResult primal;       // ISP: q and sup of expected cost
    LPResult dual;         // Dual-ISP: y and y'b
    double duality_gap = 0.0;
};

// ISP/Dual-ISP on costs -biomass.
WorstCase reproduce_worst_case(const BenchmarkCase& bc, const VectorXd& biomass);

struct Baseline {
    VectorXd biomass;
    VectorXd terminal_volume;
    double worst_case = 0.0;
    double spread = 0.0;  // max - min biomass
};

Baseline constant_control_baseline(const BenchmarkCase& bc, double u_const);

// Identities that hold on the published numbers alone.
struct ReferenceConsistency {
    double expected_cost;  // -sum q* X
    double mean;           // sum q* p
    double second_moment;  // sum q* p^2
};

ReferenceConsistency reference_consistency(const BenchmarkCase& bc);

// Rows (t [h], scenario_index, m_S, X, S, V), one per mesh point and scenario.
std::string trajectory_csv(const BenchmarkCase& bc, const ControlGrid& grid);

struct BenchRow {
    std::string check;
    double value;
    double reference;
    double tolerance;
    bool pass;
};

std::vector<BenchRow> run_reproduction(const BenchmarkCase& bc);

}  // namespace droc
