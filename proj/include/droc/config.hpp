#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "droc/ambiguity.hpp"
#include "droc/kkt.hpp"
#include "droc/outer.hpp"

namespace droc {

struct DensityConfig {
    std::string type;  // uniform | truncnorm | table
    double mu = 0.0;
    double sigma = 0.0;
    std::string path;  // table only, resolved against the config directory
};

// The five sections of a problem file. Every key is validated on load and
// unknown keys are rejected.
struct ProblemConfig {
    struct Model {
        std::string name;  // fedbatch | toy:zero | toy:drift | toy:linear
        FedBatchParams params;
        VectorXd x0;
        double t_f = 1.0;
    } model;

    struct Ambiguity {
        AmbiguitySpec spec;
        int m = 10;
        Placement placement = Placement::Paper;
        std::optional<std::vector<double>> support;  // explicit support overrides the grid
        std::optional<DensityConfig> density;
        int quad_points = 64;
    } ambiguity;

    struct Control {
        int pieces = 1;
        ControlBox box;
        std::optional<std::vector<double>> breakpoints;
    } control;

    struct Solver {
        SolverOptions options;
        int multistart = 200;
        std::uint64_t seed = 42;
        KKTTolerances kkt{1e-5, 1e-5, 1e-3};
        bool fd_check = true;
    } solver;

    struct Output {
        std::string directory = "out";
        bool trace = true;
    } output;

    std::string source_path;
    std::string source_text;

    DynamicsModel build_model() const;
    DiscreteSupport build_support() const;
    ControlGrid build_grid() const;
    PenaltyProblem build_problem() const;
    Density build_density() const;
};

ProblemConfig parse_config(const std::string& text, const std::string& source_path = "");
ProblemConfig load_config(const std::string& path);

}  // namespace droc
