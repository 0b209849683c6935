#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace droc {

using Eigen::Matrix3Xd;
using Eigen::Vector3d;
using Eigen::VectorXd;

// Mean/variance ambiguity set on a bounded support [p_lower, p_upper].
struct AmbiguitySpec {
    double mu = 0.0;
    double sigma = 0.0;
    double p_lower = 0.0;
    double p_upper = 1.0;

    double second_moment() const { return mu * mu + sigma * sigma; }
    // Throws unless some distribution on [p_lower, p_upper] has these moments.
    void validate() const;
};

struct DiscreteSupport {
    std::vector<double> points;  // strictly increasing

    int size() const { return static_cast<int>(points.size()); }
};

// Data of the moment LP: max c'q  s.t.  A q = b, q >= 0, with
// b = [1, mu, mu^2 + sigma^2] and column i of A equal to [1, p_i, p_i^2].
struct MomentLPData {
    Vector3d b;
    Matrix3Xd a;
    VectorXd c;

    int m() const { return static_cast<int>(a.cols()); }
};

enum class Placement {
    Paper,     // p_l + (i-1)/(m-1) (p_u - p_l): equally spaced, endpoints included
    Midpoint,  // centre of each cell
};

Placement parse_placement(const std::string& name);
std::string to_string(Placement placement);

// Splits [p_lower, p_upper] into m equal cells and returns one representative
// per cell.
DiscreteSupport characteristic_grid(const AmbiguitySpec& spec, int m, Placement placement = Placement::Paper);

double max_cell_width(const AmbiguitySpec& spec, int m);

MomentLPData build_moment_lp(const AmbiguitySpec& spec, const DiscreteSupport& support, const VectorXd& costs);

// A probability density on [p_lower, p_upper].
struct Density {
    std::string name;
    std::function<double(double)> psi;
};

Density uniform_density(const AmbiguitySpec& spec);
// Normal(mu, sigma) truncated to the spec's support and renormalized.
Density truncnorm_density(double mu, double sigma, double p_lower, double p_upper);
// Piecewise-linear interpolation of (p, psi) samples; zero outside the table.
Density table_density(std::vector<double> p, std::vector<double> psi);
Density table_density_from_csv(const std::string& path);

struct DiscretizedDensity {
    DiscreteSupport support;
    VectorXd weights;
    double raw_mass = 0.0;  // total quadrature mass before renormalization
};

// Cell probabilities by composite Simpson quadrature, renormalized to sum 1.
DiscretizedDensity discretize_density(const AmbiguitySpec& spec, const Density& density, int m, int quad_points,
                                      Placement placement = Placement::Paper);

// Mean and variance of a density over [p_lower, p_upper] by fine Simpson
// quadrature; used to pose the moment set a discretized density must match.
AmbiguitySpec density_moments(const Density& density, double p_lower, double p_upper, int intervals = 20000);

struct MomentErrors {
    double e1;  // |sum p q - mu|
    double e2;  // |sum p^2 q - (mu^2 + sigma^2)|
};

MomentErrors moment_discretization_error(const AmbiguitySpec& spec, const DiscreteSupport& support,
                                         const VectorXd& weights);

}  // namespace droc
