#include "droc/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "droc/errors.hpp"

namespace droc {

void AmbiguitySpec::validate() const {
    if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be nonnegative");
    if (!(p_lower < p_upper)) throw Error(ErrorCode::InvalidArgument, "p_lower must be below p_upper");
    if (mu < p_lower || mu > p_upper) throw Error(ErrorCode::InvalidArgument, "mu outside [p_lower, p_upper]");
    // Relative slack so the boundary case (two-point distribution on the
    // endpoints) is not rejected by rounding.
    const double room = (mu - p_lower) * (p_upper - mu);
    if (room < sigma * sigma * (1.0 - 1e-12))
        throw Error(ErrorCode::Infeasible, "no distribution on [p_lower, p_upper] has this mean and variance");
}

Placement parse_placement(const std::string& name) {
    if (name == "paper") return Placement::Paper;
    if (name == "midpoint") return Placement::Midpoint;
    throw Error(ErrorCode::InvalidArgument, "unknown placement '" + name + "'");
}

std::string to_string(Placement placement) { return placement == Placement::Paper ? "paper" : "midpoint"; }

double max_cell_width(const AmbiguitySpec& spec, int m) { return (spec.p_upper - spec.p_lower) / m; }

DiscreteSupport characteristic_grid(const AmbiguitySpec& spec, int m, Placement placement) {
    if (m < 2) throw Error(ErrorCode::TooFewPoints, "need at least 2 cells, got " + std::to_string(m));
    if (!(spec.p_lower < spec.p_upper)) throw Error(ErrorCode::InvalidArgument, "empty support interval");
    const double L = spec.p_upper - spec.p_lower;
    DiscreteSupport s;
    s.points.resize(m);
    for (int i = 0; i < m; ++i) {
        s.points[i] = placement == Placement::Paper ? spec.p_lower + L * i / (m - 1)
                                                    : spec.p_lower + L * (i + 0.5) / m;
    }
    if (placement == Placement::Paper) s.points.back() = spec.p_upper;
    return s;
}

MomentLPData build_moment_lp(const AmbiguitySpec& spec, const DiscreteSupport& support, const VectorXd& costs) {
    if (costs.size() != support.size())
        throw Error(ErrorCode::DimensionMismatch, "support has " + std::to_string(support.size()) +
                                                      " points but " + std::to_string(costs.size()) + " costs");
    for (std::size_t i = 0; i < support.points.size(); ++i) {
        const double p = support.points[i];
        if (p < spec.p_lower || p > spec.p_upper)
            throw Error(ErrorCode::OutOfDomain, "support point outside [p_lower, p_upper]");
        if (i > 0 && !(p > support.points[i - 1]))
            throw Error(ErrorCode::InvalidArgument, "support points must be strictly increasing");
    }
    MomentLPData d;
    d.b << 1.0, spec.mu, spec.second_moment();
    d.a.resize(3, support.size());
    for (int i = 0; i < support.size(); ++i) {
        const double p = support.points[i];
        d.a.col(i) << 1.0, p, p * p;
    }
    d.c = costs;
    return d;
}

Density uniform_density(const AmbiguitySpec& spec) {
    const double height = 1.0 / (spec.p_upper - spec.p_lower);
    return {"uniform", [height](double) { return height; }};
}

Density truncnorm_density(double mu, double sigma, double p_lower, double p_upper) {
    if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "truncnorm sigma must be positive");
    const double s2 = sigma * std::sqrt(2.0);
    const double mass = 0.5 * (std::erf((p_upper - mu) / s2) - std::erf((p_lower - mu) / s2));
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI) * mass);
    return {"truncnorm", [=](double p) {
                if (p < p_lower || p > p_upper) return 0.0;
                const double z = (p - mu) / sigma;
                return norm * std::exp(-0.5 * z * z);
            }};
}

Density table_density(std::vector<double> p, std::vector<double> psi) {
    if (p.size() != psi.size() || p.size() < 2)
        throw Error(ErrorCode::InvalidDensity, "density table needs at least two (p, psi) rows");
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (psi[i] < 0.0) throw Error(ErrorCode::InvalidDensity, "negative density value in table");
        if (i > 0 && !(p[i] > p[i - 1])) throw Error(ErrorCode::InvalidDensity, "table abscissae must increase");
    }
    return {"table", [p = std::move(p), psi = std::move(psi)](double x) {
                if (x < p.front() || x > p.back()) return 0.0;
                auto it = std::upper_bound(p.begin(), p.end(), x);
                if (it == p.end()) return psi.back();
                const auto j = static_cast<std::size_t>(it - p.begin());
                const double w = (x - p[j - 1]) / (p[j] - p[j - 1]);
                return (1.0 - w) * psi[j - 1] + w * psi[j];
            }};
}

Density table_density_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open density table " + path);
    std::vector<double> p, psi;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double a, b;
        if (!(row >> a >> b)) {
            if (p.empty()) continue;  // header
            throw Error(ErrorCode::InvalidDensity, "malformed density table row: " + line);
        }
        p.push_back(a);
        psi.push_back(b);
    }
    return table_density(std::move(p), std::move(psi));
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int intervals,
               bool require_nonnegative = true) {
    if (intervals % 2) ++intervals;
    const double h = (b - a) / intervals;
    double sum = 0.0;
    for (int j = 0; j <= intervals; ++j) {
        const double v = f(a + j * h);
        if ((require_nonnegative && v < 0.0) || !std::isfinite(v))
            throw Error(ErrorCode::InvalidDensity, "density is negative or non-finite at p = " + std::to_string(a + j * h));
        const double w = (j == 0 || j == intervals) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        sum += w * v;
    }
    return sum * h / 3.0;
}

}  // namespace

DiscretizedDensity discretize_density(const AmbiguitySpec& spec, const Density& density, int m, int quad_points,
                                      Placement placement) {
    if (quad_points < 2) throw Error(ErrorCode::InvalidArgument, "quad_points must be >= 2");
    DiscretizedDensity out;
    out.support = characteristic_grid(spec, m, placement);
    out.weights.resize(m);
    const double w = max_cell_width(spec, m);
    for (int i = 0; i < m; ++i) {
        const double a = spec.p_lower + i * w;
        const double b = i + 1 == m ? spec.p_upper : spec.p_lower + (i + 1) * w;
        out.weights[i] = simpson(density.psi, a, b, quad_points);
    }
    out.raw_mass = out.weights.sum();
    if (std::abs(out.raw_mass - 1.0) > 1e-6)
        throw Error(ErrorCode::MassMismatch, "density integrates to " + std::to_string(out.raw_mass));
    out.weights /= out.raw_mass;
    return out;
}

AmbiguitySpec density_moments(const Density& density, double p_lower, double p_upper, int intervals) {
    const double m0 = simpson(density.psi, p_lower, p_upper, intervals);
    const double m1 = simpson([&](double p) { return p * density.psi(p); }, p_lower, p_upper, intervals, false) / m0;
    const double m2 = simpson([&](double p) { return p * p * density.psi(p); }, p_lower, p_upper, intervals, false) / m0;
    return {m1, std::sqrt(std::max(0.0, m2 - m1 * m1)), p_lower, p_upper};
}

MomentErrors moment_discretization_error(const AmbiguitySpec& spec, const DiscreteSupport& support,
                                         const VectorXd& weights) {
    if (weights.size() != support.size()) throw Error(ErrorCode::DimensionMismatch, "weights/support length");
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < support.size(); ++i) {
        m1 += support.points[i] * weights[i];
        m2 += support.points[i] * support.points[i] * weights[i];
    }
    return {std::abs(m1 - spec.mu), std::abs(m2 - spec.second_moment())};
}

}  // namespace droc
