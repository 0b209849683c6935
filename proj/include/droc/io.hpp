#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "droc/control.hpp"

namespace droc {

std::string read_file(const std::string& path);

// Write to a sibling temp file, then rename over the target.
void write_file_atomic(const std::string& path, const std::string& content);

std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t value);

std::vector<std::string> split_csv_line(const std::string& line);

// Solution/control file: header "piece_index,t_start,t_end,u_1..u_nu", one row
// per piece (times in model units), then labelled scalar rows such as
// "y_1,,,<value>" that keep the field count fixed.
struct SolutionFile {
    Eigen::MatrixXd values;
    std::optional<Eigen::Vector3d> y;
    std::vector<std::pair<std::string, double>> scalars;
};

struct LabelledValue {
    std::string label;
    double value;
};

std::string solution_csv(const ControlGrid& grid, double t_f, const std::vector<LabelledValue>& scalars);
SolutionFile parse_solution_csv(const std::string& text);
SolutionFile read_solution_csv(const std::string& path);

}  // namespace droc
