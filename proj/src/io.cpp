#include "droc/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "droc/errors.hpp"

namespace droc {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp);
        out << content;
        if (!out.flush()) throw Error(ErrorCode::Io, "short write to " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot rename " + tmp + ": " + ec.message());
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << value;
    return os.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string solution_csv(const ControlGrid& grid, double t_f, const std::vector<LabelledValue>& scalars) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "piece_index,t_start,t_end";
    for (int l = 1; l <= grid.n_u(); ++l) os << ",u_" << l;
    os << "\r\n";
    for (int k = 0; k < grid.pieces(); ++k) {
        os << k + 1 << ',' << grid.piece_start(k) * t_f << ',' << grid.piece_end(k) * t_f;
        for (int l = 0; l < grid.n_u(); ++l) os << ',' << grid.values()(k, l);
        os << "\r\n";
    }
    const std::string pad(static_cast<std::size_t>(grid.n_u()) - 1, ',');
    for (const auto& s : scalars) os << s.label << ",,," << s.value << pad << "\r\n";
    return os.str();
}

SolutionFile parse_solution_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::map<int, std::vector<double>> rows;
    SolutionFile out;
    std::map<int, double> y;
    bool header = true;
    int n_u = -1;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (header) {
            header = false;
            if (f.size() < 4 || f[0] != "piece_index")
                throw Error(ErrorCode::Io, "control file must start with a piece_index,t_start,t_end,u_... header");
            n_u = static_cast<int>(f.size()) - 3;
            continue;
        }
        if (static_cast<int>(f.size()) != n_u + 3) throw Error(ErrorCode::Io, "control file row has wrong field count: " + line);
        try {
            std::size_t used = 0;
            const int k = std::stoi(f[0], &used);
            if (used == f[0].size()) {
                std::vector<double> u;
                for (int l = 0; l < n_u; ++l) u.push_back(std::stod(f[3 + l]));
                if (!rows.emplace(k, std::move(u)).second)
                    throw Error(ErrorCode::Io, "duplicate piece index " + std::to_string(k));
                continue;
            }
        } catch (const std::invalid_argument&) {
        }
        double value = 0.0;
        try {
            value = std::stod(f[3]);
        } catch (const std::exception&) {
            throw Error(ErrorCode::Io, "bad value in row '" + f[0] + "'");
        }
        if (f[0] == "y_1" || f[0] == "y_2" || f[0] == "y_3") y[f[0][2] - '0'] = value;
        out.scalars.emplace_back(f[0], value);
    }
    if (rows.empty()) throw Error(ErrorCode::Io, "control file has no piece rows");
    out.values.resize(static_cast<Eigen::Index>(rows.size()), n_u);
    int expect = 1;
    for (const auto& [k, u] : rows) {
        if (k != expect) throw Error(ErrorCode::Io, "piece indices must run 1..n without gaps");
        for (int l = 0; l < n_u; ++l) out.values(k - 1, l) = u[l];
        ++expect;
    }
    if (!y.empty()) {
        if (y.size() != 3 || !y.count(1) || !y.count(2) || !y.count(3))
            throw Error(ErrorCode::Io, "y block needs exactly y_1, y_2, y_3");
        out.y = Eigen::Vector3d(y[1], y[2], y[3]);
    }
    return out;
}

SolutionFile read_solution_csv(const std::string& path) { return parse_solution_csv(read_file(path)); }

}  // namespace droc
