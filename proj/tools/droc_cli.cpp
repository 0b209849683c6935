#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "droc/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Distributionally robust optimal control under mean/variance ambiguity"};
    app.require_subcommand(1);

    droc::GlobalOptions g;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out;
    auto* seed_opt = app.add_option("--seed", seed, "Random seed (overrides solver.seed)");
    auto* threads_opt = app.add_option("--threads", threads, "Worker threads (fallback: DROC_THREADS)");
    auto* out_opt = app.add_option("--out", out, "Output directory (overrides output.directory)");
    app.add_option("--config", g.config, "Problem configuration (JSON)");
    app.add_flag("--quiet", g.quiet, "Only report failures");
    app.fallthrough();

    std::string positional_config;
    auto config_arg = [&](CLI::App* sub) {
        sub->add_option("config", positional_config, "Problem configuration (JSON)");
    };

    auto* solve = app.add_subcommand("solve", "Solve the robust control problem end to end");
    config_arg(solve);

    std::string control_file;
    auto* inner = app.add_subcommand("inner", "Worst-case distribution for a fixed control");
    config_arg(inner);
    inner->add_option("--control", control_file, "Control CSV (piece_index,t_start,t_end,u_1)")->required();

    std::string solution_file;
    auto* check = app.add_subcommand("check", "Optimality certificate for a solution file");
    config_arg(check);
    check->add_option("--solution", solution_file, "Solution CSV written by solve")->required();

    auto* discretize = app.add_subcommand("discretize", "Discretize the configured density");
    config_arg(discretize);

    std::string reference;
    auto* bench = app.add_subcommand("bench", "Fed-batch reproduction table");
    bench->add_option("--reference", reference, "Benchmark reference data (JSON)");

    CLI11_PARSE(app, argc, argv);

    if (!positional_config.empty()) g.config = positional_config;
    if (*seed_opt) g.seed = seed;
    if (*threads_opt) g.threads = threads;
    if (*out_opt) g.out = out;

    droc::Streams io{std::cout, std::cerr};
    if (*solve) return droc::cmd_solve(g, io);
    if (*inner) return droc::cmd_inner(g, control_file, io);
    if (*check) return droc::cmd_check(g, solution_file, io);
    if (*discretize) return droc::cmd_discretize(g, io);
    return droc::cmd_bench(g, reference.empty() ? std::nullopt : std::optional<std::string>(reference), io);
}
