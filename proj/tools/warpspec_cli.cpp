// Command-line front end: `warpspec --config run.cfg [--out dir] [--tol x] [--threads n] [--seed s]`.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "warpspec/cli.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Spectra of rotationally symmetric model spaces: warping, eigenvalues, counts and checks"};
    std::string config_path;
    warpspec::cli::Overrides ov;
    std::string out;
    double tol = 0.0;
    unsigned threads = 0;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "experiment config file")->required();
    auto* out_opt = app.add_option("--out", out, "output directory for CSV artifacts");
    auto* tol_opt = app.add_option("--tol", tol, "solver tolerance in (1e-14, 1e-4)");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads for independent cells")->check(CLI::PositiveNumber);
    auto* seed_opt = app.add_option("--seed", seed, "seed for randomized draws");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(warpspec::cli::ExitCode::validation);
    }
    if (*out_opt) ov.out = out;
    if (*tol_opt) ov.tol = tol;
    if (*threads_opt) ov.threads = threads;
    if (*seed_opt) ov.seed = seed;

    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "config error: cannot read " << config_path << '\n';
        return static_cast<int>(warpspec::cli::ExitCode::validation);
    }
    std::ostringstream text;
    text << in.rdbuf();
    return warpspec::cli::main_entry(text.str(), ov, std::cout, std::cerr);
}
