// pulsekit: shaped-pulse optimization toolkit for a single spin-1/2.
//
// Subcommands:
//   optimize  -- run a pulse optimization from a JSON config
//   simulate  -- evaluate a shape file over an offset/B1 grid
//   gradcheck -- verify analytic gradients against the independent oracles
//   bench     -- time the derivative kernels per method and control
//
// Exit codes: 0 success, 1 validation failure, 2 numerical-check failure.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pulsekit/bench.hpp"
#include "pulsekit/config.hpp"
#include "pulsekit/gradcheck.hpp"
#include "pulsekit/optimizer.hpp"
#include "pulsekit/shape_io.hpp"
#include "pulsekit/simprofile.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int cmd_optimize(const std::string& config_path, const std::string& out_dir,
                 std::int64_t seed_override, int starts_override, int threads) {
    pulsekit::RunConfig cfg = pulsekit::load_config(config_path);
    if (!cfg.optimize.has_value())
        throw pulsekit::ConfigError(config_path + ": no 'problem' section for optimize");
    pulsekit::OptimizeJob job = *cfg.optimize;
    if (seed_override >= 0) job.problem.options.seed = static_cast<std::uint64_t>(seed_override);
    if (starts_override > 0) job.starts = starts_override;

    fs::create_directories(out_dir);

    pulsekit::MultistartResult result;
    if (job.problem.options.init_strategy == pulsekit::InitStrategy::FromFile) {
        const pulsekit::PulseShape initial = pulsekit::read_shape_native(job.init_file);
        result.best = pulsekit::optimize(job.problem, initial, threads);
        result.all.push_back(result.best);
    } else {
        std::vector<std::uint64_t> seeds;
        for (int i = 0; i < job.starts; ++i)
            seeds.push_back(job.problem.options.seed + static_cast<std::uint64_t>(i));
        result = pulsekit::multistart(job.problem, seeds, threads);
    }
    const pulsekit::OptimizationResult& best = result.best;

    const auto* constraint =
        job.problem.constraint.has_value() ? &*job.problem.constraint : nullptr;
    pulsekit::write_shape_native(best.shape, (fs::path(out_dir) / "shape.json").string());
    pulsekit::write_shape_jcamp(best.shape, (fs::path(out_dir) / "shape.jcamp").string(),
                                constraint);

    json report;
    report["quality"] = best.quality;
    report["signed_phi"] = best.signed_phi;
    report["iterations"] = best.iterations;
    report["wall_time_s"] = best.wall_time_s;
    report["time_per_iteration_ms"] =
        best.iterations > 0 ? 1e3 * best.wall_time_s / best.iterations : 0.0;
    report["termination"] = pulsekit::termination_name(best.termination);
    report["seed"] = best.seed;
    json starts = json::array();
    for (const auto& r : result.all)
        starts.push_back({{"seed", r.seed},
                          {"quality", r.quality},
                          {"iterations", r.iterations},
                          {"wall_time_s", r.wall_time_s},
                          {"termination", pulsekit::termination_name(r.termination)}});
    report["starts"] = std::move(starts);
    std::ofstream rs(fs::path(out_dir) / "report.json");
    rs << report.dump(2) << '\n';

    std::ofstream ts(fs::path(out_dir) / "trajectory.tsv");
    ts.precision(12);
    ts << "# iteration\tphi\n";
    for (std::size_t i = 0; i < best.trajectory.size(); ++i)
        ts << i << '\t' << best.trajectory[i] << '\n';

    std::cout << "quality " << best.quality << " after " << best.iterations << " iterations ("
              << pulsekit::termination_name(best.termination) << ", " << best.wall_time_s
              << " s)\n";
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 const std::string& format_override, int threads) {
    pulsekit::RunConfig cfg = pulsekit::load_config(config_path);
    if (!cfg.simulate.has_value())
        throw pulsekit::ConfigError(config_path + ": no 'simulate' section");
    pulsekit::SimulateJob job = *cfg.simulate;
    if (!format_override.empty()) job.shape_format = format_override;

    pulsekit::PulseShape shape;
    if (job.shape_format == "jcamp")
        shape = pulsekit::read_shape_jcamp(job.shape_file,
                                           pulsekit::kTwoPi * job.jcamp_max_amplitude_hz *
                                               job.jcamp_dt_us * 1e-6,
                                           job.jcamp_dt_us * 1e-6);
    else
        shape = pulsekit::read_shape_native(job.shape_file);

    std::optional<pulsekit::ConstraintSpec> constraint;
    if (job.constraint.has_value())
        constraint = job.constraint->to_spec(shape.digits.front().dt);
    const auto* cptr = constraint.has_value() ? &*constraint : nullptr;

    const auto offsets = job.grid.offsets_hz();
    const auto scales = job.grid.b1_scales();
    pulsekit::ProfileTable table =
        job.kind == pulsekit::TargetKind::PointToPoint
            ? pulsekit::simulate_profile(shape, job.rho0, offsets, scales, cptr, threads)
            : pulsekit::simulate_ur_profile(shape, job.q_f, offsets, scales, cptr, threads);

    fs::create_directories(out_dir);
    std::ofstream os(fs::path(out_dir) / "profile.tsv");
    pulsekit::write_profile(os, table);
    std::cout << "wrote " << table.cells() << " cells to " << out_dir << "/profile.tsv\n";
    return 0;
}

int cmd_gradcheck(std::uint64_t seed, const std::string& basis, int draws) {
    pulsekit::GradcheckOptions options;
    options.seed = seed;
    options.basis_filter = basis;
    if (draws > 0) options.kernel_draws = draws;
    const pulsekit::GradcheckReport report = pulsekit::run_gradcheck(options);
    pulsekit::print_gradcheck(std::cout, report);
    return report.pass ? 0 : 2;
}

int cmd_bench(int calls, int reps, std::uint64_t seed) {
    pulsekit::BenchOptions options;
    options.calls = calls;
    options.reps = reps;
    options.seed = seed;
    const pulsekit::BenchReport report = pulsekit::run_bench(options);
    pulsekit::print_bench(std::cout, report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"single spin-1/2 shaped-pulse optimization toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", format_override, basis_filter;
    std::int64_t seed_override = -1;
    int starts_override = 0, threads = 0, draws = 0;
    std::uint64_t check_seed = 20240601, bench_seed = 7;
    int calls = 1000, reps = 5;

    auto* opt = app.add_subcommand("optimize", "run a pulse optimization");
    opt->add_option("--config", config_path, "JSON config file")->required();
    opt->add_option("--out", out_dir, "output directory");
    opt->add_option("--seed", seed_override, "override the config seed");
    opt->add_option("--starts", starts_override, "override the number of starts");
    opt->add_option("--threads", threads, "grid evaluation threads (0 = auto)");

    auto* sim = app.add_subcommand("simulate", "evaluate a shape over an offset/B1 grid");
    sim->add_option("--config", config_path, "JSON config file")->required();
    sim->add_option("--out", out_dir, "output directory");
    sim->add_option("--format", format_override, "shape file format (native|jcamp)")
        ->check(CLI::IsMember({"native", "jcamp"}));
    sim->add_option("--threads", threads, "simulation threads (0 = auto)");

    auto* chk = app.add_subcommand("gradcheck", "verify gradients against the oracles");
    chk->add_option("--seed", check_seed, "RNG seed");
    chk->add_option("--basis", basis_filter, "restrict to bases matching this substring");
    chk->add_option("--draws", draws, "random draws per basis");

    auto* ben = app.add_subcommand("bench", "time the derivative kernels");
    ben->add_option("--calls", calls, "kernel calls per timed batch");
    ben->add_option("--reps", reps, "timed repetitions (minimum reported)");
    ben->add_option("--seed", bench_seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (opt->parsed()) return cmd_optimize(config_path, out_dir, seed_override,
                                               starts_override, threads);
        if (sim->parsed()) return cmd_simulate(config_path, out_dir, format_override, threads);
        if (chk->parsed()) return cmd_gradcheck(check_seed, basis_filter, draws);
        if (ben->parsed()) return cmd_bench(calls, reps, bench_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
