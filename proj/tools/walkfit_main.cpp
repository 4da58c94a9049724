#include "walkfit/classify.hpp"
#include "walkfit/fit.hpp"
#include "walkfit/io.hpp"
#include "walkfit/moments.hpp"
#include "walkfit/simulate.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace walkfit;

struct SimulateArgs {
    std::string model;
    double D = 0.0, vb = 0.0, lbd = 0.0, ldb = 0.0;
    double tau0 = 0.0, gamma = 0.0, v = 0.0;
    std::size_t steps = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::string initial_phase;
    std::string out;
};

struct MomentsArgs {
    std::string in;
    std::size_t lags = 25;
    std::string out;
};

struct FitArgs {
    std::string model;
    std::string in;
    std::size_t lags = 25;
    int starts = 16;
    int ensemble = 64;
    int max_iters = 400;
    double tol = 1e-6;
    double param_tol = 1e-3;
    int threads = 1;
    std::uint64_t seed = 0;
    std::string out;
};

void add_fit_options(CLI::App* cmd, FitArgs& args, bool with_model) {
    if (with_model) {
        cmd->add_option("--model", args.model, "Model family to fit")
            ->required()
            ->check(CLI::IsMember({"is", "levy"}));
    }
    cmd->add_option("--in", args.in, "Input trajectory CSV (t,x,y)")->required();
    cmd->add_option("--lags", args.lags, "Number of log-spaced lags (default 25)");
    cmd->add_option("--starts", args.starts, "Optimizer starts (default 16)");
    cmd->add_option("--ensemble", args.ensemble,
                    "Trajectories per model-moment evaluation (default 64)");
    cmd->add_option("--max-iters", args.max_iters,
                    "Simplex iterations per start (default 400)");
    cmd->add_option("--tol", args.tol,
                    "Objective-spread stopping tolerance (default 1e-6)");
    cmd->add_option("--param-tol", args.param_tol,
                    "Log-space simplex-extent stopping tolerance (default 1e-3)");
    cmd->add_option("--threads", args.threads,
                    "Worker threads for ensemble evaluation (default 1)");
    cmd->add_option("--seed", args.seed, "Master RNG seed")->required();
    cmd->add_option("--out", args.out, "Output report JSON")->required();
}

FitConfig config_from(const FitArgs& args) {
    FitConfig config;
    config.n_starts = args.starts;
    config.max_iters = args.max_iters;
    config.tolerance = args.tol;
    config.param_tolerance = args.param_tol;
    config.ensemble_size = args.ensemble;
    config.n_workers = args.threads;
    return config;
}

void run_simulate(const CLI::App& cmd, const SimulateArgs& args) {
    Trajectory traj;
    if (args.model == "is") {
        for (const char* flag : {"--D", "--vb", "--lbd", "--ldb"}) {
            if (cmd.count(flag) == 0) {
                throw std::invalid_argument(
                    std::string("--model is requires ") + flag);
            }
        }
        for (const char* flag : {"--tau0", "--gamma", "--v"}) {
            if (cmd.count(flag) != 0) {
                throw std::invalid_argument(std::string(flag) +
                                            " does not apply to --model is");
            }
        }
        std::optional<PhaseLabel> phase;
        if (!args.initial_phase.empty()) {
            phase = args.initial_phase == "ballistic" ? PhaseLabel::Ballistic
                                                      : PhaseLabel::Diffusive;
        }
        traj = simulate_intermittent(IsParams{args.D, args.vb, args.lbd, args.ldb},
                                     args.steps, args.dt, args.seed, phase);
    } else {
        for (const char* flag : {"--tau0", "--gamma", "--v"}) {
            if (cmd.count(flag) == 0) {
                throw std::invalid_argument(
                    std::string("--model levy requires ") + flag);
            }
        }
        for (const char* flag : {"--D", "--vb", "--lbd", "--ldb", "--initial-phase"}) {
            if (cmd.count(flag) != 0) {
                throw std::invalid_argument(std::string(flag) +
                                            " does not apply to --model levy");
            }
        }
        traj = simulate_levy(LwParams{args.tau0, args.gamma, args.v}, args.steps,
                             args.dt, args.seed);
    }
    write_trajectory(traj, args.out);
}

void run_moments(const MomentsArgs& args) {
    const Trajectory traj = read_trajectory(args.in);
    const LagGrid grid = LagGrid::log_spaced(traj.dt, traj.n_steps(), args.lags);
    write_moments(empirical_moments(traj, grid), args.out);
}

void run_fit(const FitArgs& args) {
    const Trajectory traj = read_trajectory(args.in);
    const LagGrid grid = LagGrid::log_spaced(traj.dt, traj.n_steps(), args.lags);
    const MomentCurve curve = empirical_moments(traj, grid);
    const DataMeta meta{traj.dt, traj.n_steps()};
    const ModelKind kind =
        args.model == "is" ? ModelKind::Intermittent : ModelKind::Levy;
    write_report(fit_model(kind, curve, meta, config_from(args), args.seed),
                 args.out);
}

void run_classify(const FitArgs& args) {
    const Trajectory traj = read_trajectory(args.in);
    const LagGrid grid = LagGrid::log_spaced(traj.dt, traj.n_steps(), args.lags);
    write_report(classify_trajectory(traj, grid, config_from(args), args.seed),
                 args.out);
}

int run(int argc, char** argv) {
    CLI::App app{
        "walkfit: simulate, summarize, fit, and classify planar random walks"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand(
        "simulate", "Simulate a trajectory and write it as t,x,y CSV");
    sim->add_option("--model", sim_args.model,
                    "Process family: is (intermittent) or levy")
        ->required()
        ->check(CLI::IsMember({"is", "levy"}));
    sim->add_option("--D", sim_args.D, "Diffusion coefficient (is)");
    sim->add_option("--vb", sim_args.vb, "Ballistic speed (is)");
    sim->add_option("--lbd", sim_args.lbd, "Ballistic-to-diffusive rate (is)");
    sim->add_option("--ldb", sim_args.ldb, "Diffusive-to-ballistic rate (is)");
    sim->add_option("--tau0", sim_args.tau0, "Flight-time scale (levy)");
    sim->add_option("--gamma", sim_args.gamma, "Flight-time tail exponent (levy)");
    sim->add_option("--v", sim_args.v, "Constant speed (levy)");
    sim->add_option("--steps", sim_args.steps, "Number of steps")->required();
    sim->add_option("--dt", sim_args.dt, "Time step")->required();
    sim->add_option("--seed", sim_args.seed, "Master RNG seed")->required();
    sim->add_option("--initial-phase", sim_args.initial_phase,
                    "Starting phase (is); default is the stationary draw")
        ->check(CLI::IsMember({"ballistic", "diffusive"}));
    sim->add_option("--out", sim_args.out, "Output trajectory CSV")->required();

    MomentsArgs mom_args;
    auto* mom = app.add_subcommand(
        "moments", "Estimate empirical velocity moments over a lag grid");
    mom->add_option("--in", mom_args.in, "Input trajectory CSV (t,x,y)")
        ->required();
    mom->add_option("--lags", mom_args.lags,
                    "Number of log-spaced lags (default 25)");
    mom->add_option("--out", mom_args.out, "Output moments CSV")->required();

    FitArgs fit_args;
    auto* fit = app.add_subcommand(
        "fit", "Fit one model family to a trajectory's moment curve");
    add_fit_options(fit, fit_args, true);

    FitArgs cls_args;
    auto* cls = app.add_subcommand(
        "classify", "Fit both families and classify by the gamma score");
    add_fit_options(cls, cls_args, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    if (app.got_subcommand(sim)) {
        run_simulate(*sim, sim_args);
    } else if (app.got_subcommand(mom)) {
        run_moments(mom_args);
    } else if (app.got_subcommand(fit)) {
        run_fit(fit_args);
    } else {
        run_classify(cls_args);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
