// Command-line driver: wp | energy | optimize | verify | ansatz.
//
// Exit codes: 0 ok, 1 check failure, 2 usage/parse error, 3 solver error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "shapes/energy.hpp"
#include "shapes/gs1.hpp"
#include "shapes/run_io.hpp"
#include "shapes/verify.hpp"

namespace fs = std::filesystem;
using namespace shapes;

namespace {

struct OutputSet {
    std::string out_dir;
    std::vector<std::pair<std::string, std::string>> written;  // path, content hash

    void write(const std::string& name, const std::string& content) {
        const std::string path = (fs::path(out_dir) / name).string();
        write_file_atomic(path, content);
        written.emplace_back(name, hex64(fnv1a64(content)));
    }
};

void write_record(const RunConfig& config, OutputSet& outputs, const std::string& started) {
    RunRecord record;
    record.config_hash = hex64(fnv1a64(config_to_json(config).dump()));
    record.command = config.command;
    record.started = started;
    record.finished = iso8601_now();
    record.outputs = outputs.written;
    write_file_atomic((fs::path(config.out_dir) / "run_record.json").string(),
                      record.to_json().dump(2) + "\n");
}

int thread_budget(std::size_t jobs) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("SHAPES_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    }
    return static_cast<int>(std::min<std::size_t>(hw, std::max<std::size_t>(jobs, 1)));
}

int cmd_wp(const RunConfig& config) {
    const std::string started = iso8601_now();
    if (config.shape_path.empty()) throw BadInput("wp requires a shape file (--shape)");
    const GridShape shape = read_gs1_file(config.shape_path);
    OutputSet outputs{config.out_dir, {}};

    if (shape.empty()) {
        // Convention: the empty set has distance zero.
        nlohmann::json doc;
        doc["p"] = config.p;
        doc["wp"] = 0.0;
        doc["wp_pow_p"] = 0.0;
        doc["witness_cells"] = 0;
        doc["empty_input"] = true;
        outputs.write("result.json", doc.dump(2) + "\n");
        outputs.write("witness.gs1", write_gs1(shape));
        outputs.write("plan.csv", plan_to_csv(TransportPlan{}));
        write_record(config, outputs, started);
        return 0;
    }

    const FreeTargetResult result = solve_free_target(shape, config.p, config.pad_factor);
    outputs.write("result.json", free_target_to_json(result).dump(2) + "\n");
    outputs.write("witness.gs1", write_gs1(result.witness));
    outputs.write("plan.csv", plan_to_csv(result.plan));
    write_record(config, outputs, started);
    return 0;
}

int cmd_energy(RunConfig config) {
    const std::string started = iso8601_now();
    if (config.shape_path.empty()) throw BadInput("energy requires a shape file (--shape)");
    const GridShape shape = read_gs1_file(config.shape_path);
    if (config.target_cells == 0) config.target_cells = static_cast<int>(shape.cell_count());
    EnergyParams params = config.to_energy_params();
    params.grid = shape.grid();
    const EnergyReport report = energy(shape, params);
    OutputSet outputs{config.out_dir, {}};
    outputs.write("energy.json", energy_report_to_json(report, params).dump(2) + "\n");
    outputs.write("witness.gs1", write_gs1(report.witness_f));
    write_record(config, outputs, started);
    return 0;
}

int cmd_ansatz(const RunConfig& config) {
    const std::string started = iso8601_now();
    if (config.target_cells <= 0) throw BadInput("ansatz requires target_cells > 0");
    EnergyParams params = config.to_energy_params();
    AnsatzSpec spec{ansatz_kind_from_string(config.ansatz_kind), config.ansatz_count,
                    config.ansatz_ratio};
    const GridShape shape = ansatz(spec, params);
    OutputSet outputs{config.out_dir, {}};
    outputs.write("shape.gs1", write_gs1(shape));
    write_record(config, outputs, started);
    return 0;
}

int cmd_optimize(const RunConfig& config) {
    const std::string started = iso8601_now();
    if (config.target_cells <= 0) throw BadInput("optimize requires target_cells > 0");
    const EnergyParams params = config.to_energy_params();
    const AnnealSchedule schedule{config.t0, config.alpha, config.steps};

    struct Job {
        std::string label;
        AnsatzSpec spec;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    std::vector<AnsatzSpec> starts;
    if (config.multistart) {
        starts.push_back({AnsatzKind::ball, 1, 1.0});
        starts.push_back({AnsatzKind::cylinder, 1, 4.0});
        if (config.target_cells % 2 == 0) starts.push_back({AnsatzKind::droplets, 2, 1.0});
        if (config.target_cells % 4 == 0) starts.push_back({AnsatzKind::droplets, 4, 1.0});
    } else {
        starts.push_back({AnsatzKind::ball, 1, 1.0});
    }
    for (const auto& spec : starts) {
        for (std::uint64_t seed : config.seeds) {
            std::string label = to_string(spec.kind);
            if (spec.kind == AnsatzKind::droplets) label += std::to_string(spec.count);
            jobs.push_back({label, spec, seed});
        }
    }

    // Fan out across SHAPES_THREADS; the reduction below is deterministic
    // regardless of completion order.
    std::vector<OptimizerResult> results(jobs.size());
    const int budget = thread_budget(jobs.size());
    std::size_t next = 0;
    while (next < jobs.size()) {
        const std::size_t batch = std::min<std::size_t>(budget, jobs.size() - next);
        std::vector<std::future<OptimizerResult>> futs;
        futs.reserve(batch);
        for (std::size_t i = 0; i < batch; ++i) {
            const Job& job = jobs[next + i];
            futs.push_back(std::async(std::launch::async, [&params, &schedule, &job] {
                const GridShape init = ansatz(job.spec, params);
                return anneal(init, params, schedule, job.seed);
            }));
        }
        for (std::size_t i = 0; i < batch; ++i) results[next + i] = futs[i].get();
        next += batch;
    }

    // Pick the best exact energy; ties resolve to the lowest seed, then the
    // earliest start in declaration order.
    std::size_t best_idx = 0;
    for (std::size_t i = 1; i < results.size(); ++i) {
        const double a = results[i].best_report.total;
        const double b = results[best_idx].best_report.total;
        if (a < b || (a == b && jobs[i].seed < jobs[best_idx].seed)) best_idx = i;
    }
    const OptimizerResult& best = results[best_idx];

    OutputSet outputs{config.out_dir, {}};
    outputs.write("best.gs1", write_gs1(best.best_shape));
    outputs.write("witness.gs1", write_gs1(best.best_report.witness_f));

    nlohmann::json report = energy_report_to_json(best.best_report, params);
    report["best_run"] = jobs[best_idx].label;
    report["best_seed"] = best.seed;
    report["moves_tried"] = best.moves_tried;
    report["moves_accepted"] = best.moves_accepted;
    report["exact_evaluations"] = best.exact_evaluations;
    report["surrogate_violations"] = best.surrogate_violations;
    report["fitted_continuity_constant"] = best.fitted_continuity_constant;
    outputs.write("report.json", report.dump(2) + "\n");

    // The trace streams run by run and flushes as it goes, so an interrupted
    // optimize leaves the completed runs on disk.
    const std::string trace_path = (fs::path(config.out_dir) / "trace.csv").string();
    fs::create_directories(config.out_dir);
    std::string trace_all = trace_to_csv_header();
    {
        std::ofstream os(trace_path, std::ios::binary | std::ios::trunc);
        os << trace_all;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            std::string chunk;
            append_trace_csv(chunk, jobs[i].label, jobs[i].seed, results[i].trace);
            os << chunk << std::flush;
            trace_all += chunk;
        }
    }
    outputs.written.emplace_back("trace.csv", hex64(fnv1a64(trace_all)));

    write_record(config, outputs, started);
    return 0;
}

int cmd_verify(const RunConfig& config) {
    const std::string started = iso8601_now();
    std::vector<PropertyReport> reports = run_verification_suite(config.to_suite_config());
    OutputSet outputs{config.out_dir, {}};
    for (auto& rep : reports) {
        rep.artifacts = rep.name + ".csv";
        outputs.write(rep.artifacts, rep.csv);
    }
    const nlohmann::json summary = reports_to_json(reports);
    outputs.write("summary.json", summary.dump(2) + "\n");
    write_record(config, outputs, started);

    bool all_pass = true;
    for (const auto& rep : reports) {
        std::cout << (rep.pass ? "PASS " : "FAIL ") << rep.name << " statistic=" << rep.statistic
                  << "\n";
        all_pass = all_pass && rep.pass;
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Perimeter-regularized Wasserstein shape optimization toolbox"};
    app.require_subcommand(1);

    std::string config_path;
    RunConfig overrides;
    bool has_multistart_flag = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--shape", overrides.shape_path, "input shape (GS1)");
        cmd->add_option("--out-dir", overrides.out_dir, "output directory");
        cmd->add_option("--p", overrides.p, "transport exponent p >= 1");
        cmd->add_option("--lambda", overrides.lambda, "transport weight");
        cmd->add_option("--dim", overrides.dim, "grid dimension");
        cmd->add_option("--spacing", overrides.spacing, "grid spacing");
        cmd->add_option("--target-cells", overrides.target_cells, "volume constraint in cells");
        cmd->add_option("--pad-factor", overrides.pad_factor, "window padding factor");
        cmd->add_option("--recompute-every", overrides.recompute_every,
                        "accepted moves between exact solves");
        cmd->add_option("--t0", overrides.t0, "initial temperature");
        cmd->add_option("--alpha", overrides.alpha, "cooling factor in (0,1)");
        cmd->add_option("--steps", overrides.steps, "annealing steps");
        cmd->add_option("--seeds", overrides.seeds, "seeds for the annealer");
        cmd->add_option("--checks", overrides.checks, "verification checks to run");
        cmd->add_option("--verify-seed", overrides.verify_seed, "seed for verification sampling");
        cmd->add_option("--trials", overrides.trials, "perturbation trials per continuity config");
        cmd->add_option("--ansatz-kind", overrides.ansatz_kind,
                        "ball | cylinder | droplets | segments_1d");
        cmd->add_option("--ansatz-count", overrides.ansatz_count, "droplet/segment count");
        cmd->add_option("--ansatz-ratio", overrides.ansatz_ratio, "cylinder aspect ratio");
        cmd->add_flag("--multistart,!--no-multistart", overrides.multistart,
                      "multi-start over ansatz family")
            ->each([&](const std::string&) { has_multistart_flag = true; });
    };

    CLI::App* wp = app.add_subcommand("wp", "free-target distance of a shape");
    CLI::App* en = app.add_subcommand("energy", "perimeter + lambda * wp of a shape");
    CLI::App* opt = app.add_subcommand("optimize", "anneal toward a minimizer");
    CLI::App* ver = app.add_subcommand("verify", "run the verification suite");
    CLI::App* ans = app.add_subcommand("ansatz", "emit a starting shape");
    for (CLI::App* cmd : {wp, en, opt, ver, ans}) add_common(cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        RunConfig config = config_path.empty() ? RunConfig{} : load_config_file(config_path);
        // CLI flags override config-file values, which override defaults.
        const RunConfig defaults;
        auto take = [](auto& dst, const auto& ovr, const auto& def) {
            if (!(ovr == def)) dst = ovr;
        };
        take(config.shape_path, overrides.shape_path, defaults.shape_path);
        take(config.out_dir, overrides.out_dir, defaults.out_dir);
        take(config.p, overrides.p, defaults.p);
        take(config.lambda, overrides.lambda, defaults.lambda);
        take(config.dim, overrides.dim, defaults.dim);
        take(config.spacing, overrides.spacing, defaults.spacing);
        take(config.target_cells, overrides.target_cells, defaults.target_cells);
        take(config.pad_factor, overrides.pad_factor, defaults.pad_factor);
        take(config.recompute_every, overrides.recompute_every, defaults.recompute_every);
        take(config.t0, overrides.t0, defaults.t0);
        take(config.alpha, overrides.alpha, defaults.alpha);
        take(config.steps, overrides.steps, defaults.steps);
        take(config.seeds, overrides.seeds, defaults.seeds);
        take(config.checks, overrides.checks, defaults.checks);
        take(config.verify_seed, overrides.verify_seed, defaults.verify_seed);
        take(config.trials, overrides.trials, defaults.trials);
        take(config.ansatz_kind, overrides.ansatz_kind, defaults.ansatz_kind);
        take(config.ansatz_count, overrides.ansatz_count, defaults.ansatz_count);
        take(config.ansatz_ratio, overrides.ansatz_ratio, defaults.ansatz_ratio);
        if (has_multistart_flag) config.multistart = overrides.multistart;

        if (wp->parsed()) {
            config.command = "wp";
            return cmd_wp(config);
        }
        if (en->parsed()) {
            config.command = "energy";
            return cmd_energy(config);
        }
        if (opt->parsed()) {
            config.command = "optimize";
            return cmd_optimize(config);
        }
        if (ver->parsed()) {
            config.command = "verify";
            return cmd_verify(config);
        }
        config.command = "ansatz";
        return cmd_ansatz(config);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const WindowOverflow& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const Infeasible& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const InsufficientCapacity& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
