#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "vplab/report.hpp"
#include "vplab/runner.hpp"
#include "vplab/scenario.hpp"

using namespace vplab;

namespace {

struct Common {
    std::string config;
    std::string out;
    int threads = 1;
    std::uint64_t seed = 0;
    std::vector<std::string> checks;
    double resolution_scale = 1.0;
};

void add_common(CLI::App* app, Common& c, bool with_checks) {
    app->add_option("--config", c.config, "scenario file (YAML); default scenario when omitted");
    app->add_option("--out", c.out, "output directory (default: $VPLAB_OUT_DIR or vplab_out)");
    app->add_option("--threads", c.threads, "scenario workers")->check(CLI::PositiveNumber);
    app->add_option("--seed-override", c.seed, "run every seeded check with this one seed");
    if (with_checks)
        app->add_option("--check", c.checks, "comma separated checks to run")->delimiter(',');
    app->add_option("--resolution-scale", c.resolution_scale, "cloud refinement factor")
        ->check(CLI::PositiveNumber);
}

std::vector<Scenario> scenarios(const Common& c) {
    if (c.config.empty()) return {Scenario{}};
    return load_scenarios(c.config);
}

RunOptions options(const Common& c, CLI::App* app) {
    RunOptions o;
    o.out_dir = resolve_out_dir(c.out);
    o.threads = c.threads;
    if (app->count("--seed-override")) o.seed_override = c.seed;
    o.checks = c.checks;
    o.resolution_scale = c.resolution_scale;
    return o;
}

int run(const std::vector<Scenario>& list, const RunOptions& o) {
    const RunResult r = run_scenarios(list, o);
    std::cout << summary_text(r.reports());
    std::cout << "reports written to " << o.out_dir << "\n";
    return r.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for the nonlinear stability of Vlasov-Poisson steady states"};
    app.require_subcommand(1);

    Common c;
    auto* build = app.add_subcommand("build-steady", "solve the steady states and write their profiles");
    add_common(build, c, false);

    auto* flow = app.add_subcommand("flow-test", "flow integrity and invariance checks");
    add_common(flow, c, false);
    bool zero_field = false;
    flow->add_flag("--zero-field", zero_field, "use H = 0");

    auto* verify = app.add_subcommand("verify", "run the scenario checks");
    add_common(verify, c, true);

    auto* scan = app.add_subcommand("scan", "uniqueness scan over the seeded family");
    add_common(scan, c, false);

    auto* merge = app.add_subcommand("report-merge", "concatenate CSV reports");
    std::vector<std::string> inputs;
    std::string merged = "report.csv";
    merge->add_option("inputs", inputs, "CSV reports")->required()->check(CLI::ExistingFile);
    merge->add_option("-o,--output", merged, "merged report");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*merge) {
            write_text(merged, merge_csv(inputs));
            std::cout << "merged " << inputs.size() << " reports into " << merged << "\n";
            return 0;
        }
        const std::vector<Scenario> list = scenarios(c);
        if (*build) {
            const std::string dir = resolve_out_dir(c.out);
            std::filesystem::create_directories(dir);
            for (const Scenario& s : list) {
                const SteadyState st = build_polytrope(s.steady);
                const std::string path = (std::filesystem::path(dir) / (s.name + "_steady.json")).string();
                save_profile(st, path);
                std::printf("%s: mass %.17g -> %s\n", s.name.c_str(), st.mass(), path.c_str());
            }
            return 0;
        }
        if (*flow) {
            RunOptions o = options(c, flow);
            o.checks = {"flow", "invariance"};
            if (zero_field) o.amplitude_override = 0.0;
            return run(list, o);
        }
        if (*scan) {
            RunOptions o = options(c, scan);
            o.checks = {"scan"};
            return run(list, o);
        }
        return run(list, options(c, verify));
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
