#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vplab/inequality_lab.hpp"
#include "vplab/report.hpp"
#include "vplab/scenario.hpp"

namespace vplab {

struct RunOptions {
    std::string out_dir;  // empty: no files
    int threads = 1;      // scenario workers
    std::optional<std::uint64_t> seed_override;
    std::vector<std::string> checks;  // empty: each scenario's own list
    double resolution_scale = 1.0;    // multiplies the cloud's own scale
    std::optional<double> amplitude_override;  // base amplitude of the field family; 0 gives H = 0
};

struct SteadyCheck {
    double mass = 0, kinetic = 0, potential = 0, virial = 0;  // virial: |2K + W| / |W|
    double stationarity = 0, stationarity_refined = 0, translated = 0;
};
struct FlowCheck {
    std::uint64_t seed = 0;
    double det_error = 0, reversibility = 0, reversibility_bound = 0;
    double gronwall_margin = 0;  // min over samples of |grad^2 H|_inf - log |D Phi_1|_2
};
struct FirstVariationCheck {
    std::uint64_t seed = 0;
    double at_zero = 0, bound = 0;
    double fd_order = 0, fd_limit = 0, rate_mismatch = 0;
    double paper_mismatch = 0;  // relative to the derivative, which is small near s = 0
    double paper_scaled = 0;    // |paper form - FD limit| / (|grad H|_inf |energy|)
};
struct EquimeasurabilityCheck {
    std::uint64_t seed = 0;
    double defect = 0, rearranged_l1 = 0, rearranged_exact = 0, casimir_mismatch = 0;
};
struct TaylorCheck {
    std::vector<double> lambdas, delta_energy, exact, paper;
    double exact_exponent = 0;
    double paper_worst = 0;  // max paper residual / |Delta H|
};
struct InequalityCheck {
    std::uint64_t seed = 0;
    double interp_worst = 0;  // min margin / rhs over the (l, m) pairs
    double nash_constant = 0, nash_scaling = 0, sobolev_constant = 0;
};

struct ScenarioResult {
    ScenarioReport report;
    std::optional<Floors> floors;
    std::optional<SteadyCheck> steady;
    std::vector<FlowCheck> flow;
    std::optional<double> invariance_l1;
    std::vector<EquimeasurabilityCheck> equimeasurability;
    std::vector<FirstVariationCheck> first_variation;
    std::vector<Sweep> sweeps;
    std::optional<TaylorCheck> taylor;
    std::vector<InequalityCheck> inequalities;
    double single_mode_equality = 0;  // relative interpolation gap of a pure mode
    std::vector<ChainExponents> exponents;
    std::vector<ChainReport> scan;
};

ScenarioResult run_scenario(const Scenario& s, const RunOptions& opt = {});

struct RunResult {
    std::vector<ScenarioResult> scenarios;
    int exit_code() const;  // 0 all checks passed, 1 otherwise
    std::vector<ScenarioReport> reports() const;
};
// Runs scenarios on a bounded worker pool and, when opt.out_dir is set,
// writes per-scenario CSV and JSON, report.csv, summary.txt and plot data.
RunResult run_scenarios(const std::vector<Scenario>& list, const RunOptions& opt = {});

// Output directory: the flag, else VPLAB_OUT_DIR, else "vplab_out".
std::string resolve_out_dir(const std::string& flag);

}  // namespace vplab
