#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vplab/functionals.hpp"
#include "vplab/inequality_lab.hpp"
#include "vplab/stationarity.hpp"

namespace vplab {

// Thrown for unreadable or invalid configuration; `line` is 1-based, 0 when unknown.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& msg, int line);
    int line = 0;
};

// Checks a scenario can run, in report order.
const std::vector<std::string>& known_checks();

struct Scenario {
    std::string name = "default";
    PolytropeSpec steady;
    CloudSpec cloud;
    std::size_t pair_nodes = 9000;
    FlowOptions flow{1e-9};
    EnergyOptions energy;

    // seeded perturbation family
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    int n_modes = 8;
    double max_wavenumber = 1.5;
    double base_amplitude = 0.003;
    int flow_seeds = 10;  // seeds 1..flow_seeds for the per-field checks

    std::vector<double> lambdas{0.1, 0.05, 0.02, 0.01};
    std::vector<double> s_grid{0.25, 0.5, 0.75, 1.0};
    std::vector<double> eps{0.1, 0.05, 0.02};
    double k = 50;
    int budget_order = 22;
    double scan_flow_tol = 1e-8;
    TestFamily tests;
    double fd_step = 0.05;  // first-variation finite differences, relative to s = 1

    std::vector<std::string> checks = known_checks();
    std::string out_dir;  // empty: command line or environment decides
    bool write_profiles = true;

    void validate() const;  // throws ConfigError
    ScanSpec scan_spec() const;
    SweepSpec sweep_spec(std::uint64_t seed) const;
};

// A config file holds either one scenario mapping or `scenarios:` with a list.
// Keys missing from a scenario fall back to the defaults above.
std::vector<Scenario> parse_scenarios(const std::string& yaml_text);
std::vector<Scenario> load_scenarios(const std::string& path);
std::string to_yaml(const std::vector<Scenario>& s);

}  // namespace vplab
