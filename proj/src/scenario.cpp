#include "vplab/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace vplab {

ConfigError::ConfigError(const std::string& msg, int l)
    : std::runtime_error(l > 0 ? "line " + std::to_string(l) + ": " + msg : msg), line(l) {}

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> c{"steady",         "flow",  "invariance", "equimeasurability",
                                            "first_variation", "sweep", "taylor",     "inequalities",
                                            "exponents",       "scan"};
    return c;
}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

// Reads the keys of one mapping, rejecting anything not consumed.
class Section {
public:
    Section(const YAML::Node& node, std::string where) : node_(node), where_(std::move(where)) {
        if (node_ && !node_.IsMap()) throw ConfigError(where_ + " must be a mapping", line_of(node_));
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!node_) return;
        const YAML::Node v = node_[key];
        if (!v) return;
        try {
            out = v.as<T>();
        } catch (const YAML::Exception&) {
            throw ConfigError(where_ + "." + key + ": bad value", line_of(v));
        }
    }

    Section sub(const char* key) {
        seen_.insert(key);
        return Section(node_ ? node_[key] : YAML::Node(), where_ + "." + key);
    }

    void finish() const {
        if (!node_) return;
        for (const auto& kv : node_) {
            const std::string k = kv.first.as<std::string>();
            if (!seen_.count(k)) throw ConfigError("unknown key " + where_ + "." + k, line_of(kv.first));
        }
    }

    int line() const { return node_ ? line_of(node_) : 0; }

private:
    YAML::Node node_;
    std::string where_;
    std::set<std::string> seen_;
};

Scenario read_scenario(const YAML::Node& node, int index) {
    Scenario s;
    Section top(node, "scenario[" + std::to_string(index) + "]");
    top.get("name", s.name);

    Section st = top.sub("steady");
    st.get("mu", s.steady.mu);
    st.get("amplitude", s.steady.amplitude);
    st.get("target_mass", s.steady.target_mass);
    st.get("support_radius", s.steady.support_radius);
    st.get("grid_nodes", s.steady.grid.nodes);
    st.get("mass_tolerance", s.steady.mass_tolerance);
    st.finish();

    Section cl = top.sub("cloud");
    cl.get("kind", s.cloud.kind);
    cl.get("n_r", s.cloud.n_r);
    cl.get("n_r_margin", s.cloud.n_r_margin);
    cl.get("n_speed", s.cloud.n_speed);
    cl.get("n_speed_margin", s.cloud.n_speed_margin);
    cl.get("n_theta", s.cloud.n_theta);
    cl.get("n_phi", s.cloud.n_phi);
    cl.get("n_theta_v", s.cloud.n_theta_v);
    cl.get("n_phi_v", s.cloud.n_phi_v);
    cl.get("core_stretch", s.cloud.core_stretch);
    cl.get("energy_margin", s.cloud.energy_margin);
    cl.get("tensor_n", s.cloud.tensor_n);
    cl.get("resolution_scale", s.cloud.resolution_scale);
    cl.get("pair_nodes", s.pair_nodes);
    cl.finish();

    Section fl = top.sub("flow");
    fl.get("tol", s.flow.tol);
    fl.get("max_steps", s.flow.max_steps);
    fl.finish();

    Section en = top.sub("energy");
    std::string mode = s.energy.mode == EnergyOptions::Mode::split ? "split" : "direct";
    en.get("mode", mode);
    if (mode != "split" && mode != "direct") throw ConfigError("energy.mode must be split or direct", en.line());
    s.energy.mode = mode == "split" ? EnergyOptions::Mode::split : EnergyOptions::Mode::direct;
    en.get("l_max", s.energy.l_max);
    en.get("softening", s.energy.softening);
    bool tree = s.energy.pair.method == PairSumOptions::Method::treecode;
    en.get("treecode", tree);
    s.energy.pair.method = tree ? PairSumOptions::Method::treecode : PairSumOptions::Method::direct;
    en.get("theta", s.energy.pair.theta);
    en.finish();

    Section fa = top.sub("family");
    fa.get("seeds", s.seeds);
    fa.get("n_modes", s.n_modes);
    fa.get("max_wavenumber", s.max_wavenumber);
    fa.get("base_amplitude", s.base_amplitude);
    fa.get("flow_seeds", s.flow_seeds);
    fa.get("fd_step", s.fd_step);
    fa.finish();

    Section sw = top.sub("sweep");
    sw.get("lambdas", s.lambdas);
    sw.get("s_grid", s.s_grid);
    sw.finish();

    Section sc = top.sub("scan");
    sc.get("eps", s.eps);
    sc.get("k", s.k);
    sc.get("budget_order", s.budget_order);
    sc.get("flow_tol", s.scan_flow_tol);
    sc.finish();

    Section te = top.sub("tests");
    te.get("count", s.tests.count);
    te.get("n_modes", s.tests.n_modes);
    te.get("max_wavenumber", s.tests.max_wavenumber);
    te.get("seed", s.tests.seed);
    te.finish();

    top.get("checks", s.checks);
    Section out = top.sub("output");
    out.get("dir", s.out_dir);
    out.get("profiles", s.write_profiles);
    out.finish();
    top.finish();

    try {
        s.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(e.what(), e.line > 0 ? e.line : top.line());
    }
    return s;
}

void emit_list(YAML::Emitter& e, const char* key, const std::vector<double>& v) {
    e << YAML::Key << key << YAML::Value << YAML::Flow << v;
}

}  // namespace

void Scenario::validate() const {
    try {
        steady.validate();
        cloud.validate();
        flow.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), 0);
    }
    if (name.empty()) throw ConfigError("name must not be empty", 0);
    if (pair_nodes < 10) throw ConfigError("cloud.pair_nodes must be >= 10", 0);
    if (energy.l_max < 0) throw ConfigError("energy.l_max must be >= 0", 0);
    if (seeds.empty()) throw ConfigError("family.seeds must not be empty", 0);
    if (n_modes < 1 || !(max_wavenumber >= 1)) throw ConfigError("family: bad mode spec", 0);
    if (!(base_amplitude > 0)) throw ConfigError("family.base_amplitude must be > 0", 0);
    if (flow_seeds < 1) throw ConfigError("family.flow_seeds must be >= 1", 0);
    if (!(fd_step > 0 && fd_step < 0.5)) throw ConfigError("family.fd_step must lie in (0, 0.5)", 0);
    if (lambdas.size() < 2) throw ConfigError("sweep.lambdas needs two values", 0);
    for (double l : lambdas)
        if (!(l > 0)) throw ConfigError("sweep.lambdas must be positive", 0);
    for (double t : s_grid)
        if (!(t > 0 && t <= 1)) throw ConfigError("sweep.s_grid must lie in (0, 1]", 0);
    for (double e : eps)
        if (!(e > 0)) throw ConfigError("scan.eps must be positive", 0);
    if (!(k > 0) || budget_order < 0 || !(scan_flow_tol > 0)) throw ConfigError("scan: bad parameters", 0);
    if (tests.count < 1) throw ConfigError("tests.count must be >= 1", 0);
    for (const std::string& c : checks)
        if (std::find(known_checks().begin(), known_checks().end(), c) == known_checks().end())
            throw ConfigError("unknown check '" + c + "'", 0);
}

ScanSpec Scenario::scan_spec() const {
    ScanSpec s;
    s.seeds = seeds;
    s.eps = eps;
    s.n_modes = n_modes;
    s.max_wavenumber = max_wavenumber;
    s.k = k;
    s.budget_order = budget_order;
    s.flow_tol = scan_flow_tol;
    return s;
}

SweepSpec Scenario::sweep_spec(std::uint64_t seed) const {
    SweepSpec s;
    s.seed = seed;
    s.n_modes = n_modes;
    s.max_wavenumber = max_wavenumber;
    s.base_amplitude = base_amplitude;
    s.lambdas = lambdas;
    s.s_grid = s_grid;
    return s;
}

std::vector<Scenario> parse_scenarios(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.line + 1);
    }
    std::vector<Scenario> out;
    if (!root || root.IsNull()) return out;
    if (!root.IsMap()) throw ConfigError("config must be a mapping", line_of(root));
    if (root["scenarios"]) {
        if (root.size() != 1) throw ConfigError("'scenarios' must be the only top-level key", line_of(root));
        const YAML::Node list = root["scenarios"];
        if (!list.IsSequence()) throw ConfigError("'scenarios' must be a list", line_of(list));
        for (std::size_t i = 0; i < list.size(); ++i) out.push_back(read_scenario(list[i], static_cast<int>(i)));
    } else {
        out.push_back(read_scenario(root, 0));
    }
    std::set<std::string> names;
    for (const Scenario& s : out)
        if (!names.insert(s.name).second) throw ConfigError("duplicate scenario name '" + s.name + "'", 0);
    return out;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path, 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenarios(ss.str());
}

std::string to_yaml(const std::vector<Scenario>& list) {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << YAML::BeginMap << YAML::Key << "scenarios" << YAML::Value << YAML::BeginSeq;
    for (const Scenario& s : list) {
        e << YAML::BeginMap;
        e << YAML::Key << "name" << YAML::Value << s.name;
        e << YAML::Key << "steady" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "mu" << YAML::Value << s.steady.mu;
        e << YAML::Key << "amplitude" << YAML::Value << s.steady.amplitude;
        e << YAML::Key << "target_mass" << YAML::Value << s.steady.target_mass;
        e << YAML::Key << "support_radius" << YAML::Value << s.steady.support_radius;
        e << YAML::Key << "grid_nodes" << YAML::Value << s.steady.grid.nodes;
        e << YAML::Key << "mass_tolerance" << YAML::Value << s.steady.mass_tolerance;
        e << YAML::EndMap;
        const CloudSpec& c = s.cloud;
        e << YAML::Key << "cloud" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "kind" << YAML::Value << c.kind;
        e << YAML::Key << "n_r" << YAML::Value << c.n_r;
        e << YAML::Key << "n_r_margin" << YAML::Value << c.n_r_margin;
        e << YAML::Key << "n_speed" << YAML::Value << c.n_speed;
        e << YAML::Key << "n_speed_margin" << YAML::Value << c.n_speed_margin;
        e << YAML::Key << "n_theta" << YAML::Value << c.n_theta;
        e << YAML::Key << "n_phi" << YAML::Value << c.n_phi;
        e << YAML::Key << "n_theta_v" << YAML::Value << c.n_theta_v;
        e << YAML::Key << "n_phi_v" << YAML::Value << c.n_phi_v;
        e << YAML::Key << "core_stretch" << YAML::Value << c.core_stretch;
        e << YAML::Key << "energy_margin" << YAML::Value << c.energy_margin;
        e << YAML::Key << "tensor_n" << YAML::Value << c.tensor_n;
        e << YAML::Key << "resolution_scale" << YAML::Value << c.resolution_scale;
        e << YAML::Key << "pair_nodes" << YAML::Value << s.pair_nodes;
        e << YAML::EndMap;
        e << YAML::Key << "flow" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "tol" << YAML::Value << s.flow.tol;
        e << YAML::Key << "max_steps" << YAML::Value << s.flow.max_steps;
        e << YAML::EndMap;
        e << YAML::Key << "energy" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "mode" << YAML::Value
          << (s.energy.mode == EnergyOptions::Mode::split ? "split" : "direct");
        e << YAML::Key << "l_max" << YAML::Value << s.energy.l_max;
        e << YAML::Key << "softening" << YAML::Value << s.energy.softening;
        e << YAML::Key << "treecode" << YAML::Value
          << (s.energy.pair.method == PairSumOptions::Method::treecode);
        e << YAML::Key << "theta" << YAML::Value << s.energy.pair.theta;
        e << YAML::EndMap;
        e << YAML::Key << "family" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "seeds" << YAML::Value << YAML::Flow << s.seeds;
        e << YAML::Key << "n_modes" << YAML::Value << s.n_modes;
        e << YAML::Key << "max_wavenumber" << YAML::Value << s.max_wavenumber;
        e << YAML::Key << "base_amplitude" << YAML::Value << s.base_amplitude;
        e << YAML::Key << "flow_seeds" << YAML::Value << s.flow_seeds;
        e << YAML::Key << "fd_step" << YAML::Value << s.fd_step;
        e << YAML::EndMap;
        e << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
        emit_list(e, "lambdas", s.lambdas);
        emit_list(e, "s_grid", s.s_grid);
        e << YAML::EndMap;
        e << YAML::Key << "scan" << YAML::Value << YAML::BeginMap;
        emit_list(e, "eps", s.eps);
        e << YAML::Key << "k" << YAML::Value << s.k;
        e << YAML::Key << "budget_order" << YAML::Value << s.budget_order;
        e << YAML::Key << "flow_tol" << YAML::Value << s.scan_flow_tol;
        e << YAML::EndMap;
        e << YAML::Key << "tests" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "count" << YAML::Value << s.tests.count;
        e << YAML::Key << "n_modes" << YAML::Value << s.tests.n_modes;
        e << YAML::Key << "max_wavenumber" << YAML::Value << s.tests.max_wavenumber;
        e << YAML::Key << "seed" << YAML::Value << s.tests.seed;
        e << YAML::EndMap;
        e << YAML::Key << "checks" << YAML::Value << YAML::Flow << s.checks;
        e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "dir" << YAML::Value << s.out_dir;
        e << YAML::Key << "profiles" << YAML::Value << s.write_profiles;
        e << YAML::EndMap;
        e << YAML::EndMap;
    }
    e << YAML::EndSeq << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

}  // namespace vplab
