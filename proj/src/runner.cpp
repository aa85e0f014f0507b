#include "vplab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <thread>

#include <fmt/format.h>
#include <omp.h>

namespace vplab {

namespace {

namespace fs = std::filesystem;

struct Context {
    const Scenario& s;
    const RunOptions& opt;
    std::string out_dir;
    std::shared_ptr<SteadyState> state;
    Discretization d;
    std::vector<HamiltonianField> tests;
    std::optional<Floors> floors;
    std::vector<std::uint64_t> seeds, field_seeds;
    ScenarioResult& res;
    std::string check;

    const Floors& get_floors() {
        if (!floors) floors = measure_floors(state, d, tests);
        return *floors;
    }

    void row(const std::string& quantity, double value, const std::string& seed = "",
             const std::string& param = "") {
        res.report.rows.push_back({s.name, check, seed, param, quantity, value});
    }

    HamiltonianField field(std::uint64_t seed, double amplitude) const {
        return sample_hamiltonian(state, seed, s.n_modes, s.max_wavenumber, amplitude);
    }

    std::string file(const std::string& suffix) const { return (fs::path(out_dir) / (s.name + suffix)).string(); }
};

std::string seed_str(std::uint64_t s) { return std::to_string(s); }

std::string param(const char* key, double v) { return std::string(key) + "=" + format_double(v); }

double vmax(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

// evenly spread nodes that carry mass
std::vector<std::size_t> probe_nodes(const QuadratureCloud& c, int n) {
    std::vector<std::size_t> out;
    for (int k = 0; k < n; ++k) {
        std::size_t i = c.size() * static_cast<std::size_t>(k) / static_cast<std::size_t>(n);
        while (i < c.size() && c.fbar[i] == 0) ++i;
        if (i < c.size()) out.push_back(i);
    }
    return out;
}

std::string check_steady(Context& c) {
    SteadyCheck r;
    r.mass = c.state->mass();
    const EnergyBreakdown e = steady_energy(*c.state, c.d);
    r.kinetic = e.kinetic;
    r.potential = e.potential;
    r.virial = std::abs(2 * e.kinetic + e.potential) / std::abs(e.potential);
    r.stationarity = c.get_floors().stationarity;
    // the angular rules dominate the error; the margin carries no mass
    CloudSpec fine = c.d.big.spec;
    for (int* n : {&fine.n_theta, &fine.n_phi, &fine.n_theta_v, &fine.n_phi_v}) *n *= 2;
    fine.include_margin = false;
    const QuadratureCloud refined = build_cloud(*c.state, fine);
    r.stationarity_refined = stationarity_residual(steady_measure(c.state, refined), c.tests).residual;
    r.translated = stationarity_residual(translated_measure(c.state, c.d.big, {0.1, 0, 0}), c.tests).residual;
    c.row("mass", r.mass);
    c.row("cloud_mass", c.d.big.mass());
    c.row("e0", c.state->e0());
    c.row("r_support", c.state->r_support());
    c.row("kinetic", r.kinetic);
    c.row("potential", r.potential);
    c.row("virial_relative", r.virial);
    c.row("stationarity", r.stationarity);
    c.row("stationarity_refined", r.stationarity_refined);
    c.row("stationarity_translated", r.translated);
    c.res.steady = r;
    if (!c.out_dir.empty()) save_profile(*c.state, c.file("_steady.json"));
    std::string why;
    if (std::abs(r.mass - c.s.steady.target_mass) > 1e-8) why += "mass ";
    if (r.virial > 0.01) why += "virial ";
    if (r.stationarity > 1e-5) why += "stationarity ";
    if (!(r.stationarity_refined < r.stationarity)) why += "refinement ";
    if (!(r.translated > 10 * r.stationarity)) why += "translate ";
    return why;
}

std::string check_flow(Context& c) {
    std::string why;
    const FlowOptions& fo = c.d.flow;
    const std::vector<std::size_t> nodes = probe_nodes(c.d.big, 8);
    for (std::uint64_t seed : c.field_seeds) {
        const HamiltonianField H = c.field(seed, c.s.base_amplitude);
        const GradNorms n = grad_norms(H);
        FlowCheck r;
        r.seed = seed;
        // |D Phi_1| <= exp(|grad^2 H|_inf), compared in logs since the bound overflows
        r.gronwall_margin = INFINITY;
        for (std::size_t i : nodes) {
            const Phase& z = c.d.big.nodes[i];
            const FlowJacobian fj = flow_jacobian(H, z, 1.0, fo);
            r.det_error = std::max(r.det_error, std::abs(fj.jac.determinant() - 1));
            double zn = 0;
            for (double q : z) zn += q * q;
            const double bound = 10 * fo.tol * (1 + std::sqrt(zn));
            const double rev = reversibility_error(H, z, 1.0, fo);
            if (rev / bound >= r.reversibility / std::max(r.reversibility_bound, 1e-300)) {
                r.reversibility = rev;
                r.reversibility_bound = bound;
            }
            const double op = Eigen::JacobiSVD<Mat6>(fj.jac).singularValues()(0);
            r.gronwall_margin = std::min(r.gronwall_margin, n.hess_linf - std::log(op));
        }
        const std::string sd = seed_str(seed);
        c.row("det_error", r.det_error, sd);
        c.row("reversibility", r.reversibility, sd);
        c.row("reversibility_bound", r.reversibility_bound, sd);
        c.row("gronwall_margin", r.gronwall_margin, sd);
        c.res.flow.push_back(r);
        if (r.det_error > 1e-8) why += "det(" + sd + ") ";
        if (r.reversibility > r.reversibility_bound) why += "reversibility(" + sd + ") ";
        if (r.gronwall_margin < 0) why += "gronwall(" + sd + ") ";
    }
    return why;
}

std::string check_invariance(Context& c) {
    const HamiltonianField chi = invariant_hamiltonian(c.state, {1e-2, 0.1});
    const FlowSample end = sample_flow(chi, 1.0, c.d.big, c.d.flow, false, true);
    const double l1 = l1_distance(end.values, c.d.big.fbar, c.d.big);
    c.row("l1", l1);
    c.row("bound", 1e-4 * c.state->mass());
    c.res.invariance_l1 = l1;
    return l1 <= 1e-4 * c.state->mass() ? "" : "l1 ";
}

std::string check_equimeasurability(Context& c) {
    const Floors& fl = c.get_floors();
    c.row("floor_defect", fl.rearrangement.defect);
    c.row("floor_l1", fl.rearrangement.l1);
    const QuadratureCloud& cl = c.d.big;
    const auto square = [](double t) { return t * t; };
    const double cas0 = casimir_forward(cl, square);
    std::string why;
    bool first = true;
    for (std::uint64_t seed : c.field_seeds) {
        const HamiltonianField H = c.field(seed, c.s.base_amplitude);
        const FlowSample end = sample_flow(H, 1.0, cl, c.d.flow, false, true);
        std::vector<double> levels = fl.levels;
        levels.back() = std::max(levels.back(), vmax(end.values) * (1 + 1e-12));
        EquimeasurabilityCheck r;
        r.seed = seed;
        r.defect = equimeasurability_defect(cl.fbar, end.values, cl.weights, levels);
        r.rearranged_l1 = rearranged_l1_distance(cl.fbar, end.values, cl.weights, levels);
        r.rearranged_exact = rearranged_l1_exact(cl.fbar, end.values, cl.weights);
        r.casimir_mismatch = std::abs(casimir(cl, end.values, square) - cas0) / cas0;
        const std::string sd = seed_str(seed);
        c.row("defect", r.defect, sd);
        c.row("rearranged_l1", r.rearranged_l1, sd);
        c.row("rearranged_l1_exact", r.rearranged_exact, sd);
        c.row("casimir_t2_backward_mismatch", r.casimir_mismatch, sd);
        c.res.equimeasurability.push_back(r);
        if (r.defect > 2 * fl.rearrangement.defect) why += "defect(" + sd + ") ";
        if (r.rearranged_l1 > 2 * fl.rearrangement.l1) why += "rearranged(" + sd + ") ";
        if (first && !c.out_dir.empty() && c.s.write_profiles) {
            write_profile(c.file("_distribution_fbar.dat"), distribution(cl.fbar, cl.weights, fl.levels));
            write_profile(c.file("_distribution_exact.dat"), steady_distribution(*c.state, fl.levels));
            write_profile(c.file(fmt::format("_distribution_seed{}.dat", seed)),
                          distribution(end.values, cl.weights, levels));
        }
        first = false;
    }
    return why;
}

std::string check_first_variation(Context& c) {
    const double scale = std::abs(steady_energy(*c.state, c.d).total);
    const FlowSample at0 = steady_sample(c.d.big);
    std::string why;
    for (std::uint64_t seed : c.field_seeds) {
        const HamiltonianField H = c.field(seed, c.s.base_amplitude);
        FirstVariationCheck r;
        r.seed = seed;
        r.at_zero = first_variation(*c.state, H, at0, c.d);
        const double unit = grad_norms(H).linf * scale;
        r.bound = 1e-4 * unit;

        // central differences at s0 with steps h, h/2, h/4
        const double s0 = 0.2, h = 2 * c.s.fd_step;
        const std::vector<double> ss{s0 - h, s0 - h / 2, s0 - h / 4, s0 + h / 4, s0 + h / 2, s0 + h};
        std::map<double, double> E;
        FlowSample f = steady_sample(c.d.big);
        f.images.clear();
        for (double s : ss) {
            f = advance_flow(H, f, s, c.d.big, c.d.flow);
            E[s] = energy(*c.state, f, c.d).delta_total;
        }
        const double fd1 = (E[s0 + h] - E[s0 - h]) / (2 * h);
        const double fd2 = (E[s0 + h / 2] - E[s0 - h / 2]) / h;
        const double fd4 = (E[s0 + h / 4] - E[s0 - h / 4]) / (h / 2);
        r.fd_order = std::log2(std::abs(fd1 - fd2) / std::abs(fd2 - fd4));
        r.fd_limit = fd4 + (fd4 - fd2) / 3;
        const FlowSample mid = sample_flow(H, s0, c.d.big, c.d.flow);
        r.rate_mismatch = std::abs(energy_rate(*c.state, H, mid, c.d) - r.fd_limit) / std::abs(r.fd_limit);
        const double paper = first_variation(*c.state, H, mid, c.d);
        r.paper_mismatch = std::abs(paper - r.fd_limit) / std::abs(r.fd_limit);
        r.paper_scaled = std::abs(paper - r.fd_limit) / unit;

        const std::string sd = seed_str(seed);
        c.row("d1_at_zero", r.at_zero, sd);
        c.row("d1_bound", r.bound, sd);
        c.row("fd_order", r.fd_order, sd, param("s", s0));
        c.row("fd_limit", r.fd_limit, sd, param("s", s0));
        c.row("exact_rate_mismatch", r.rate_mismatch, sd, param("s", s0));
        c.row("paper_form_mismatch", r.paper_mismatch, sd, param("s", s0));
        c.row("paper_form_error_scaled", r.paper_scaled, sd, param("s", s0));
        c.res.first_variation.push_back(r);
        if (std::abs(r.at_zero) > r.bound) why += "d1(" + sd + ") ";
        if (!(r.fd_order >= 1.8)) why += "order(" + sd + ") ";
        if (r.rate_mismatch > 1e-6) why += "rate(" + sd + ") ";
        if (r.paper_scaled > 1e-4) why += "paper(" + sd + ") ";
    }
    return why;
}

std::string check_sweep(Context& c) {
    const Floors& fl = c.get_floors();
    std::string why;
    for (std::uint64_t seed : c.seeds) {
        const Sweep sw = scaling_sweep(c.state, c.s.sweep_spec(seed), c.d, fl);
        const std::string sd = seed_str(seed);
        bool positive = true, hyp = true;
        for (const SweepPoint& p : sw.points) {
            const std::string pr = param("lambda", p.lambda);
            c.row("delta_energy", p.lower.delta_energy, sd, pr);
            c.row("l1", p.lower.l1, sd, pr);
            c.row("ratio", p.lower.ratio, sd, pr);
            c.row("defect", p.lower.defect, sd, pr);
            c.row("barycenter_error", p.lower.barycenter_error, sd, pr);
            c.row("g_l1", p.bracket.g_l1, sd, pr);
            c.row("bracket_gap", p.bracket.gap, sd, pr);
            c.row("log10_bracket_bound", p.bracket.log10_bound, sd, pr);
            c.row("d2_zero", p.deviation.d2_zero, sd, pr);
            c.row("d2_deviation", p.deviation.max_deviation, sd, pr);
            c.row("d2_constant", p.deviation.constant, sd, pr);
            c.row("grad_linf", p.norms.linf, sd, pr);
            c.row("hess_linf", p.norms.hess_linf, sd, pr);
            positive = positive && p.lower.positive;
            hyp = hyp && p.lower.hypotheses_ok;
        }
        c.row("slope_l1", sw.fit.l1, sd);
        c.row("slope_delta_energy", sw.fit.delta_energy, sd);
        c.row("slope_bracket_gap", sw.fit.gap, sd);
        c.row("slope_d2_deviation", sw.fit.deviation, sd);
        c.row("ratio_spread", sw.fit.ratio_spread, sd);
        if (std::abs(sw.fit.l1 - 1) > 0.1) why += "l1(" + sd + ") ";
        if (std::abs(sw.fit.delta_energy - 2) > 0.1) why += "dH(" + sd + ") ";
        if (std::abs(sw.fit.gap - 2) > 0.15) why += "gap(" + sd + ") ";
        if (!(sw.fit.deviation >= 2.7)) why += "dev(" + sd + ") ";
        if (!(sw.fit.ratio_spread < 0.25)) why += "spread(" + sd + ") ";
        if (!positive) why += "negative(" + sd + ") ";
        if (!hyp) why += "hypotheses(" + sd + ") ";
        if (!c.out_dir.empty() && c.s.write_profiles) {
            std::string t = "# lambda l1 delta_energy bracket_gap d2_deviation ratio\n";
            for (const SweepPoint& p : sw.points)
                t += fmt::format("{} {} {} {} {} {}\n", format_double(p.lambda), format_double(p.lower.l1),
                                 format_double(p.lower.delta_energy), format_double(p.bracket.gap),
                                 format_double(p.deviation.max_deviation), format_double(p.lower.ratio));
            write_text(c.file(fmt::format("_sweep_seed{}.dat", seed)), t);
        }
        c.res.sweeps.push_back(sw);
    }
    return why;
}

std::string check_taylor(Context& c) {
    TaylorCheck r;
    const std::uint64_t seed = c.seeds.front();
    const std::string sd = seed_str(seed);
    for (double lambda : {1.0, 0.5, 0.25, 0.1}) {
        const HamiltonianField H = c.field(seed, c.s.base_amplitude * lambda);
        const TaylorResidual ex = taylor_residual(*c.state, H, c.d, true);
        const TaylorResidual pa = taylor_residual(*c.state, H, c.d, false);
        r.lambdas.push_back(lambda);
        r.delta_energy.push_back(ex.delta_energy);
        r.exact.push_back(ex.unsymmetric);
        r.paper.push_back(pa.unsymmetric);
        r.paper_worst = std::max(r.paper_worst, pa.unsymmetric / std::abs(pa.delta_energy));
        const std::string pr = param("lambda", lambda);
        c.row("delta_energy", ex.delta_energy, sd, pr);
        c.row("residual_exact", ex.unsymmetric, sd, pr);
        c.row("residual_paper", pa.unsymmetric, sd, pr);
        c.row("symmetric_residual_paper", pa.symmetric, sd, pr);
        c.row("first_order", ex.first_order, sd, pr);
    }
    r.exact_exponent = fit_loglog_slope(r.lambdas, r.exact);
    c.row("exponent_exact", r.exact_exponent, sd);
    c.row("paper_worst_relative", r.paper_worst, sd);
    c.res.taylor = r;
    std::string why;
    if (!(r.exact_exponent >= 2.8)) why += "exponent ";
    if (!(r.paper_worst <= 1e-2)) why += "paper ";
    return why;
}

std::string check_inequalities(Context& c) {
    std::string why;
    for (std::uint64_t seed : c.seeds) {
        const HamiltonianField H = c.field(seed, c.s.base_amplitude);
        const TrigSpectrum sp = trig_spectrum(H);
        InequalityCheck r;
        r.seed = seed;
        r.interp_worst = INFINITY;
        for (int m : {2, 5, 10, 21, 22})
            for (int l = 1; l < m; ++l) {
                const Interpolation in = check_interpolation(sp, l, m);
                r.interp_worst = std::min(r.interp_worst, in.margin / in.rhs);
            }
        const QuadratureCloud rule = support_rule(H);
        const Nash n1 = check_nash(field_fn(H), rule);
        const Nash n2 = check_nash(field_fn(H.scaled(3.7)), rule);
        r.nash_constant = n1.constant;
        r.nash_scaling = std::abs(n2.constant - n1.constant) / n1.constant;
        r.sobolev_constant = check_sobolev(H, 4, H.support_radius(), rule).constant;
        const std::string sd = seed_str(seed);
        c.row("interpolation_worst_margin", r.interp_worst, sd);
        c.row("nash_constant", r.nash_constant, sd);
        c.row("nash_scaling_change", r.nash_scaling, sd);
        c.row("sobolev_constant", r.sobolev_constant, sd, "order=4");
        c.res.inequalities.push_back(r);
        if (r.interp_worst < -1e-12) why += "interpolation(" + sd + ") ";
        if (r.nash_scaling > 1e-12) why += "nash(" + sd + ") ";
    }
    // a single pure mode saturates the interpolation inequality
    BumpSpec none;
    none.kind = BumpSpec::Kind::none;
    HamiltonianField mode(c.state, none);
    mode.add_atom({{1, 0, 2, 0, 0, 1}, 0.7, 0.3});
    const Interpolation eq = check_interpolation(trig_spectrum(mode), 3, 10);
    c.res.single_mode_equality = std::abs(eq.margin) / eq.rhs;
    c.row("single_mode_gap", c.res.single_mode_equality);
    if (c.res.single_mode_equality > 1e-10) why += "single-mode ";
    return why;
}

std::string check_exponents(Context& c) {
    std::string why;
    for (int r = 22; r <= 40; ++r) {
        const ChainExponents e = exponent_calculator(r, 6, 4);
        c.row("h_exponent", boost::rational_cast<double>(e.h_exponent), "", fmt::format("r={}", r));
        c.row("final_eps_power", boost::rational_cast<double>(e.final_eps_power), "", fmt::format("r={}", r));
        if (!e.h_exceeds_nash) why += fmt::format("r={} ", r);
        c.res.exponents.push_back(e);
    }
    const ChainExponents& e22 = c.res.exponents.front();
    if (e22.h_exponent != Rational(4, 3)) why += "h-exponent ";
    if (e22.final_eps_power != Rational(1, 6)) why += "eps-power ";
    return why;
}

std::string check_scan(Context& c) {
    const Floors& fl = c.get_floors();
    ScanSpec spec = c.s.scan_spec();
    spec.seeds = c.seeds;
    c.res.scan = uniqueness_scan(c.state, spec, c.d, fl, c.tests);
    std::string why;
    for (const ChainReport& r : c.res.scan) {
        const std::string sd = seed_str(r.seed), pr = param("eps", r.eps);
        c.row("amplitude", r.amplitude, sd, pr);
        c.row("ak_ratio", r.ak.ratio, sd, pr);
        c.row("stationarity", r.stationarity, sd, pr);
        c.row("stationarity_floor", r.stationarity_floor, sd, pr);
        c.row("delta_energy", r.lower.delta_energy, sd, pr);
        c.row("l1", r.lower.l1, sd, pr);
        c.row("grad_l1", r.norms.l1, sd, pr);
        c.row("log10_chain_rhs", r.log10_chain_rhs, sd, pr);
        c.row("log10_chain_constant", r.log10_chain_constant, sd, pr);
        double worst = INFINITY;
        for (const Interpolation& in : r.interp) worst = std::min(worst, in.margin / in.rhs);
        c.row("interpolation_worst_margin", worst, sd, pr);
        c.row("nash_constant", r.nash.constant, sd, pr);
        c.row("sobolev_constant", r.sobolev.constant, sd, pr);
        if (r.impostor) why += "impostor(" + sd + "," + format_double(r.eps) + ") ";
        if (!r.ak.member) why += "not-in-A_k(" + sd + ") ";
    }
    return why;
}

const std::map<std::string, std::function<std::string(Context&)>>& check_table() {
    static const std::map<std::string, std::function<std::string(Context&)>> t{
        {"steady", check_steady},
        {"flow", check_flow},
        {"invariance", check_invariance},
        {"equimeasurability", check_equimeasurability},
        {"first_variation", check_first_variation},
        {"sweep", check_sweep},
        {"taylor", check_taylor},
        {"inequalities", check_inequalities},
        {"exponents", check_exponents},
        {"scan", check_scan}};
    return t;
}

}  // namespace

ScenarioResult run_scenario(const Scenario& s_in, const RunOptions& opt) {
    Scenario s = s_in;
    s.cloud.resolution_scale *= opt.resolution_scale;
    if (!opt.checks.empty()) s.checks = opt.checks;
    if (opt.amplitude_override) s.base_amplitude = *opt.amplitude_override;
    ScenarioResult res;
    res.report.name = s.name;
    res.report.config_yaml = to_yaml({s});

    std::vector<std::string> order;
    for (const std::string& k : known_checks())
        if (std::find(s.checks.begin(), s.checks.end(), k) != s.checks.end()) order.push_back(k);
    if (order.empty()) return res;

    std::unique_ptr<Context> ctx;
    try {
        auto state = std::make_shared<SteadyState>(build_polytrope(s.steady));
        CloudSpec pair = pair_cloud_spec(s.cloud, s.pair_nodes);
        Discretization d = make_discretization(*state, s.cloud, pair, s.energy, s.flow);
        ctx.reset(new Context{s, opt, opt.out_dir, state, std::move(d), stationarity_tests(state, s.tests), {}, {}, {},
                              res, ""});
    } catch (const std::exception& e) {
        for (const std::string& k : order) res.report.checks.push_back({k, false, std::string("setup: ") + e.what()});
        return res;
    }
    Context& c = *ctx;
    if (opt.seed_override) {
        c.seeds = {*opt.seed_override};
        c.field_seeds = {*opt.seed_override};
    } else {
        c.seeds = s.seeds;
        for (int k = 1; k <= s.flow_seeds; ++k) c.field_seeds.push_back(static_cast<std::uint64_t>(k));
    }
    for (const std::string& k : order) {
        c.check = k;
        CheckOutcome out{k, false, ""};
        try {
            out.message = check_table().at(k)(c);
            out.passed = out.message.empty();
            if (!out.message.empty()) out.message = "failed: " + out.message;
        } catch (const std::exception& e) {
            out.message = std::string("error: ") + e.what();
        }
        res.report.checks.push_back(out);
    }
    res.floors = c.floors;
    return res;
}

int RunResult::exit_code() const {
    for (const ScenarioResult& s : scenarios)
        if (s.report.failed()) return 1;
    return 0;
}

std::vector<ScenarioReport> RunResult::reports() const {
    std::vector<ScenarioReport> r;
    for (const ScenarioResult& s : scenarios) r.push_back(s.report);
    return r;
}

RunResult run_scenarios(const std::vector<Scenario>& list, const RunOptions& opt) {
    RunResult rr;
    rr.scenarios.resize(list.size());
    if (!opt.out_dir.empty()) fs::create_directories(opt.out_dir);
    const int workers = std::max(1, std::min<int>(opt.threads, static_cast<int>(list.size())));
    const int inner = std::max(1, omp_get_num_procs() / workers);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        omp_set_num_threads(inner);
        for (std::size_t i; (i = next++) < list.size();) rr.scenarios[i] = run_scenario(list[i], opt);
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    // single writer, in scenario order
    if (!opt.out_dir.empty()) {
        for (const ScenarioResult& s : rr.scenarios) {
            write_text((fs::path(opt.out_dir) / (s.report.name + ".csv")).string(), to_csv({s.report}));
            write_text((fs::path(opt.out_dir) / (s.report.name + ".json")).string(), to_json({s.report}));
        }
        write_text((fs::path(opt.out_dir) / "report.csv").string(), to_csv(rr.reports()));
        write_text((fs::path(opt.out_dir) / "summary.txt").string(), summary_text(rr.reports()));
    }
    return rr;
}

std::string resolve_out_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("VPLAB_OUT_DIR"); env && *env) return env;
    return "vplab_out";
}

}  // namespace vplab
