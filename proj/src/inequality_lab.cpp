#include "vplab/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vplab {

namespace {

double norm3(const Vec3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

double bracket_l1(const SteadyState& state, const HamiltonianField& H, const QuadratureCloud& c) {
    std::vector<double> t(c.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(c.size()); ++i)
        t[i] = c.weights[i] * std::abs(poisson_bracket(H, state, c.nodes[i]));
    double s = 0;
    for (double v : t) s += v;
    return s;
}

// log10(exp(a) + exp(b)) with a, b natural logs
double log10_sum(double a, double b) {
    const double m = std::max(a, b);
    return (m + std::log(std::exp(a - m) + std::exp(b - m))) / std::log(10.0);
}

double ln_or_floor(double x) { return x > 0 ? std::log(x) : -745.0; }

// the trigonometric part alone, with the bump switched off
HamiltonianField trig_part(const HamiltonianField& H) {
    BoxSpec box = H.box();
    box.length = H.box_length();
    BumpSpec none;
    none.kind = BumpSpec::Kind::none;
    HamiltonianField t(H.state(), none, box);
    for (const Atom& a : H.atoms()) t.add_atom(a);
    return t;
}

FieldFn derivative_fn(const HamiltonianField& H, int axis) {
    return [H, axis](const Phase& z, Phase* grad) {
        Phase g;
        Mat6 h;
        H.eval(z, &g, grad ? &h : nullptr);
        if (grad)
            for (int k = 0; k < 6; ++k) (*grad)[k] = h(axis, k);
        return g[axis];
    };
}

HamiltonianField recentered(const HamiltonianField& H, const Discretization& d) {
    // coarse pass on the pair cloud, then the big cloud from there
    RecenterOptions coarse;
    coarse.tolerance = 1e-6;
    const HamiltonianField first = recenter_hamiltonian(H, d.pair, d.flow, coarse).field;
    return recenter_hamiltonian(first, d.big, d.flow).field;
}

}  // namespace

Floors measure_floors(std::shared_ptr<const SteadyState> state, const Discretization& d,
                      const std::vector<HamiltonianField>& tests, int n_levels) {
    Floors f;
    const HamiltonianField chi = invariant_hamiltonian(state, {1e-3, 0.1});
    f.energy = std::abs(energy(*state, chi, 1.0, d).delta_total);
    f.stationarity = stationarity_residual(steady_measure(state, d.big), tests).residual;
    // top level just above the central maximum of fbar
    f.levels = level_grid(state->F(state->phi(0.0)) * (1 + 1e-6), n_levels);
    f.rearrangement = rearrangement_floor(*state, d.big, f.levels);
    return f;
}

PerturbedSample perturb(const HamiltonianField& H, const Discretization& d) {
    PerturbedSample p;
    p.field = H;
    p.end = sample_flow(H, 1.0, d.big, d.flow);
    p.norms = grad_norms(H);
    return p;
}

LowerBound check_lower_bound(const SteadyState& state, const PerturbedSample& p, const Discretization& d,
                             const Floors& floors, double barycenter_tol) {
    const QuadratureCloud& c = d.big;
    LowerBound r;
    r.delta_energy = energy(state, p.end, d).delta_total;
    r.l1 = l1_distance(p.end.values, c.fbar, c);
    r.l1_sq = r.l1 * r.l1;
    r.ratio_defined = r.delta_energy > 10 * floors.energy && r.l1 > 0;
    if (r.ratio_defined) {
        r.ratio = r.delta_energy / r.l1_sq;
        r.k0_hat = r.l1_sq / r.delta_energy;
    }
    std::vector<double> levels = floors.levels;
    const double top = *std::max_element(p.end.values.begin(), p.end.values.end());
    if (top >= levels.back()) levels.back() = top * (1 + 1e-12);
    r.defect = equimeasurability_defect(c.fbar, p.end.values, c.weights, levels);
    r.rearranged_l1 = rearranged_l1_distance(c.fbar, p.end.values, c.weights, levels);
    const Vec3 b0 = barycenter_x(c, c.nodes), b1 = barycenter_x(c, p.end.images);
    r.barycenter_error = norm3({b1[0] - b0[0], b1[1] - b0[1], b1[2] - b0[2]}) / c.mass();
    r.hypotheses_ok = r.defect <= 2 * floors.rearrangement.defect &&
                      r.rearranged_l1 <= 2 * floors.rearrangement.l1 && r.barycenter_error <= barycenter_tol;
    r.positive = r.delta_energy >= -floors.energy;
    return r;
}

BracketComparison check_bracket_comparison(const SteadyState& state, const PerturbedSample& p,
                                           const Discretization& d) {
    BracketComparison r;
    r.l1_distance = l1_distance(p.end.values, d.big.fbar, d.big);
    r.g_l1 = bracket_l1(state, p.field, d.big);
    r.gap = std::abs(r.l1_distance - r.g_l1);
    const double G = p.norms.linf, S = p.norms.hess_linf;
    // G (G + S e^S) = G^2 + G S e^S
    r.log10_bound = log10_sum(2 * ln_or_floor(G), ln_or_floor(G) + ln_or_floor(S) + S);
    return r;
}

SecondVariationDeviation check_second_variation_deviation(const SteadyState& state, const HamiltonianField& H,
                                                          const std::vector<double>& s_grid,
                                                          const Discretization& d) {
    SecondVariationDeviation r;
    FlowSample f = steady_sample(d.big);
    r.d2_zero = second_variation(state, H, f, d);
    f.images.clear();
    std::vector<double> grid = s_grid;
    std::sort(grid.begin(), grid.end());
    for (double s : grid) {
        f = advance_flow(H, f, s, d.big, d.flow);
        r.s.push_back(s);
        r.deviation.push_back(std::abs(second_variation(state, H, f, d) - r.d2_zero));
        r.max_deviation = std::max(r.max_deviation, r.deviation.back());
    }
    const GradNorms n = grad_norms(H);
    r.cubic_form = n.linf * n.linf * (n.linf + n.hess_linf);
    r.constant = r.cubic_form > 0 ? r.max_deviation / r.cubic_form : 0.0;
    return r;
}

Interpolation check_interpolation(const TrigSpectrum& u, int l, int m, int max_order) {
    if (l < 1 || l > m) throw std::invalid_argument("interpolation needs 1 <= l <= m");
    if (m > max_order) throw std::invalid_argument("interpolation order beyond the spectral resolution");
    Interpolation r;
    r.l = l;
    r.m = m;
    r.lhs = u.norm(l);
    const double t = double(l) / m;
    r.rhs = std::pow(u.norm(0), 1 - t) * std::pow(u.norm(m), t);
    r.margin = r.rhs - r.lhs;
    return r;
}

FieldFn field_fn(const HamiltonianField& H) {
    return [H](const Phase& z, Phase* grad) { return H.eval(z, grad, nullptr); };
}

Nash check_nash(const FieldFn& u, const QuadratureCloud& rule) {
    std::vector<double> a(rule.size()), b(rule.size()), c(rule.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rule.size()); ++i) {
        Phase g;
        const double v = u(rule.nodes[i], &g);
        double g2 = 0;
        for (double q : g) g2 += q * q;
        a[i] = rule.weights[i] * std::abs(v);
        b[i] = rule.weights[i] * v * v;
        c[i] = rule.weights[i] * g2;
    }
    Nash r;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        r.l1 += a[i];
        r.l2 += b[i];
        r.grad_l2 += c[i];
    }
    r.l2 = std::sqrt(r.l2);
    r.grad_l2 = std::sqrt(r.grad_l2);
    constexpr double n = 6;
    r.lhs = std::pow(r.l2, 1 + 2 / n);
    r.rhs = std::pow(r.l1, 2 / n) * r.grad_l2;
    r.constant = r.rhs > 0 ? r.lhs / r.rhs : 0.0;
    return r;
}

Sobolev check_sobolev(const HamiltonianField& H, int order, double radius, const QuadratureCloud& rule) {
    if (order <= 3) throw std::invalid_argument("Sobolev embedding in 6D needs order > 3");
    const HamiltonianField t = trig_part(H);
    Sobolev r;
    r.order = order;
    r.radius = radius;
    for (const Phase& z : rule.nodes) {
        double z2 = 0;
        for (double q : z) z2 += q * q;
        if (z2 <= radius * radius) r.sup = std::max(r.sup, std::abs(t.value(z)));
    }
    r.rhs = trig_spectrum(H).norm(order);
    r.constant = r.rhs > 0 ? r.sup / r.rhs : 0.0;
    return r;
}

ChainExponents exponent_calculator(int r, int n, int s) {
    if (r < 22) throw std::invalid_argument("chain needs r >= 22");
    if (n != 6) throw std::invalid_argument("chain is set up for n = 6");
    if (2 * s <= n || s > r - 2) throw std::invalid_argument("chain needs n/2 < s <= r - 2");
    ChainExponents e;
    e.r = r;
    e.n = n;
    e.s = s;
    e.a1 = Rational(r - s - 2, r - 1);
    e.a2 = Rational(s + 1, r - 1);
    e.nash = 1 + Rational(2, n);
    e.eps_power = (1 + Rational(3 * (s + 1), n)) / (r - 1);
    e.h_exponent = Rational(3 * (r - s - 2), n * (r - 1)) + Rational(r - 2, r - 1);
    e.final_eps_power = e.eps_power + e.h_exponent - e.nash;
    e.h_exceeds_nash = e.h_exponent >= e.nash;
    return e;
}

std::string to_string(const Rational& q) {
    return q.denominator() == 1 ? std::to_string(q.numerator())
                                : std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

Sweep scaling_sweep(std::shared_ptr<const SteadyState> state, const SweepSpec& spec, const Discretization& d,
                    const Floors& floors) {
    if (spec.lambdas.size() < 2) throw std::invalid_argument("sweep needs two lambdas");
    Sweep sw;
    sw.seed = spec.seed;
    std::vector<double> lam, l1, de, gap, dev, ratio;
    for (double lambda : spec.lambdas) {
        SweepPoint pt;
        pt.lambda = lambda;
        pt.amplitude = spec.base_amplitude * lambda;
        const HamiltonianField H = recenter_hamiltonian(
            sample_hamiltonian(state, spec.seed, spec.n_modes, spec.max_wavenumber, pt.amplitude), d.big, d.flow)
                                       .field;
        const PerturbedSample p = perturb(H, d);
        pt.norms = p.norms;
        pt.lower = check_lower_bound(*state, p, d, floors);
        pt.bracket = check_bracket_comparison(*state, p, d);
        pt.deviation = check_second_variation_deviation(*state, H, spec.s_grid, d);
        lam.push_back(lambda);
        l1.push_back(pt.lower.l1);
        de.push_back(pt.lower.delta_energy);
        gap.push_back(pt.bracket.gap);
        dev.push_back(pt.deviation.max_deviation);
        ratio.push_back(pt.lower.delta_energy / pt.lower.l1_sq);
        sw.points.push_back(pt);
    }
    sw.fit.l1 = fit_loglog_slope(lam, l1);
    sw.fit.delta_energy = fit_loglog_slope(lam, de);
    sw.fit.gap = fit_loglog_slope(lam, gap);
    sw.fit.deviation = fit_loglog_slope(lam, dev);
    // the two smallest lambdas
    std::vector<std::size_t> idx(lam.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return lam[a] < lam[b]; });
    const double r0 = ratio[idx[0]], r1 = ratio[idx[1]];
    sw.fit.ratio_spread = std::abs(r1 - r0) / std::abs(r0);
    return sw;
}

double sobolev_budget(const HamiltonianField& H, int order) {
    return sobolev_norm(H, order) / std::pow(H.box_length(), 3);
}

std::vector<ChainReport> uniqueness_scan(std::shared_ptr<const SteadyState> state, const ScanSpec& spec,
                                         const Discretization& d0, const Floors& floors,
                                         const std::vector<HamiltonianField>& tests) {
    Discretization d = d0;
    d.flow.tol = spec.flow_tol;
    std::vector<ChainReport> out;
    for (std::uint64_t seed : spec.seeds) {
        const HamiltonianField unit = sample_hamiltonian(state, seed, spec.n_modes, spec.max_wavenumber, 1.0);
        const double budget = sobolev_budget(unit, spec.budget_order);
        const QuadratureCloud rule = support_rule(unit);
        for (double eps : spec.eps) {
            ChainReport r;
            r.seed = seed;
            r.eps = eps;
            r.amplitude = eps / budget;
            const HamiltonianField scaled = unit.scaled(r.amplitude);
            r.ak = ak_certificate(scaled, *state, d.big, spec.k);
            const HamiltonianField H = recentered(scaled, d);
            const PerturbedSample p = perturb(H, d);
            r.norms = p.norms;
            r.lower = check_lower_bound(*state, p, d, floors);
            r.bracket = check_bracket_comparison(*state, p, d);
            r.stationarity = stationarity_residual(pushforward_measure(state, p.end, d), tests).residual;
            r.stationarity_floor = floors.stationarity;
            r.impostor = r.stationarity <= 10 * floors.stationarity;

            const double G = p.norms.linf, S = p.norms.hess_linf;
            const double lg = ln_or_floor(G);
            const double poly = G * std::sqrt(G + S) + G * G;
            r.log10_chain_rhs = std::log10(spec.k) + log10_sum(ln_or_floor(poly), lg + ln_or_floor(S) + S);
            r.log10_chain_constant = std::log10(p.norms.l1) - r.log10_chain_rhs;

            // chain links on the derivatives of H
            const TrigSpectrum spec_h = trig_spectrum(scaled);
            for (int axis = 0; axis < 6; ++axis) {
                const TrigSpectrum du = spec_h.derivative(axis);
                r.interp.push_back(check_interpolation(du, 1, 21));
                r.interp.push_back(check_interpolation(du, 5, 21));
                const Nash nash = check_nash(derivative_fn(scaled, axis), rule);
                if (nash.constant >= r.nash.constant) r.nash = nash;
            }
            r.sobolev = check_sobolev(scaled, 4, H.support_radius(), rule);
            out.push_back(std::move(r));
        }
    }
    return out;
}

}  // namespace vplab
