#include "vplab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vplab {

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

double node_mass(const QuadratureCloud& c, std::size_t i) { return c.weights[i] * c.fbar[i]; }

Vec3 xpart(const Phase& z) { return {z[0], z[1], z[2]}; }

Phase symplectic(const Phase& g) { return {g[3], g[4], g[5], -g[0], -g[1], -g[2]}; }

double dot6(const Phase& a, const Phase& b) {
    double s = 0;
    for (int k = 0; k < 6; ++k) s += a[k] * b[k];
    return s;
}

double sum(const std::vector<double>& t) {
    double s = 0;
    for (double v : t) s += v;
    return s;
}

int table_degree(const QuadratureCloud& c) {
    const CloudSpec s = c.spec.scaled(c.spec.resolution_scale);
    return std::min(16, max_exact_degree(s.n_theta, s.n_phi));
}

void check_degree(const QuadratureCloud& c, int l_max) {
    if (c.segments.empty()) throw std::invalid_argument("split energy needs a spherical cloud");
    if (l_max < 0 || l_max > table_degree(c))
        throw std::invalid_argument("l_max exceeds the angular exactness of the cloud");
}

void check_backward(const FlowSample& fs, const QuadratureCloud& c) {
    if (fs.values.size() != c.size() || fs.origins.size() != c.size())
        throw std::invalid_argument("flow sample lacks backward values for this cloud");
}

void check_forward(const FlowSample& fs, const QuadratureCloud& c) {
    if (fs.images.size() != c.size()) throw std::invalid_argument("flow sample lacks forward images for this cloud");
}

std::vector<double> node_charges(const QuadratureCloud& c, const std::vector<double>& per_node) {
    std::vector<double> q(c.n_xcells(), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) q[static_cast<std::size_t>(c.xcell[i])] += per_node[i];
    return q;
}

std::vector<double> density_change(const QuadratureCloud& c, const std::vector<double>& values) {
    std::vector<double> dq(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) dq[i] = c.weights[i] * (values[i] - c.fbar[i]);
    return dq;
}

std::shared_ptr<const CloudPoisson> poisson_for(const Discretization& d) {
    if (d.poisson && d.poisson->n_cells() == d.big.n_xcells() && d.poisson->l_max() >= d.energy.l_max)
        return d.poisson;
    return std::make_shared<CloudPoisson>(d.big, std::max(d.energy.l_max, table_degree(d.big)));
}

CloudPotential potential_of(const Discretization& d, const std::vector<double>& per_node) {
    return poisson_for(d)->solve(node_charges(d.big, per_node), d.energy.l_max);
}

Vec3 grad_phibar(const SteadyState& state, const Phase& z) {
    const double r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
    if (r == 0) return {0, 0, 0};
    double phi, dphi;
    state.phi_d(r, phi, dphi);
    return {dphi / r * z[0], dphi / r * z[1], dphi / r * z[2]};
}

// g = grad fbar . J grad H and its rate grad g . J grad H at z
void bracket_and_rate(const HamiltonianField& H, const SteadyState& state, const Phase& z, double& g, double& rate) {
    const double e = state.e(z);
    const double fp = state.dF(e);
    if (fp == 0) {
        g = 0;
        rate = 0;
        return;
    }
    Phase gh;
    Mat6 hh;
    H.eval(z, &gh, &hh);
    const Phase ge = state.grad_e(z);
    const Phase a = symplectic(gh);
    Phase gf;
    for (int k = 0; k < 6; ++k) gf[k] = fp * ge[k];
    g = dot6(gf, a);
    const Phase jgf = symplectic(gf);
    Eigen::Map<const Vec6> av(a.data()), gev(ge.data()), jgfv(jgf.data());
    // a^T hess(fbar) a - a^T hess(H) J grad fbar
    const double ea = gev.dot(av);
    rate = state.d2F(e) * ea * ea + fp * av.dot(state.hess_e(z) * av) - av.dot(hh * jgfv);
}

double direct_potential(const QuadratureCloud& c, const std::vector<Phase>& pts, double soft,
                        const PairSumOptions& o) {
    PointSet p;
    p.pos.reserve(c.size());
    for (std::size_t j = 0; j < c.size(); ++j)
        p.add(xpart(pts[j]), node_mass(c, j), soft * std::cbrt(c.xcell_volume[static_cast<std::size_t>(c.xcell[j])]));
    return interaction_energy(p, o);
}

double probe(double fine, double coarse) { return std::abs(coarse - fine) / std::max(std::abs(fine), 1e-300); }

double paired_energy(const Discretization& d, const std::vector<double>& values, int l_max) {
    return poisson_for(d)->solve(node_charges(d.big, density_change(d.big, values)), l_max).energy();
}

}  // namespace

Discretization make_discretization(const SteadyState& state, const CloudSpec& big, const CloudSpec& pair,
                                   const EnergyOptions& energy, const FlowOptions& flow) {
    flow.validate();
    if (!(energy.softening > 0)) throw std::invalid_argument("softening must be positive");
    Discretization d;
    d.big = build_cloud(state, big);
    if (energy.mode == EnergyOptions::Mode::split) {
        check_degree(d.big, energy.l_max);
        d.poisson = std::make_shared<CloudPoisson>(d.big, table_degree(d.big));
    }
    d.pair = build_cloud(state, pair);
    d.energy = energy;
    d.flow = flow;
    return d;
}

CloudSpec pair_cloud_spec(const CloudSpec& big, std::size_t target) {
    const CloudSpec b = big.scaled(big.resolution_scale);
    auto count = [](const CloudSpec& c) {
        return static_cast<double>(c.n_r + c.n_r_margin) * (c.n_speed + c.n_speed_margin) * c.n_theta * c.n_phi *
               c.n_theta_v * c.n_phi_v;
    };
    if (b.kind != "spherical" || count(b) <= static_cast<double>(target)) return b;
    CloudSpec p = b;
    // radial and speed counts shrink, the already coarse angular rules stay
    const double f = std::sqrt(static_cast<double>(target) / count(b));
    auto shrink = [f](int n, int lo) { return std::max(lo, static_cast<int>(std::lround(n * f))); };
    p.n_r = shrink(b.n_r, 2);
    p.n_r_margin = shrink(b.n_r_margin, 1);
    p.n_speed = shrink(b.n_speed, 3);  // two speed nodes lose a quarter of the mass
    p.n_speed_margin = shrink(b.n_speed_margin, 1);
    while (count(p) > static_cast<double>(target) && p.n_r > 2) --p.n_r;
    return p;
}

FlowSample steady_sample(const QuadratureCloud& cloud) {
    FlowSample fs;
    fs.images = cloud.nodes;
    fs.origins = cloud.nodes;
    fs.values = cloud.fbar;
    return fs;
}

FlowSample sample_flow(const HamiltonianField& H, double s, const QuadratureCloud& cloud, const FlowOptions& flow,
                       bool forward, bool backward) {
    FlowSample fs;
    fs.s = s;
    if (forward) fs.images = forward_images(H, s, cloud.nodes, flow);
    if (backward) {
        fs.origins = forward_images(H, -s, cloud.nodes, flow);
        const SteadyState& st = *H.state();
        fs.values.resize(cloud.size());
        for (std::size_t i = 0; i < cloud.size(); ++i) fs.values[i] = st.f(fs.origins[i]);
    }
    return fs;
}

FlowSample advance_flow(const HamiltonianField& H, const FlowSample& from, double s, const QuadratureCloud& cloud,
                        const FlowOptions& flow) {
    FlowSample fs;
    fs.s = s;
    if (from.has_forward()) {
        check_forward(from, cloud);
        fs.images = forward_images(H, s - from.s, from.images, flow);
    }
    if (from.has_backward()) {
        check_backward(from, cloud);
        fs.origins = forward_images(H, from.s - s, from.origins, flow);
        const SteadyState& st = *H.state();
        fs.values.resize(cloud.size());
        for (std::size_t i = 0; i < cloud.size(); ++i) fs.values[i] = st.f(fs.origins[i]);
    }
    return fs;
}

EnergyBreakdown steady_energy(const SteadyState& state, const Discretization& d) {
    EnergyBreakdown b;
    const QuadratureCloud& c = d.big;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Phase& z = c.nodes[i];
        const double m = node_mass(c, i);
        b.kinetic += 0.5 * m * (z[3] * z[3] + z[4] * z[4] + z[5] * z[5]);
        if (d.energy.mode == EnergyOptions::Mode::split)
            b.potential += 0.5 * m * state.phi(std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]));
    }
    if (d.energy.mode == EnergyOptions::Mode::direct) {
        b.potential = direct_potential(d.pair, d.pair.nodes, d.energy.softening, d.energy.pair);
        b.paired_term = b.potential;
        if (d.energy.richardson_probe) {
            b.probe_sensitivity =
                probe(b.potential, direct_potential(d.pair, d.pair.nodes, 0.5 * d.energy.softening, d.energy.pair));
            if (b.probe_sensitivity > d.energy.probe_limit)
                throw NumericalError("pair cloud too coarse: softening dominates the potential energy");
        }
    }
    b.total = b.kinetic + b.potential;
    return b;
}

CloudPotential density_change_potential(const Discretization& d, const std::vector<double>& values) {
    if (values.size() != d.big.size()) throw std::invalid_argument("density values do not match the cloud");
    check_degree(d.big, d.energy.l_max);
    return potential_of(d, density_change(d.big, values));
}

EnergyBreakdown energy(const SteadyState& state, const FlowSample& fs, const Discretization& d) {
    const QuadratureCloud& c = d.big;
    check_backward(fs, c);
    check_degree(c, d.energy.l_max);
    double kin = 0, pot_background = 0, de = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Phase& z = c.nodes[i];
        const double k = 0.5 * (z[3] * z[3] + z[4] * z[4] + z[5] * z[5]);
        const double e = state.e(z);
        kin += c.weights[i] * fs.values[i] * k;
        pot_background += 0.5 * node_mass(c, i) * (e - k);
        de += c.weights[i] * (fs.values[i] - c.fbar[i]) * e;
    }
    EnergyBreakdown b;
    b.kinetic = kin;
    b.paired_term = paired_energy(d, fs.values, d.energy.l_max);
    if (d.energy.richardson_probe && d.energy.l_max > 0) {
        b.probe_sensitivity = probe(b.paired_term, paired_energy(d, fs.values, d.energy.l_max - 1));
        if (b.probe_sensitivity > d.energy.probe_limit)
            throw NumericalError("angular truncation dominates the paired energy");
    }
    double base_kin = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Phase& z = c.nodes[i];
        base_kin += 0.5 * node_mass(c, i) * (z[3] * z[3] + z[4] * z[4] + z[5] * z[5]);
    }
    b.delta_total = de + b.paired_term;
    b.total = base_kin + pot_background + b.delta_total;
    b.potential = b.total - b.kinetic;
    return b;
}

EnergyBreakdown energy(const SteadyState& state, const HamiltonianField& H, double s, const Discretization& d) {
    if (d.energy.mode == EnergyOptions::Mode::split)
        return energy(state, sample_flow(H, s, d.big, d.flow, false, true), d);
    const EnergyBreakdown base = steady_energy(state, d);
    const std::vector<Phase> big = forward_images(H, s, d.big.nodes, d.flow);
    const std::vector<Phase> pair = forward_images(H, s, d.pair.nodes, d.flow);
    EnergyBreakdown b;
    for (std::size_t i = 0; i < d.big.size(); ++i) {
        const Phase& Z = big[i];
        b.kinetic += 0.5 * node_mass(d.big, i) * (Z[3] * Z[3] + Z[4] * Z[4] + Z[5] * Z[5]);
    }
    b.potential = direct_potential(d.pair, pair, d.energy.softening, d.energy.pair);
    b.paired_term = b.potential;
    if (d.energy.richardson_probe) {
        b.probe_sensitivity = probe(b.potential, direct_potential(d.pair, pair, 0.5 * d.energy.softening, d.energy.pair));
        if (b.probe_sensitivity > d.energy.probe_limit)
            throw NumericalError("pair cloud too coarse: softening dominates the potential energy");
    }
    b.total = b.kinetic + b.potential;
    b.delta_total = b.total - base.total;
    return b;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& w) {
    if (a.size() != b.size() || a.size() != w.size()) throw std::invalid_argument("l1_distance: size mismatch");
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * std::abs(a[i] - b[i]);
    return s;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b, const QuadratureCloud& cloud) {
    return l1_distance(a, b, cloud.weights);
}

Vec3 barycenter_x(const QuadratureCloud& cloud, const std::vector<Phase>& images) {
    if (images.size() != cloud.size()) throw std::invalid_argument("barycenter_x: size mismatch");
    Vec3 b{0, 0, 0};
    for (std::size_t i = 0; i < cloud.size(); ++i)
        for (int k = 0; k < 3; ++k) b[k] += node_mass(cloud, i) * images[i][k];
    return b;
}

Vec3 barycenter_x(const QuadratureCloud& cloud, const std::vector<double>& values) {
    if (values.size() != cloud.size()) throw std::invalid_argument("barycenter_x: size mismatch");
    Vec3 b{0, 0, 0};
    for (std::size_t i = 0; i < cloud.size(); ++i)
        for (int k = 0; k < 3; ++k) b[k] += cloud.weights[i] * values[i] * cloud.nodes[i][k];
    return b;
}

RecenterResult recenter_hamiltonian(const HamiltonianField& H, const QuadratureCloud& cloud, const FlowOptions& flow,
                                    const RecenterOptions& opt) {
    if (opt.max_iterations < 1 || !(opt.damping > 0)) throw std::invalid_argument("bad recenter options");
    const double mass = cloud.mass();
    const Vec3 target = barycenter_x(cloud, cloud.nodes);
    const Vec3 base = H.translation();
    // margin nodes carry no mass
    std::vector<Phase> pts;
    std::vector<double> m;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        if (node_mass(cloud, i) != 0) {
            pts.push_back(cloud.nodes[i]);
            m.push_back(node_mass(cloud, i));
        }
    RecenterResult r;
    Vec3 p{0, 0, 0};
    for (int it = 1; it <= opt.max_iterations; ++it) {
        HamiltonianField trial = H;
        trial.set_translation({base[0] + p[0], base[1] + p[1], base[2] + p[2]});
        const std::vector<Phase> img = forward_images(trial, 1.0, pts, flow);
        Vec3 bar{0, 0, 0};
        for (std::size_t i = 0; i < img.size(); ++i)
            for (int k = 0; k < 3; ++k) bar[k] += m[i] * img[i][k];
        const Vec3 err = {bar[0] - target[0], bar[1] - target[1], bar[2] - target[2]};
        r.field = trial;
        r.shift = p;
        r.barycenter = bar;
        r.iterations = it;
        if (std::sqrt(err[0] * err[0] + err[1] * err[1] + err[2] * err[2]) <= opt.tolerance * mass) return r;
        for (int k = 0; k < 3; ++k) p[k] -= opt.damping * err[k] / mass;
    }
    throw NumericalError("recenter_hamiltonian: barycenter iteration did not converge");
}

double casimir_forward(const QuadratureCloud& cloud, const std::function<double(double)>& G) {
    double s = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) s += cloud.weights[i] * G(cloud.fbar[i]);
    return s;
}

double casimir(const QuadratureCloud& cloud, const std::vector<double>& values,
               const std::function<double(double)>& G) {
    if (values.size() != cloud.size()) throw std::invalid_argument("casimir: size mismatch");
    double s = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) s += cloud.weights[i] * G(values[i]);
    return s;
}

double first_variation(const SteadyState& state, const HamiltonianField& H, const FlowSample& fs,
                       const Discretization& d) {
    const QuadratureCloud& c = d.big;
    check_forward(fs, c);
    check_backward(fs, c);
    check_degree(c, d.energy.l_max);
    const CloudPotential ex = density_change_potential(d, fs.values);
    std::vector<double> term(c.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(c.size()); ++i) {
        const Phase& Z = fs.images[i];
        const Phase g = H.gradient(Z);
        Vec3 gphi;
        ex.eval(xpart(Z), nullptr, &gphi);
        const Vec3 gb = grad_phibar(state, Z);
        double t = -(Z[3] * g[0] + Z[4] * g[1] + Z[5] * g[2]);
        for (int q = 0; q < 3; ++q) t += (gb[q] + gphi[q]) * g[3 + q];
        term[i] = node_mass(c, i) * t;
    }
    return sum(term);
}

double first_variation(const SteadyState& state, const HamiltonianField& H, double s, const Discretization& d) {
    return first_variation(state, H, sample_flow(H, s, d.big, d.flow), d);
}

double energy_rate(const SteadyState& state, const HamiltonianField& H, const FlowSample& fs,
                   const Discretization& d) {
    const QuadratureCloud& c = d.big;
    check_backward(fs, c);
    check_degree(c, d.energy.l_max);
    const std::vector<double> dphi = density_change_potential(d, fs.values).cell_phi();
    std::vector<double> term(c.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(c.size()); ++i) {
        const double g = poisson_bracket(H, state, fs.origins[i]);
        term[i] = -c.weights[i] * g * (state.e(c.nodes[i]) + dphi[static_cast<std::size_t>(c.xcell[i])]);
    }
    return sum(term);
}

double second_variation(const SteadyState& state, const HamiltonianField& H, const FlowSample& fs,
                        const Discretization& d) {
    const QuadratureCloud& c = d.big;
    check_backward(fs, c);
    check_degree(c, d.energy.l_max);
    const std::size_t n = c.size();
    std::vector<double> gw(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
        gw[i] = c.weights[i] * poisson_bracket(H, state, fs.origins[i]);
    const CloudPotential dp = density_change_potential(d, fs.values);
    const CloudPotential gp = potential_of(d, gw);
    const std::vector<Vec3>& dgrad = dp.cell_grad();
    const std::vector<Vec3>& ggrad = gp.cell_grad();
    std::vector<double> term(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const Phase& z = c.nodes[i];
        const std::size_t k = static_cast<std::size_t>(c.xcell[i]);
        const Phase gh = H.gradient(z);
        const Vec3 gb = grad_phibar(state, z);
        double a = z[3] * gh[0] + z[4] * gh[1] + z[5] * gh[2];
        double b = 0;
        for (int q = 0; q < 3; ++q) {
            a -= (gb[q] + dgrad[k][q]) * gh[3 + q];
            b += gh[3 + q] * ggrad[k][q];
        }
        term[i] = gw[i] * a - c.weights[i] * fs.values[i] * b;
    }
    return sum(term);
}

double second_variation(const SteadyState& state, const HamiltonianField& H, double s, const Discretization& d) {
    return second_variation(state, H, sample_flow(H, s, d.big, d.flow, false, true), d);
}

double energy_acceleration(const SteadyState& state, const HamiltonianField& H, const FlowSample& fs,
                           const Discretization& d) {
    const QuadratureCloud& c = d.big;
    check_backward(fs, c);
    check_degree(c, d.energy.l_max);
    const std::size_t n = c.size();
    std::vector<double> gw(n), rate(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        double g, r;
        bracket_and_rate(H, state, fs.origins[i], g, r);
        gw[i] = c.weights[i] * g;
        rate[i] = c.weights[i] * r;
    }
    const std::vector<double> dphi = density_change_potential(d, fs.values).cell_phi();
    const CloudPotential gp = potential_of(d, gw);
    std::vector<double> term(n);
    for (std::size_t i = 0; i < n; ++i)
        term[i] = rate[i] * (state.e(c.nodes[i]) + dphi[static_cast<std::size_t>(c.xcell[i])]);
    return sum(term) + 2.0 * gp.energy();
}

TaylorResidual taylor_residual(const SteadyState& state, const HamiltonianField& H, const Discretization& d,
                               bool exact_derivative) {
    auto d2 = [&](const FlowSample& fs) {
        return exact_derivative ? energy_acceleration(state, H, fs, d) : second_variation(state, H, fs, d);
    };
    TaylorResidual t;
    FlowSample fs = steady_sample(d.big);
    const double d2_0 = d2(fs);
    t.first_order = exact_derivative ? energy_rate(state, H, fs, d) : first_variation(state, H, fs, d);
    fs.images.clear();
    const GaussRule g = gauss_legendre(8, 0.0, 1.0);
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        const double s = g.nodes[k];
        fs = advance_flow(H, fs, s, d.big, d.flow);
        const double v = d2(fs);
        t.s_nodes.push_back(s);
        t.d2.push_back(v);
        t.unsymmetric_integral += g.weights[k] * (1.0 - s) * v;
        t.symmetric_integral += 0.5 * g.weights[k] * (1.0 - 2.0 * s) * (v - d2_0);
    }
    fs = advance_flow(H, fs, 1.0, d.big, d.flow);
    t.delta_energy = energy(state, fs, d).delta_total;
    t.symmetric = std::abs(t.delta_energy - t.symmetric_integral);
    t.unsymmetric = std::abs(t.delta_energy - t.first_order - t.unsymmetric_integral);
    return t;
}

}  // namespace vplab
