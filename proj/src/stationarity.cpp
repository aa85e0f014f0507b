#include "vplab/stationarity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vplab {

namespace {

Vec3 radial_grad(const SteadyState& state, const Vec3& x) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (r == 0) return {0, 0, 0};
    double phi, dphi;
    state.phi_d(r, phi, dphi);
    return {dphi / r * x[0], dphi / r * x[1], dphi / r * x[2]};
}

StateMeasure node_measure(const QuadratureCloud& cloud) {
    StateMeasure m;
    m.points = cloud.nodes;
    m.masses.resize(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) m.masses[i] = cloud.weights[i] * cloud.fbar[i];
    return m;
}

}  // namespace

StateMeasure steady_measure(std::shared_ptr<const SteadyState> state, const QuadratureCloud& cloud) {
    StateMeasure m = node_measure(cloud);
    m.grad_phi = [state](const Vec3& x) { return radial_grad(*state, x); };
    return m;
}

StateMeasure translated_measure(std::shared_ptr<const SteadyState> state, const QuadratureCloud& cloud,
                                const Vec3& shift_v) {
    StateMeasure m = steady_measure(std::move(state), cloud);
    for (Phase& z : m.points)
        for (int k = 0; k < 3; ++k) z[3 + k] += shift_v[k];
    return m;
}

StateMeasure pushforward_measure(std::shared_ptr<const SteadyState> state, const HamiltonianField& H, double s,
                                 const Discretization& d) {
    return pushforward_measure(std::move(state), sample_flow(H, s, d.big, d.flow), d);
}

StateMeasure pushforward_measure(std::shared_ptr<const SteadyState> state, const FlowSample& fs,
                                 const Discretization& d) {
    if (!fs.has_forward() || !fs.has_backward()) throw std::invalid_argument("pushforward_measure: incomplete sample");
    StateMeasure m = node_measure(d.big);
    m.points = fs.images;
    auto dp = std::make_shared<const CloudPotential>(density_change_potential(d, fs.values));
    m.grad_phi = [state, dp](const Vec3& x) {
        Vec3 g = radial_grad(*state, x), dg;
        dp->eval(x, nullptr, &dg);
        for (int k = 0; k < 3; ++k) g[k] += dg[k];
        return g;
    };
    return m;
}

std::vector<HamiltonianField> stationarity_tests(std::shared_ptr<const SteadyState> state, const TestFamily& fam) {
    BumpSpec bump;
    bump.kind = BumpSpec::Kind::phase_ball;
    std::vector<HamiltonianField> out;
    for (int t = 0; t < fam.count; ++t)
        out.push_back(sample_hamiltonian(state, fam.seed + static_cast<std::uint64_t>(t), fam.n_modes,
                                         fam.max_wavenumber, 1.0, bump));
    return out;
}

double stationarity_form(const StateMeasure& m, const HamiltonianField& psi) {
    if (m.points.size() != m.masses.size()) throw std::invalid_argument("measure: size mismatch");
    std::vector<double> term(m.points.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m.points.size()); ++i) {
        if (m.masses[i] == 0) continue;
        const Phase& z = m.points[i];
        const Phase g = psi.gradient(z);
        const Vec3 gphi = m.grad_phi({z[0], z[1], z[2]});
        double t = 0;
        for (int k = 0; k < 3; ++k) t += -z[3 + k] * g[k] + gphi[k] * g[3 + k];
        term[i] = m.masses[i] * t;
    }
    double s = 0;
    for (double t : term) s += t;
    return s;
}

double c1_norm(const StateMeasure& m, const HamiltonianField& psi) {
    double vmax = 0, gmax = 0;
    for (const Phase& z : m.points) {
        Phase g;
        const double v = psi.eval(z, &g, nullptr);
        double g2 = 0;
        for (double q : g) g2 += q * q;
        vmax = std::max(vmax, std::abs(v));
        gmax = std::max(gmax, std::sqrt(g2));
    }
    return vmax + gmax;
}

StationarityResult stationarity_residual(const StateMeasure& m, const std::vector<HamiltonianField>& tests) {
    if (tests.empty()) throw std::invalid_argument("stationarity_residual: empty test set");
    StationarityResult r;
    for (const HamiltonianField& psi : tests) {
        const double n = c1_norm(m, psi);
        const double v = n > 0 ? std::abs(stationarity_form(m, psi)) / n : 0.0;
        r.per_test.push_back(v);
        r.residual = std::max(r.residual, v);
    }
    return r;
}

}  // namespace vplab
