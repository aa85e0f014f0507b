#include "vplab/radial_steady.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

namespace vplab {

namespace {

constexpr int kProfileVersion = 1;
constexpr char kProfileFormat[] = "vplab.steady-profile";

struct Shot {
    std::vector<double> r, psi, dpsi;
    double radius = 0, mass = 0;
};

// Integrates psi'' + 2 psi'/r = -k psi_+^n from psi(0)=psi_c, psi'(0)=0 with
// fixed-step RK4 until psi crosses zero; the last step is shortened by
// bisection so that the final node sits on the surface.
Shot shoot(double k, double n, double psi_c, double h, int max_steps) {
    auto rhs = [&](double r, double y0, double y1, double& d0, double& d1) {
        const double src = k * std::pow(std::max(y0, 0.0), n);
        d0 = y1;
        d1 = (r > 0.0) ? -src - 2.0 * y1 / r : -src / 3.0;
    };
    auto step = [&](double r, double y0, double y1, double dh, double& o0, double& o1) {
        double a0, a1, b0, b1, c0, c1, e0, e1;
        rhs(r, y0, y1, a0, a1);
        rhs(r + 0.5 * dh, y0 + 0.5 * dh * a0, y1 + 0.5 * dh * a1, b0, b1);
        rhs(r + 0.5 * dh, y0 + 0.5 * dh * b0, y1 + 0.5 * dh * b1, c0, c1);
        rhs(r + dh, y0 + dh * c0, y1 + dh * c1, e0, e1);
        o0 = y0 + dh / 6.0 * (a0 + 2 * b0 + 2 * c0 + e0);
        o1 = y1 + dh / 6.0 * (a1 + 2 * b1 + 2 * c1 + e1);
    };
    Shot s;
    double r = 0, y0 = psi_c, y1 = 0;
    s.r.push_back(r); s.psi.push_back(y0); s.dpsi.push_back(y1);
    for (int i = 0; i < max_steps; ++i) {
        double n0, n1;
        step(r, y0, y1, h, n0, n1);
        if (n0 <= 0.0) {
            double lo = 0.0, hi = h;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * (r + h); ++it) {
                const double mid = 0.5 * (lo + hi);
                double m0, m1;
                step(r, y0, y1, mid, m0, m1);
                (m0 > 0.0 ? lo : hi) = mid;
            }
            double f0, f1;
            step(r, y0, y1, hi, f0, f1);
            if (hi < 1e-6 * h) {
                // surface lands on the previous node: move that node instead
                s.r.back() = r + hi;
                s.psi.back() = 0.0;
                s.dpsi.back() = f1;
            } else {
                s.r.push_back(r + hi);
                s.psi.push_back(0.0);
                s.dpsi.push_back(f1);
            }
            s.radius = s.r.back();
            s.mass = -4.0 * kPi * s.radius * s.radius * s.dpsi.back();
            return s;
        }
        r += h;
        y0 = n0;
        y1 = n1;
        s.r.push_back(r); s.psi.push_back(y0); s.dpsi.push_back(y1);
    }
    throw NumericalError("build_polytrope: shooting did not reach the vacuum boundary "
                         "(increase grid.max_scaled_radius or check mu)");
}

}  // namespace

void PolytropeSpec::validate() const {
    if (!(mu > 5.0 / 3.0 && mu < 3.5))
        throw std::invalid_argument("PolytropeSpec: mu must lie in (5/3, 7/2)");
    if (!(target_mass > 0)) throw std::invalid_argument("PolytropeSpec: target_mass must be > 0");
    if (amplitude < 0) throw std::invalid_argument("PolytropeSpec: amplitude must be >= 0");
    if (amplitude == 0 && !(support_radius > 0))
        throw std::invalid_argument("PolytropeSpec: support_radius must be > 0");
    if (grid.nodes < 16) throw std::invalid_argument("PolytropeSpec: grid.nodes must be >= 16");
    if (!(grid.max_scaled_radius > 0))
        throw std::invalid_argument("PolytropeSpec: grid.max_scaled_radius must be > 0");
    if (!(mass_tolerance > 0)) throw std::invalid_argument("PolytropeSpec: mass_tolerance must be > 0");
}

double shell_constant(double mu) {
    return 4.0 * std::sqrt(2.0) * kPi * std::beta(1.5, mu + 1.0);
}

SteadyState build_polytrope(const PolytropeSpec& spec) {
    spec.validate();
    const double n = spec.mu + 1.5;
    const double c = shell_constant(spec.mu);
    const double A0 = spec.amplitude > 0 ? spec.amplitude : 1.0;
    const double k = c * A0;
    auto core_radius = [&](double psi_c) { return 1.0 / std::sqrt(k * std::pow(psi_c, n - 1.0)); };

    // Pilot shot fixes the step in core-radius units.
    const double pilot_h = 0.01;
    const int pilot_steps = static_cast<int>(spec.grid.max_scaled_radius / pilot_h) + 1;
    const Shot pilot = shoot(k, n, 1.0, pilot_h * core_radius(1.0), pilot_steps);
    const double xi1 = pilot.radius / core_radius(1.0);
    const double h_scaled = xi1 / spec.grid.nodes;
    const int max_steps = static_cast<int>(spec.grid.max_scaled_radius / h_scaled) + 2;
    auto run = [&](double psi_c) { return shoot(k, n, psi_c, h_scaled * core_radius(psi_c), max_steps); };

    // Bisection on the central depth for the target mass (log scale).
    // For n > 3 the mass decreases with depth.
    const bool decreasing = n > 3.0;
    auto heavy = [&](const Shot& s) { return s.mass > spec.target_mass; };
    double x0 = 1.0;
    Shot s0 = run(x0);
    const bool deeper = heavy(s0) == decreasing;
    double x1 = x0;
    Shot s1 = s0;
    for (int guard = 0;; ++guard) {
        if (guard > 400) throw NumericalError("build_polytrope: could not bracket the target mass");
        x1 = deeper ? x1 * 2.0 : x1 * 0.5;
        s1 = run(x1);
        if (heavy(s1) != heavy(s0)) break;
        x0 = x1;
        s0 = s1;
    }
    double lo = std::min(x0, x1), hi = std::max(x0, x1);
    const bool heavy_lo = heavy(x0 < x1 ? s0 : s1);
    Shot best = s0;
    bool converged = false;
    for (int it = 0; it < spec.max_iterations; ++it) {
        const double mid = std::sqrt(lo * hi);
        Shot s = run(mid);
        best = s;
        if (std::abs(s.mass - spec.target_mass) < spec.mass_tolerance * spec.target_mass) {
            converged = true;
            break;
        }
        (heavy(s) == heavy_lo ? lo : hi) = mid;
    }
    if (!converged) throw NumericalError("build_polytrope: shooting did not converge on the mass");

    // Exact fix with the scaling psi -> a psi(r/b): A -> A a^(1-n)/b^2, M -> a b M.
    double a, b, A;
    if (spec.amplitude > 0) {
        a = std::pow(spec.target_mass / best.mass, 2.0 / (3.0 - n));
        b = std::pow(a, 0.5 * (1.0 - n));
        A = A0;
    } else {
        b = spec.support_radius / best.radius;
        a = spec.target_mass / (best.mass * b);
        A = A0 * std::pow(a, 1.0 - n) / (b * b);
    }

    SteadyState st;
    st.spec_ = spec;
    st.amplitude_ = A;
    st.c_mu_ = c;
    st.r_support_ = spec.amplitude > 0 ? best.radius * b : spec.support_radius;
    const double R = st.r_support_;
    std::vector<double> r(best.r.size()), phi(best.r.size()), dphi(best.r.size());
    const double dpsi_surface = a / b * best.dpsi.back();
    st.mass_ = -4.0 * kPi * R * R * dpsi_surface;
    st.e0_ = -st.mass_ / (4.0 * kPi * R);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = (i + 1 == r.size()) ? R : best.r[i] * b;
        phi[i] = st.e0_ - a * best.psi[i];
        dphi[i] = -a / b * best.dpsi[i];
    }
    phi.back() = st.e0_;
    // second derivatives from the Poisson equation make the table C^2
    std::vector<double> d2phi(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double psi = std::max(st.e0_ - phi[i], 0.0);
        const double rho = c * A * std::pow(psi, n);
        d2phi[i] = i == 0 ? rho / 3.0 : rho - 2.0 * dphi[i] / r[i];
    }
    st.phi_ = HermiteTable(std::move(r), std::move(phi), std::move(dphi), std::move(d2phi));
    st.finish();
    return st;
}

void SteadyState::finish() {
    const auto& r = phi_.x();
    const auto& p = phi_.y();
    const auto& dp = phi_.dy();
    const double n = spec_.mu + 1.5;
    rho_center_ = c_mu_ * amplitude_ * std::pow(e0_ - p.front(), n);
    rho_phase_ = 0;
    for (std::size_t i = 0; i < r.size(); ++i)
        rho_phase_ = std::max(rho_phase_, std::sqrt(r[i] * r[i] + 2.0 * std::max(e0_ - p[i], 0.0)));
    // Gauss-law mass vs. integrated density, cell by cell (Simpson).
    double enclosed = 0, worst = 0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        const double a = r[i], b = r[i + 1], m = 0.5 * (a + b);
        auto integrand = [&](double x) { return 4.0 * kPi * x * x * rho(x); };
        enclosed += (b - a) / 6.0 * (integrand(a) + 4.0 * integrand(m) + integrand(b));
        const double gauss = 4.0 * kPi * b * b * dp[i + 1];
        worst = std::max(worst, std::abs(gauss - enclosed));
    }
    poisson_residual_ = worst / mass_;
}

void SteadyState::phi_d(double r, double& ph, double& dph) const {
    r = std::abs(r);
    if (r >= r_support_) {
        ph = -mass_ / (4.0 * kPi * r);
        dph = mass_ / (4.0 * kPi * r * r);
        return;
    }
    phi_.eval(r, ph, dph);
}

double SteadyState::phi(double r) const {
    double p, d;
    phi_d(r, p, d);
    return p;
}

double SteadyState::rho(double r) const {
    if (std::abs(r) >= r_support_) return 0.0;
    const double psi = e0_ - phi(r);
    return psi > 0 ? c_mu_ * amplitude_ * std::pow(psi, spec_.mu + 1.5) : 0.0;
}

double SteadyState::d2phi(double r) const {
    r = std::abs(r);
    if (r >= r_support_) return -mass_ / (2.0 * kPi * r * r * r);
    double p, d, d2;
    phi_.eval(r, p, d, d2);
    return d2;
}

double SteadyState::F(double e) const {
    return e < e0_ ? amplitude_ * std::pow(e0_ - e, spec_.mu) : 0.0;
}

double SteadyState::dF(double e) const {
    return e < e0_ ? -spec_.mu * amplitude_ * std::pow(e0_ - e, spec_.mu - 1.0) : 0.0;
}

double SteadyState::d2F(double e) const {
    return e < e0_ ? spec_.mu * (spec_.mu - 1.0) * amplitude_ * std::pow(e0_ - e, spec_.mu - 2.0)
                   : 0.0;
}

double SteadyState::e(const Phase& z) const {
    const double r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
    return 0.5 * (z[3] * z[3] + z[4] * z[4] + z[5] * z[5]) + phi(r);
}

Phase SteadyState::grad_e(const Phase& z) const {
    const double r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
    double p, d;
    phi_d(r, p, d);
    const double s = r > 0 ? d / r : 0.0;
    return {s * z[0], s * z[1], s * z[2], z[3], z[4], z[5]};
}

double SteadyState::f_grad(const Phase& z, Phase& grad) const {
    const double r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
    double p, d;
    phi_d(r, p, d);
    const double e = 0.5 * (z[3] * z[3] + z[4] * z[4] + z[5] * z[5]) + p;
    if (e >= e0_) {
        grad.fill(0.0);
        return 0.0;
    }
    const double gap = e0_ - e;
    const double f = amplitude_ * std::pow(gap, spec_.mu);
    const double df = -spec_.mu * f / gap;
    const double s = r > 0 ? d / r : 0.0;
    for (int i = 0; i < 3; ++i) {
        grad[i] = df * s * z[i];
        grad[3 + i] = df * z[3 + i];
    }
    return f;
}

Mat6 SteadyState::hess_e(const Phase& z) const {
    Mat6 h = Mat6::Zero();
    const double r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
    double p, d;
    phi_d(r, p, d);
    const double d2 = d2phi(r);
    const double t = r > 1e-12 * r_support_ ? d / r : rho_center_ / 3.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double xx = r > 1e-12 * r_support_ ? z[i] * z[j] / (r * r) : 0.0;
            h(i, j) = (d2 - t) * xx + (i == j ? t : 0.0);
        }
        h(3 + i, 3 + i) = 1.0;
    }
    return h;
}

double SteadyState::energy_sublevel_volume(double level, int n_quad) const {
    if (level >= 0) throw std::invalid_argument("energy_sublevel_volume: level must be < 0");
    if (level <= phi(0.0)) return 0.0;
    double r_top;
    if (level >= e0_) {
        r_top = -mass_ / (4.0 * kPi * level);
    } else {
        double lo = 0, hi = r_support_;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (phi(mid) < level ? lo : hi) = mid;
        }
        r_top = 0.5 * (lo + hi);
    }
    // r = r_top (1 - s^2) absorbs the (level - phi)^(3/2) endpoint behaviour
    const GaussRule g = gauss_legendre(n_quad, 0.0, 1.0);
    double sum = 0;
    for (int i = 0; i < n_quad; ++i) {
        const double s = g.nodes[i];
        const double r = r_top * (1.0 - s * s);
        const double gap = std::max(level - phi(r), 0.0);
        const double vball = 4.0 / 3.0 * kPi * std::pow(2.0 * gap, 1.5);
        sum += g.weights[i] * 2.0 * r_top * s * 4.0 * kPi * r * r * vball;
    }
    return sum;
}

void save_profile(const SteadyState& st, const std::string& path) {
    const auto& sp = st.spec();
    nlohmann::json j;
    j["format"] = kProfileFormat;
    j["version"] = kProfileVersion;
    j["spec"] = {{"mu", sp.mu},
                 {"amplitude", sp.amplitude},
                 {"target_mass", sp.target_mass},
                 {"support_radius", sp.support_radius},
                 {"grid_nodes", sp.grid.nodes},
                 {"grid_max_scaled_radius", sp.grid.max_scaled_radius},
                 {"mass_tolerance", sp.mass_tolerance},
                 {"max_iterations", sp.max_iterations}};
    j["amplitude"] = st.amplitude();
    j["shell_constant"] = st.shell_constant();
    j["e0"] = st.e0();
    j["mass"] = st.mass();
    j["r_support"] = st.r_support();
    j["r"] = st.phi_table().x();
    j["phi"] = st.phi_table().y();
    j["dphi"] = st.phi_table().dy();
    j["d2phi"] = st.phi_table().d2y();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_profile: cannot open " + path);
    out << j.dump(1) << '\n';
}

SteadyState load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_profile: cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.value("format", "") != kProfileFormat)
        throw std::runtime_error("load_profile: not a steady-state profile: " + path);
    if (j.at("version").get<int>() != kProfileVersion)
        throw std::runtime_error("load_profile: unsupported profile version");
    SteadyState st;
    const auto& s = j.at("spec");
    st.spec_.mu = s.at("mu");
    st.spec_.amplitude = s.at("amplitude");
    st.spec_.target_mass = s.at("target_mass");
    st.spec_.support_radius = s.at("support_radius");
    st.spec_.grid.nodes = s.at("grid_nodes");
    st.spec_.grid.max_scaled_radius = s.at("grid_max_scaled_radius");
    st.spec_.mass_tolerance = s.at("mass_tolerance");
    st.spec_.max_iterations = s.at("max_iterations");
    st.amplitude_ = j.at("amplitude");
    st.c_mu_ = j.at("shell_constant");
    st.e0_ = j.at("e0");
    st.mass_ = j.at("mass");
    st.r_support_ = j.at("r_support");
    st.phi_ = HermiteTable(j.at("r").get<std::vector<double>>(), j.at("phi").get<std::vector<double>>(),
                           j.at("dphi").get<std::vector<double>>(), j.at("d2phi").get<std::vector<double>>());
    st.finish();
    return st;
}

}  // namespace vplab
