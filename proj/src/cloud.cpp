#include "vplab/cloud.hpp"

#include <cmath>

namespace vplab {

void CloudSpec::validate() const {
    if (kind != "spherical" && kind != "tensor")
        throw std::invalid_argument("CloudSpec: kind must be 'spherical' or 'tensor'");
    if (n_r < 1 || n_speed < 1 || n_theta < 1 || n_phi < 1 || n_theta_v < 1 || n_phi_v < 1)
        throw std::invalid_argument("CloudSpec: node counts must be >= 1");
    if (n_r_margin < 0 || n_speed_margin < 0) throw std::invalid_argument("CloudSpec: margin counts must be >= 0");
    if (!(core_stretch > 0)) throw std::invalid_argument("CloudSpec: core_stretch must be > 0");
    if (!(energy_margin > 0 && energy_margin < 1))
        throw std::invalid_argument("CloudSpec: energy_margin must lie in (0, 1)");
    if (tensor_n < 2) throw std::invalid_argument("CloudSpec: tensor_n must be >= 2");
    if (!(resolution_scale > 0)) throw std::invalid_argument("CloudSpec: resolution_scale must be > 0");
}

CloudSpec CloudSpec::scaled(double factor) const {
    CloudSpec s = *this;
    auto sc = [&](int n, int lo) { return std::max(lo, static_cast<int>(std::lround(n * factor))); };
    s.n_r = sc(n_r, 1);
    s.n_r_margin = n_r_margin > 0 ? sc(n_r_margin, 1) : 0;
    s.n_speed = sc(n_speed, 1);
    s.n_speed_margin = n_speed_margin > 0 ? sc(n_speed_margin, 1) : 0;
    s.n_theta = sc(n_theta, 1);
    s.n_phi = sc(n_phi, 1);
    s.n_theta_v = sc(n_theta_v, 1);
    s.n_phi_v = sc(n_phi_v, 1);
    s.tensor_n = sc(tensor_n, 2);
    s.resolution_scale = 1.0;
    return s;
}

double RadialSegment::radius(double tt) const {
    return stretch > 0 ? scale * std::sinh(stretch * tt) / std::sinh(stretch) : tt;
}

double RadialSegment::param(double r) const {
    return stretch > 0 ? std::asinh(r * std::sinh(stretch) / scale) / stretch : r;
}

double QuadratureCloud::total_volume() const {
    double s = 0;
    for (double w : weights) s += w;
    return s;
}

double QuadratureCloud::mass() const {
    double s = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * fbar[i];
    return s;
}

SphereRule sphere_rule(int n_theta, int n_phi, double azimuth_offset) {
    SphereRule s;
    const GaussRule g = gauss_legendre(n_theta);
    for (int i = 0; i < n_theta; ++i) {
        const double c = g.nodes[i], sn = std::sqrt(std::max(0.0, 1.0 - c * c));
        for (int j = 0; j < n_phi; ++j) {
            const double ph = 2.0 * kPi * (j + azimuth_offset) / n_phi;
            s.dirs.push_back({sn * std::cos(ph), sn * std::sin(ph), c});
            s.weights.push_back(g.weights[i] * 2.0 * kPi / n_phi);
        }
    }
    return s;
}

namespace {

QuadratureCloud spherical_cloud(const SteadyState& st, const CloudSpec& sp) {
    QuadratureCloud c;
    const double R = st.r_support();
    const double e0 = st.e0();
    const double ecut = sp.include_margin ? e0 * (1.0 - sp.energy_margin) : e0;
    c.energy_cut = ecut;
    const double r_ext = -st.mass() / (4.0 * kPi * ecut);

    struct Shell { double r, w; bool inner; int segment, index; };
    std::vector<Shell> shells;
    {
        const GaussRule g = gauss_legendre(sp.n_r, 0.0, 1.0);
        const double b = sp.core_stretch, sb = std::sinh(b);
        RadialSegment seg{0.0, 1.0, R, b, g.nodes};
        for (int i = 0; i < sp.n_r; ++i) {
            const double t = g.nodes[i];
            const double r = seg.radius(t);
            const double drdt = R * b * std::cosh(b * t) / sb;
            shells.push_back({r, g.weights[i] * drdt * r * r, true, 0, i});
        }
        c.segments.push_back(seg);
        if (sp.include_margin && sp.n_r_margin > 0) {
            const GaussRule gm = gauss_legendre(sp.n_r_margin, R, r_ext);
            for (int i = 0; i < sp.n_r_margin; ++i)
                shells.push_back({gm.nodes[i], gm.weights[i] * gm.nodes[i] * gm.nodes[i], false, 1, i});
            c.segments.push_back({R, r_ext, 1.0, 0.0, gm.nodes});
        }
    }
    const SphereRule sx = sphere_rule(sp.n_theta, sp.n_phi, 0.5);
    const SphereRule sv = sphere_rule(sp.n_theta_v, sp.n_phi_v, 0.25);

    for (const Shell& sh : shells) {
        const double phi = st.phi(sh.r);
        const double vmax = sh.inner ? std::sqrt(2.0 * std::max(e0 - phi, 0.0)) : 0.0;
        std::vector<double> us, uw;
        if (sh.inner && vmax > 0) {
            const GaussRule g = gauss_legendre(sp.n_speed, 0.0, vmax);
            for (int i = 0; i < sp.n_speed; ++i) { us.push_back(g.nodes[i]); uw.push_back(g.weights[i]); }
        }
        if (sp.include_margin && sp.n_speed_margin > 0) {
            const double vext = std::sqrt(2.0 * std::max(ecut - phi, 0.0));
            if (vext > vmax) {
                const GaussRule g = gauss_legendre(sp.n_speed_margin, vmax, vext);
                for (int i = 0; i < sp.n_speed_margin; ++i) { us.push_back(g.nodes[i]); uw.push_back(g.weights[i]); }
            }
        }
        for (std::size_t a = 0; a < sx.dirs.size(); ++a) {
            const Vec3 x = {sh.r * sx.dirs[a][0], sh.r * sx.dirs[a][1], sh.r * sx.dirs[a][2]};
            const double wx = sh.w * sx.weights[a];
            const int cell = static_cast<int>(c.xcell_pos.size());
            c.xcell_pos.push_back(x);
            c.xcell_volume.push_back(wx);
            c.xcell_shell.push_back({sh.segment, sh.index});
            for (std::size_t k = 0; k < us.size(); ++k) {
                const double u = us[k];
                for (std::size_t b = 0; b < sv.dirs.size(); ++b) {
                    Phase z = {x[0], x[1], x[2], u * sv.dirs[b][0], u * sv.dirs[b][1], u * sv.dirs[b][2]};
                    c.nodes.push_back(z);
                    c.weights.push_back(wx * uw[k] * u * u * sv.weights[b]);
                    c.xcell.push_back(cell);
                }
            }
        }
    }
    return c;
}

QuadratureCloud tensor_cloud(const SteadyState& st, const CloudSpec& sp) {
    QuadratureCloud c;
    const double e0 = st.e0();
    const double ecut = sp.include_margin ? e0 * (1.0 - sp.energy_margin) : e0;
    c.energy_cut = ecut;
    const double xr = -st.mass() / (4.0 * kPi * ecut);
    const double vr = std::sqrt(2.0 * (ecut - st.phi(0.0)));
    const int n = sp.tensor_n;
    const double hx = 2 * xr / n, hv = 2 * vr / n;
    const double w = std::pow(hx * hv, 3);
    auto coord = [&](int i, double half) { return -half + (i + 0.5) * 2 * half / n; };
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                const Vec3 x = {coord(i0, xr), coord(i1, xr), coord(i2, xr)};
                const double phi = st.phi(std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
                if (phi >= ecut) continue;
                int cell = -1;
                for (int j0 = 0; j0 < n; ++j0)
                    for (int j1 = 0; j1 < n; ++j1)
                        for (int j2 = 0; j2 < n; ++j2) {
                            const Phase z = {x[0], x[1], x[2], coord(j0, vr), coord(j1, vr), coord(j2, vr)};
                            const double e = 0.5 * (z[3] * z[3] + z[4] * z[4] + z[5] * z[5]) + phi;
                            if (e >= ecut) continue;
                            if (cell < 0) {
                                cell = static_cast<int>(c.xcell_pos.size());
                                c.xcell_pos.push_back(x);
                                c.xcell_volume.push_back(hx * hx * hx);
                            }
                            c.nodes.push_back(z);
                            c.weights.push_back(w);
                            c.xcell.push_back(cell);
                        }
            }
    return c;
}

}  // namespace

QuadratureCloud build_cloud(const SteadyState& state, const CloudSpec& spec_in) {
    spec_in.validate();
    const CloudSpec spec = spec_in.resolution_scale != 1.0 ? spec_in.scaled(spec_in.resolution_scale) : spec_in;
    QuadratureCloud c = spec.kind == "tensor" ? tensor_cloud(state, spec) : spherical_cloud(state, spec);
    c.spec = spec_in;
    c.fbar.resize(c.nodes.size());
    for (std::size_t i = 0; i < c.nodes.size(); ++i) c.fbar[i] = state.f(c.nodes[i]);
    return c;
}

QuadratureCloud build_ball_rule(double radius, int n_rad, int n_alpha, int n_theta, int n_phi) {
    QuadratureCloud c;
    const GaussRule gr = gauss_legendre(n_rad, 0.0, radius);
    const GaussRule ga = gauss_legendre(n_alpha, 0.0, 0.5 * kPi);
    const SphereRule s1 = sphere_rule(n_theta, n_phi, 0.5);
    const SphereRule s2 = sphere_rule(n_theta, n_phi, 0.25);
    for (int i = 0; i < n_rad; ++i) {
        const double t = gr.nodes[i];
        for (int j = 0; j < n_alpha; ++j) {
            const double a = ga.nodes[j], ca = std::cos(a), sa = std::sin(a);
            const double wr = gr.weights[i] * std::pow(t, 5) * ga.weights[j] * ca * ca * sa * sa;
            for (std::size_t p = 0; p < s1.dirs.size(); ++p) {
                const Vec3 x = {t * ca * s1.dirs[p][0], t * ca * s1.dirs[p][1], t * ca * s1.dirs[p][2]};
                const int cell = static_cast<int>(c.xcell_pos.size());
                c.xcell_pos.push_back(x);
                c.xcell_volume.push_back(0.0);
                for (std::size_t q = 0; q < s2.dirs.size(); ++q) {
                    c.nodes.push_back({x[0], x[1], x[2], t * sa * s2.dirs[q][0], t * sa * s2.dirs[q][1],
                                       t * sa * s2.dirs[q][2]});
                    c.weights.push_back(wr * s1.weights[p] * s2.weights[q]);
                    c.xcell.push_back(cell);
                }
            }
        }
    }
    c.fbar.assign(c.nodes.size(), 0.0);
    c.energy_cut = 0.0;
    return c;
}

}  // namespace vplab
