#include "vplab/multipole.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vplab {

namespace {

constexpr int kMaxDegree = 16;

// value with its gradient in the three coordinates
struct Dual {
    double v = 0;
    double d[3] = {0, 0, 0};
};

Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, {a.d[0] + b.d[0], a.d[1] + b.d[1], a.d[2] + b.d[2]}}; }
Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, {a.d[0] - b.d[0], a.d[1] - b.d[1], a.d[2] - b.d[2]}}; }
Dual operator*(double c, const Dual& a) { return {c * a.v, {c * a.d[0], c * a.d[1], c * a.d[2]}}; }
Dual operator*(const Dual& a, const Dual& b) {
    return {a.v * b.v,
            {a.d[0] * b.v + a.v * b.d[0], a.d[1] * b.v + a.v * b.d[1], a.d[2] * b.v + a.v * b.d[2]}};
}

int comp_c(int l, int m) { return l * l + (m == 0 ? 0 : 2 * m - 1); }
int comp_s(int l, int m) { return l * l + 2 * m; }

// (2 - delta_m0) (l - m)! / (l + m)! per component
std::vector<double> norms(int L) {
    std::vector<double> n((L + 1) * (L + 1));
    for (int l = 0; l <= L; ++l)
        for (int m = 0; m <= l; ++m) {
            double r = 1;
            for (int k = l - m + 1; k <= l + m; ++k) r /= k;
            n[comp_c(l, m)] = (m == 0 ? 1.0 : 2.0) * r;
            if (m > 0) n[comp_s(l, m)] = n[comp_c(l, m)];
        }
    return n;
}

std::vector<int> degrees(int L) {
    std::vector<int> d((L + 1) * (L + 1));
    for (int l = 0; l <= L; ++l)
        for (int k = l * l; k < (l + 1) * (l + 1); ++k) d[k] = l;
    return d;
}

// Solid harmonics r^l P_l^m(cos theta) {cos, sin}(m azimuth) as polynomials.
void solid_harmonics(const Vec3& p, int L, double* R, double* dR) {
    const Dual x{p[0], {1, 0, 0}}, y{p[1], {0, 1, 0}}, z{p[2], {0, 0, 1}};
    const Dual r2 = x * x + y * y + z * z;
    Dual re{1, {0, 0, 0}}, im{0, {0, 0, 0}};  // (x + i y)^m
    double dfact = 1;                          // (2m - 1)!!
    std::vector<Dual> uc(L + 1), us(L + 1);
    for (int m = 0; m <= L; ++m) {
        if (m > 0) {
            const Dual nre = re * x - im * y;
            const Dual nim = re * y + im * x;
            re = nre;
            im = nim;
            dfact *= 2 * m - 1;
        }
        const double sgn = (m % 2 ? -1.0 : 1.0) * dfact;
        // uc[l], us[l] for l = m..L
        uc[m] = sgn * re;
        us[m] = sgn * im;
        if (m + 1 <= L) {
            uc[m + 1] = (2.0 * m + 1) * (z * uc[m]);
            us[m + 1] = (2.0 * m + 1) * (z * us[m]);
        }
        for (int l = m + 2; l <= L; ++l) {
            const double a = (2.0 * l - 1) / (l - m), b = (l + m - 1.0) / (l - m);
            uc[l] = a * (z * uc[l - 1]) - b * (r2 * uc[l - 2]);
            us[l] = a * (z * us[l - 1]) - b * (r2 * us[l - 2]);
        }
        for (int l = m; l <= L; ++l) {
            const int c = comp_c(l, m);
            R[c] = uc[l].v;
            if (dR)
                for (int q = 0; q < 3; ++q) dR[3 * c + q] = uc[l].d[q];
            if (m > 0) {
                const int s = comp_s(l, m);
                R[s] = us[l].v;
                if (dR)
                    for (int q = 0; q < 3; ++q) dR[3 * s + q] = us[l].d[q];
            }
        }
    }
}

double norm3(const Vec3& p) { return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]); }

void check_degree(int L) {
    if (L < 0 || L > kMaxDegree) throw std::invalid_argument("shell expansion degree out of range");
}

int group_of(const PointSet& p, std::size_t i) { return p.group.empty() ? static_cast<int>(i) : p.group[i]; }

// source indices per group id, for exclusion
struct GroupIndex {
    std::vector<std::pair<int, std::size_t>> entries;
    explicit GroupIndex(const PointSet& s) {
        entries.reserve(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) entries.emplace_back(group_of(s, i), i);
        std::sort(entries.begin(), entries.end());
    }
    template <class F>
    void for_group(int g, F&& f) const {
        auto it = std::lower_bound(entries.begin(), entries.end(), std::make_pair(g, std::size_t{0}));
        for (; it != entries.end() && it->first == g; ++it) f(it->second);
    }
};

}  // namespace

ShellExpansion::ShellExpansion(const PointSet& sources, int l_max) : l_max_(l_max) {
    check_degree(l_max);
    if (sources.mass.size() != sources.size()) throw std::invalid_argument("ShellExpansion: inconsistent sources");
    ncomp_ = (l_max + 1) * (l_max + 1);
    const std::size_t n = sources.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = norm3(sources.pos[i]);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r[a] < r[b]; });
    radius_.resize(n);
    std::vector<double> terms(n * ncomp_);
    const std::vector<int> deg = degrees(l_max);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
        const std::size_t i = order[k];
        radius_[k] = r[i];
        solid_harmonics(sources.pos[i], l_max, &terms[k * ncomp_], nullptr);
        for (int c = 0; c < ncomp_; ++c) terms[k * ncomp_ + c] *= sources.mass[i];
    }
    inner_.assign((n + 1) * ncomp_, 0.0);
    outer_.assign((n + 1) * ncomp_, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        for (int c = 0; c < ncomp_; ++c) inner_[(k + 1) * ncomp_ + c] = inner_[k * ncomp_ + c] + terms[k * ncomp_ + c];
    for (std::size_t k = n; k-- > 0;) {
        const double rk = std::max(radius_[k], 1e-300);
        for (int c = 0; c < ncomp_; ++c)
            outer_[k * ncomp_ + c] = outer_[(k + 1) * ncomp_ + c] + terms[k * ncomp_ + c] / std::pow(rk, 2 * deg[c] + 1);
    }
}

void ShellExpansion::eval(const Vec3& y, double* phi, Vec3* grad) const {
    double R[(kMaxDegree + 1) * (kMaxDegree + 1)], dR[3 * (kMaxDegree + 1) * (kMaxDegree + 1)];
    solid_harmonics(y, l_max_, R, grad ? dR : nullptr);
    static thread_local std::vector<double> nrm;
    static thread_local int nrm_L = -1;
    if (nrm_L != l_max_) {
        nrm = norms(l_max_);
        nrm_L = l_max_;
    }
    const double r = norm3(y);
    const std::size_t lo = std::lower_bound(radius_.begin(), radius_.end(), r) - radius_.begin();
    const std::size_t hi = std::upper_bound(radius_.begin(), radius_.end(), r) - radius_.begin();
    double v = 0;
    Vec3 g{0, 0, 0};
    for (int l = 0; l <= l_max_; ++l) {
        const double rin = r > 0 ? std::pow(r, -(2 * l + 1)) : 0.0;
        for (int c = l * l; c < (l + 1) * (l + 1); ++c) {
            const double A = 0.5 * (inner_[lo * ncomp_ + c] + inner_[hi * ncomp_ + c]);
            const double B = 0.5 * (outer_[lo * ncomp_ + c] + outer_[hi * ncomp_ + c]);
            const double w = nrm[c];
            v += w * R[c] * (A * rin + B);
            if (grad && r > 0) {
                const double radial = -(2.0 * l + 1) * R[c] * rin / (r * r);
                for (int q = 0; q < 3; ++q) g[q] += w * (A * (dR[3 * c + q] * rin + radial * y[q]) + B * dR[3 * c + q]);
            } else if (grad) {
                for (int q = 0; q < 3; ++q) g[q] += w * B * dR[3 * c + q];
            }
        }
    }
    const double k = -1.0 / (4.0 * kPi);
    if (phi) *phi = k * v;
    if (grad) *grad = {k * g[0], k * g[1], k * g[2]};
}

double ShellExpansion::kernel(const Vec3& x, const Vec3& y, int l_max, Vec3* grad_y) {
    check_degree(l_max);
    const int nc = (l_max + 1) * (l_max + 1);
    double Rx[(kMaxDegree + 1) * (kMaxDegree + 1)], Ry[(kMaxDegree + 1) * (kMaxDegree + 1)];
    double dRy[3 * (kMaxDegree + 1) * (kMaxDegree + 1)];
    solid_harmonics(x, l_max, Rx, nullptr);
    solid_harmonics(y, l_max, Ry, grad_y ? dRy : nullptr);
    const std::vector<double> nrm = norms(l_max);
    const double rx = norm3(x), ry = norm3(y);
    // weights of the "x inner" and "x outer" forms
    const double win = rx < ry ? 1.0 : (rx > ry ? 0.0 : 0.5);
    double v = 0;
    Vec3 g{0, 0, 0};
    for (int c = 0, l = 0; c < nc; ++c) {
        if (c >= (l + 1) * (l + 1)) ++l;
        const double ry_in = ry > 0 ? std::pow(ry, -(2 * l + 1)) : 0.0;
        const double rx_out = rx > 0 ? std::pow(rx, -(2 * l + 1)) : 0.0;
        const double w = nrm[c] * Rx[c];
        v += w * Ry[c] * (win * ry_in + (1 - win) * rx_out);
        if (grad_y) {
            const double radial = ry > 0 ? -(2.0 * l + 1) * Ry[c] * ry_in / (ry * ry) : 0.0;
            for (int q = 0; q < 3; ++q)
                g[q] += w * (win * (dRy[3 * c + q] * ry_in + radial * y[q]) + (1 - win) * rx_out * dRy[3 * c + q]);
        }
    }
    (void)nc;
    const double k = -1.0 / (4.0 * kPi);
    if (grad_y) *grad_y = {k * g[0], k * g[1], k * g[2]};
    return k * v;
}

int max_exact_degree(int n_theta, int n_phi) { return std::min(2 * n_theta - 1, n_phi - 1); }

namespace {

template <bool WantPhi, bool WantGrad>
void shell_eval(const PointSet& sources, const PointSet& targets, bool skip_group, int l_max,
                std::vector<double>* phi, std::vector<Vec3>* grad) {
    if (targets.mass.size() != targets.size()) throw std::invalid_argument("shell expansion: inconsistent targets");
    if (skip_group && sources.group.empty() && targets.group.empty() && sources.size() != targets.size())
        throw std::invalid_argument("shell expansion: exclusion without groups needs index-aligned sets");
    const ShellExpansion ex(sources, l_max);
    const GroupIndex gi(sources);
    if (WantPhi) phi->assign(targets.size(), 0.0);
    if (WantGrad) grad->assign(targets.size(), Vec3{0, 0, 0});
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(targets.size()); ++i) {
        double v = 0;
        Vec3 g{0, 0, 0};
        ex.eval(targets.pos[i], WantPhi ? &v : nullptr, WantGrad ? &g : nullptr);
        if (skip_group)
            gi.for_group(group_of(targets, static_cast<std::size_t>(i)), [&](std::size_t k) {
                Vec3 gk;
                const double vk = ShellExpansion::kernel(sources.pos[k], targets.pos[i], l_max, WantGrad ? &gk : nullptr);
                v -= sources.mass[k] * vk;
                if (WantGrad)
                    for (int q = 0; q < 3; ++q) g[q] -= sources.mass[k] * gk[q];
            });
        if (WantPhi) (*phi)[i] = v;
        if (WantGrad) (*grad)[i] = g;
    }
}

}  // namespace

std::vector<double> shell_potential_at(const PointSet& sources, const PointSet& targets, bool skip_group, int l_max) {
    std::vector<double> phi;
    shell_eval<true, false>(sources, targets, skip_group, l_max, &phi, nullptr);
    return phi;
}

std::vector<Vec3> shell_field_at(const PointSet& sources, const PointSet& targets, bool skip_group, int l_max) {
    std::vector<Vec3> g;
    shell_eval<false, true>(sources, targets, skip_group, l_max, nullptr, &g);
    return g;
}

double shell_interaction_energy(const PointSet& pts, int l_max) {
    const std::vector<double> phi = shell_potential_at(pts, pts, true, l_max);
    double e = 0;
    for (std::size_t i = 0; i < phi.size(); ++i) e += pts.mass[i] * phi[i];
    return 0.5 * e;
}

struct CloudPoisson::Tables {
    int l_max = 0, ncomp = 0;
    std::size_t n_shells = 0;
    std::vector<int> cell_shell;
    std::vector<Vec3> cell_pos;
    std::vector<double> cell_R, cell_dR;  // solid harmonics at the cells
    std::vector<double> norms;
    // per degree, row-major: target x source shell
    std::vector<std::vector<double>> cell_psi, cell_dpsi, grid_psi, grid_dpsi;
    std::vector<double> grid_r;
};

namespace {

void lagrange_basis(const std::vector<double>& nodes, double t, double* out) {
    const std::size_t n = nodes.size();
    for (std::size_t j = 0; j < n; ++j) {
        double p = 1;
        for (std::size_t i = 0; i < n; ++i)
            if (i != j) p *= (t - nodes[i]) / (nodes[j] - nodes[i]);
        out[j] = p;
    }
}

// Phi_l(a) / a^l against a unit shell at r, and its a-derivative
double reduced_kernel(int l, double a, double r, double* d_a) {
    if (r < a) {
        const double v = std::pow(r, l) / std::pow(a, 2 * l + 1);
        *d_a = -(2.0 * l + 1) * v / a;
        return v;
    }
    *d_a = 0;
    return std::pow(r, -(l + 1));
}

constexpr int kRadialQuad = 48;

// Rows of the reduced potential and its derivative at target radius a, for every
// degree; source shells numbered globally through `offset`.
void radial_rows(const std::vector<RadialSegment>& segs, const std::vector<std::size_t>& offset,
                 const std::vector<double>& shell_w, int L, double a, std::size_t n_shells, double* psi,
                 double* dpsi) {
    std::fill(psi, psi + (L + 1) * n_shells, 0.0);
    std::fill(dpsi, dpsi + (L + 1) * n_shells, 0.0);
    static const GaussRule unit = gauss_legendre(kRadialQuad, 0.0, 1.0);
    std::vector<double> lag;
    for (std::size_t s = 0; s < segs.size(); ++s) {
        const RadialSegment& seg = segs[s];
        lag.resize(seg.t.size());
        std::vector<double> cuts = {seg.t0};
        const double ta = seg.param(a);
        if (ta > seg.t0 && ta < seg.t1) cuts.push_back(ta);
        cuts.push_back(seg.t1);
        for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
            const double h = cuts[p + 1] - cuts[p];
            for (int q = 0; q < kRadialQuad; ++q) {
                const double t = cuts[p] + h * unit.nodes[q];
                const double wq = h * unit.weights[q];
                const double r = seg.radius(t);
                lagrange_basis(seg.t, t, lag.data());
                for (int l = 0; l <= L; ++l) {
                    double dk;
                    const double k = reduced_kernel(l, a, r, &dk);
                    for (std::size_t j = 0; j < seg.t.size(); ++j) {
                        const std::size_t col = l * n_shells + offset[s] + j;
                        psi[col] += wq * lag[j] * k;
                        dpsi[col] += wq * lag[j] * dk;
                    }
                }
            }
        }
    }
    for (int l = 0; l <= L; ++l)
        for (std::size_t j = 0; j < n_shells; ++j) {
            psi[l * n_shells + j] /= shell_w[j];
            dpsi[l * n_shells + j] /= shell_w[j];
        }
}

}  // namespace

CloudPoisson::CloudPoisson(const QuadratureCloud& cloud, int l_max, int grid_per_segment) {
    check_degree(l_max);
    if (cloud.segments.empty() || cloud.xcell_shell.size() != cloud.n_xcells())
        throw std::invalid_argument("CloudPoisson needs a spherical cloud");
    if (grid_per_segment < 2) throw std::invalid_argument("CloudPoisson: grid too coarse");
    auto t = std::make_shared<Tables>();
    t->l_max = l_max;
    t->ncomp = (l_max + 1) * (l_max + 1);
    t->norms = norms(l_max);
    const auto& segs = cloud.segments;
    std::vector<std::size_t> offset(segs.size() + 1, 0);
    for (std::size_t s = 0; s < segs.size(); ++s) offset[s + 1] = offset[s] + segs[s].t.size();
    const std::size_t ns = offset.back();
    t->n_shells = ns;
    // interpolation weights: integrals of the Lagrange basis
    std::vector<double> shell_w(ns, 0.0), shell_r(ns);
    {
        const GaussRule unit = gauss_legendre(kRadialQuad, 0.0, 1.0);
        for (std::size_t s = 0; s < segs.size(); ++s) {
            std::vector<double> lag(segs[s].t.size());
            const double h = segs[s].t1 - segs[s].t0;
            for (int q = 0; q < kRadialQuad; ++q) {
                lagrange_basis(segs[s].t, segs[s].t0 + h * unit.nodes[q], lag.data());
                for (std::size_t j = 0; j < lag.size(); ++j) shell_w[offset[s] + j] += h * unit.weights[q] * lag[j];
            }
            for (std::size_t j = 0; j < segs[s].t.size(); ++j) shell_r[offset[s] + j] = segs[s].radius(segs[s].t[j]);
        }
    }
    const std::size_t nc = cloud.n_xcells();
    t->cell_shell.resize(nc);
    t->cell_pos = cloud.xcell_pos;
    t->cell_R.resize(nc * t->ncomp);
    t->cell_dR.resize(3 * nc * t->ncomp);
    for (std::size_t c = 0; c < nc; ++c) {
        const auto& sh = cloud.xcell_shell[c];
        t->cell_shell[c] = static_cast<int>(offset[sh[0]] + sh[1]);
        solid_harmonics(cloud.xcell_pos[c], l_max, &t->cell_R[c * t->ncomp], &t->cell_dR[3 * c * t->ncomp]);
    }

    const int L = l_max;
    auto table = [&](const std::vector<double>& radii, std::vector<std::vector<double>>& psi,
                     std::vector<std::vector<double>>& dpsi) {
        const std::size_t n = radii.size();
        psi.assign(L + 1, std::vector<double>(n * ns));
        dpsi.assign(L + 1, std::vector<double>(n * ns));
#pragma omp parallel
        {
            std::vector<double> rp((L + 1) * ns), rd((L + 1) * ns);
#pragma omp for schedule(static)
            for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
                radial_rows(segs, offset, shell_w, L, radii[i], ns, rp.data(), rd.data());
                for (int l = 0; l <= L; ++l)
                    for (std::size_t j = 0; j < ns; ++j) {
                        psi[l][i * ns + j] = rp[l * ns + j];
                        dpsi[l][i * ns + j] = rd[l * ns + j];
                    }
            }
        }
    };
    table(shell_r, t->cell_psi, t->cell_dpsi);
    // symmetrize r_k^l psi[k][j], the discrete form of r_<^l / r_>^(l+1)
    for (int l = 0; l <= L; ++l) {
        std::vector<double>& P = t->cell_psi[l];
        for (std::size_t k = 0; k < ns; ++k)
            for (std::size_t j = k + 1; j < ns; ++j) {
                const double a = std::pow(shell_r[k], l) * P[k * ns + j];
                const double b = std::pow(shell_r[j], l) * P[j * ns + k];
                const double m = 0.5 * (a + b);
                P[k * ns + j] = m / std::pow(shell_r[k], l);
                P[j * ns + k] = m / std::pow(shell_r[j], l);
            }
    }
    for (const RadialSegment& seg : segs)
        for (int i = 0; i <= grid_per_segment; ++i)
            t->grid_r.push_back(seg.radius(seg.t0 + (seg.t1 - seg.t0) * i / grid_per_segment));
    std::sort(t->grid_r.begin(), t->grid_r.end());
    t->grid_r.erase(std::unique(t->grid_r.begin(), t->grid_r.end(),
                                [](double a, double b) { return std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(b)); }),
                    t->grid_r.end());
    table(t->grid_r, t->grid_psi, t->grid_dpsi);
    t_ = std::move(t);
}

int CloudPoisson::l_max() const { return t_->l_max; }

std::size_t CloudPoisson::n_cells() const { return t_->cell_pos.size(); }

CloudPotential CloudPoisson::solve(const std::vector<double>& charges, int l_max) const {
    const Tables& t = *t_;
    if (l_max < 0) l_max = t.l_max;
    if (l_max > t.l_max) throw std::invalid_argument("CloudPoisson: degree beyond the tables");
    const std::size_t nc = t.cell_pos.size(), ns = t.n_shells;
    if (charges.size() != nc) throw std::invalid_argument("CloudPoisson: one charge per spatial node expected");
    const int ncomp = (l_max + 1) * (l_max + 1);
    const int tc = t.ncomp;
    const std::vector<int> deg = degrees(l_max);

    // moments of unit-direction harmonics per shell
    std::vector<double> M(ns * ncomp, 0.0);
    for (std::size_t c = 0; c < nc; ++c) {
        const double r = norm3(t.cell_pos[c]);
        const std::size_t j = static_cast<std::size_t>(t.cell_shell[c]);
        for (int k = 0; k < ncomp; ++k) M[j * ncomp + k] += charges[c] * t.cell_R[c * tc + k] / std::pow(r, deg[k]);
    }
    auto apply = [&](const std::vector<std::vector<double>>& tab, std::size_t row, int k) {
        const std::vector<double>& P = tab[deg[k]];
        double v = 0;
        for (std::size_t j = 0; j < ns; ++j) v += P[row * ns + j] * M[j * ncomp + k];
        return v;
    };

    CloudPotential out;
    out.t_ = t_;
    out.l_max_ = l_max;
    out.charges_ = charges;
    out.phi_.assign(nc, 0.0);
    out.grad_.assign(nc, Vec3{0, 0, 0});
    const double kf = -1.0 / (4.0 * kPi);
    for (std::size_t c = 0; c < nc; ++c) {
        const std::size_t row = static_cast<std::size_t>(t.cell_shell[c]);
        const Vec3& x = t.cell_pos[c];
        const double r = norm3(x);
        double v = 0;
        Vec3 g{0, 0, 0};
        for (int k = 0; k < ncomp; ++k) {
            const double ps = apply(t.cell_psi, row, k), dp = apply(t.cell_dpsi, row, k);
            const double w = t.norms[k];
            const double R = t.cell_R[c * tc + k];
            v += w * R * ps;
            for (int q = 0; q < 3; ++q) g[q] += w * (t.cell_dR[3 * (c * tc + k) + q] * ps + R * dp * x[q] / r);
        }
        out.phi_[c] = kf * v;
        out.grad_[c] = {kf * g[0], kf * g[1], kf * g[2]};
    }
    const std::size_t ng = t.grid_r.size();
    out.psi_.assign(ng * ncomp, 0.0);
    out.dpsi_.assign(ng * ncomp, 0.0);
    for (std::size_t i = 0; i < ng; ++i)
        for (int k = 0; k < ncomp; ++k) {
            out.psi_[i * ncomp + k] = apply(t.grid_psi, i, k);
            out.dpsi_[i * ncomp + k] = apply(t.grid_dpsi, i, k);
        }
    return out;
}

double CloudPotential::energy() const {
    double e = 0;
    for (std::size_t c = 0; c < phi_.size(); ++c) e += charges_[c] * phi_[c];
    return 0.5 * e;
}

void CloudPotential::eval(const Vec3& y, double* phi, Vec3* grad) const {
    const int ncomp = (l_max_ + 1) * (l_max_ + 1);
    double R[(kMaxDegree + 1) * (kMaxDegree + 1)], dR[3 * (kMaxDegree + 1) * (kMaxDegree + 1)];
    solid_harmonics(y, l_max_, R, grad ? dR : nullptr);
    const std::vector<double>& gr = t_->grid_r;
    const double r = norm3(y);
    const std::size_t ng = gr.size();
    double ps[(kMaxDegree + 1) * (kMaxDegree + 1)], dp[(kMaxDegree + 1) * (kMaxDegree + 1)];
    if (r >= gr.back()) {
        // outside every source: Psi = C / r^(2l+1)
        const double rn = gr.back();
        for (int l = 0, k = 0; l <= l_max_; ++l)
            for (; k < (l + 1) * (l + 1); ++k) {
                ps[k] = psi_[(ng - 1) * ncomp + k] * std::pow(rn / r, 2 * l + 1);
                dp[k] = -(2.0 * l + 1) * ps[k] / r;
            }
    } else {
        const std::size_t i =
            std::min<std::size_t>(std::upper_bound(gr.begin(), gr.end(), r) - gr.begin(), ng - 1) - 1;
        const double h = gr[i + 1] - gr[i], s = (r - gr[i]) / h;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
        const double d00 = 6 * s * (s - 1) / h, d10 = (1 - s) * (1 - 3 * s) / h;
        const double d01 = -d00, d11 = s * (3 * s - 2) / h;
        for (int k = 0; k < ncomp; ++k) {
            const double p0 = psi_[i * ncomp + k], p1 = psi_[(i + 1) * ncomp + k];
            const double m0 = dpsi_[i * ncomp + k] * h, m1 = dpsi_[(i + 1) * ncomp + k] * h;
            ps[k] = h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1;
            dp[k] = d00 * p0 + d10 * m0 + d01 * p1 + d11 * m1;
        }
    }
    double v = 0;
    Vec3 g{0, 0, 0};
    for (int k = 0; k < ncomp; ++k) {
        const double w = t_->norms[k];
        v += w * R[k] * ps[k];
        if (grad)
            for (int q = 0; q < 3; ++q) g[q] += w * (dR[3 * k + q] * ps[k] + (r > 0 ? R[k] * dp[k] * y[q] / r : 0.0));
    }
    const double kf = -1.0 / (4.0 * kPi);
    if (phi) *phi = kf * v;
    if (grad) *grad = {kf * g[0], kf * g[1], kf * g[2]};
}

}  // namespace vplab
