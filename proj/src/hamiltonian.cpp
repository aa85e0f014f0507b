#include "vplab/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

namespace vplab {

double cutoff(double t) {
    if (t <= 0) return 1.0;
    if (t >= 1) return 0.0;
    const double t5 = t * t * t * t * t;
    return 1.0 - t5 * (126.0 + t * (-420.0 + t * (540.0 + t * (-315.0 + 70.0 * t))));
}

double cutoff_d1(double t) {
    if (t <= 0 || t >= 1) return 0.0;
    const double a = t * (1.0 - t);
    return -630.0 * a * a * a * a;
}

double cutoff_d2(double t) {
    if (t <= 0 || t >= 1) return 0.0;
    const double a = t * (1.0 - t);
    return -2520.0 * a * a * a * (1.0 - 2.0 * t);
}

namespace {

double phase_norm(const Phase& z) {
    double s = 0;
    for (double c : z) s += c * c;
    return std::sqrt(s);
}

// Largest |z| on { e <= level }.
double sublevel_radius(const SteadyState& st, double level) {
    if (level >= 0) return std::numeric_limits<double>::infinity();
    const double r_top = -st.mass() / (4.0 * kPi * level);
    double best = 0;
    const int n = 4000;
    for (int i = 0; i <= n; ++i) {
        const double r = r_top * i / n;
        const double v2 = 2.0 * (level - st.phi(r));
        if (v2 < 0) continue;
        best = std::max(best, r * r + v2);
    }
    return std::sqrt(best) * (1.0 + 1e-6) + 1e-12;
}

}  // namespace

HamiltonianField::HamiltonianField(std::shared_ptr<const SteadyState> state, BumpSpec bump, BoxSpec box)
    : state_(std::move(state)), bump_(bump), box_(box) {
    if (bump_.kind == BumpSpec::Kind::energy_shell) {
        if (!state_) throw std::invalid_argument("energy_shell bump needs a steady state");
        if (!(bump_.margin > 0 && bump_.margin < 1))
            throw std::invalid_argument("bump margin must lie in (0, 1)");
    }
    plateau_ = bump_.plateau;
    if (plateau_ <= 0) {
        if (!state_) throw std::invalid_argument("phase_ball bump without plateau needs a steady state");
        plateau_ = state_->rho_phase();
    }
    box_length_ = box_.length > 0 ? box_.length : 5.0 * (state_ ? state_->rho_phase() : plateau_);
    if (box_.grid < 4) throw std::invalid_argument("box grid must be >= 4");
}

Phase HamiltonianField::wavevector(const Atom& a) const {
    Phase k;
    for (int d = 0; d < 6; ++d) k[d] = 2.0 * kPi * a.m[d] / box_length_;
    return k;
}

bool HamiltonianField::is_zero() const {
    for (const Atom& a : atoms_)
        if (a.coeff != 0) return false;
    if (quadratic_ != 0) return false;
    if (translation_[0] != 0 || translation_[1] != 0 || translation_[2] != 0) return false;
    return !(energy_ && energy_->amplitude != 0);
}

bool HamiltonianField::trig_only() const {
    return quadratic_ == 0 && translation_[0] == 0 && translation_[1] == 0 && translation_[2] == 0 &&
           !(energy_ && energy_->amplitude != 0);
}

double HamiltonianField::energy_cut() const {
    double cut = -std::numeric_limits<double>::infinity();
    const bool has_bumped = !atoms_.empty() || quadratic_ != 0 || translation_ != Vec3{0, 0, 0};
    if (has_bumped) {
        if (bump_.kind != BumpSpec::Kind::energy_shell) return std::numeric_limits<double>::infinity();
        cut = state_->e0() * (1.0 - bump_.margin);
    }
    if (energy_ && energy_->amplitude != 0) cut = std::max(cut, state_->e0() * (1.0 - energy_->margin));
    return cut;
}

double HamiltonianField::support_radius() const {
    double r = 0;
    const bool has_bumped = !atoms_.empty() || quadratic_ != 0 || translation_ != Vec3{0, 0, 0};
    if (has_bumped) {
        switch (bump_.kind) {
            case BumpSpec::Kind::none: return std::numeric_limits<double>::infinity();
            case BumpSpec::Kind::phase_ball: r = 2.0 * plateau_; break;
            case BumpSpec::Kind::energy_shell:
                r = sublevel_radius(*state_, state_->e0() * (1.0 - bump_.margin));
                break;
        }
    }
    if (energy_ && energy_->amplitude != 0)
        r = std::max(r, sublevel_radius(*state_, state_->e0() * (1.0 - energy_->margin)));
    return r;
}

double HamiltonianField::bump(const Phase& z, Phase* grad, Mat6* hess) const {
    if (grad) grad->fill(0.0);
    if (hess) hess->setZero();
    switch (bump_.kind) {
        case BumpSpec::Kind::none: return 1.0;
        case BumpSpec::Kind::phase_ball: {
            const double s = phase_norm(z);
            const double t = (s - plateau_) / plateau_;
            if (t <= 0) return 1.0;
            if (t >= 1) return 0.0;
            const double c1 = cutoff_d1(t) / plateau_;
            if (grad)
                for (int i = 0; i < 6; ++i) (*grad)[i] = c1 * z[i] / s;
            if (hess) {
                const double c2 = cutoff_d2(t) / (plateau_ * plateau_);
                for (int i = 0; i < 6; ++i)
                    for (int j = 0; j < 6; ++j) {
                        const double uu = z[i] * z[j] / (s * s);
                        (*hess)(i, j) = c2 * uu + c1 / s * ((i == j ? 1.0 : 0.0) - uu);
                    }
            }
            return cutoff(t);
        }
        case BumpSpec::Kind::energy_shell: {
            const double e0 = state_->e0();
            const double w = bump_.margin * std::abs(e0);
            const double t = (state_->e(z) - e0) / w;
            if (t <= 0) return 1.0;
            if (t >= 1) return 0.0;
            if (grad || hess) {
                const Phase ge = state_->grad_e(z);
                const double c1 = cutoff_d1(t) / w;
                if (grad)
                    for (int i = 0; i < 6; ++i) (*grad)[i] = c1 * ge[i];
                if (hess) {
                    const double c2 = cutoff_d2(t) / (w * w);
                    *hess = c1 * state_->hess_e(z);
                    for (int i = 0; i < 6; ++i)
                        for (int j = 0; j < 6; ++j) (*hess)(i, j) += c2 * ge[i] * ge[j];
                }
            }
            return cutoff(t);
        }
    }
    return 1.0;
}

double HamiltonianField::eval(const Phase& z, Phase* grad, Mat6* hess) const {
    if (grad) grad->fill(0.0);
    if (hess) hess->setZero();
    double total = 0;

    const bool has_bumped = !atoms_.empty() || quadratic_ != 0 || translation_ != Vec3{0, 0, 0};
    if (has_bumped) {
        Phase gb;
        Mat6 hb;
        const double b = bump(z, grad ? &gb : nullptr, hess ? &hb : nullptr);
        if (b != 0.0) {
            // inner sum P with gradient and Hessian
            double p = 0;
            Phase gp{};
            Mat6 hp = Mat6::Zero();
            for (const Atom& a : atoms_) {
                const Phase k = wavevector(a);
                double arg = a.phase;
                for (int d = 0; d < 6; ++d) arg += k[d] * z[d];
                const double c = a.coeff * std::cos(arg), s = a.coeff * std::sin(arg);
                p += c;
                if (grad || hess)
                    for (int i = 0; i < 6; ++i) gp[i] -= s * k[i];
                if (hess)
                    for (int i = 0; i < 6; ++i)
                        for (int j = 0; j < 6; ++j) hp(i, j) -= c * k[i] * k[j];
            }
            if (quadratic_ != 0) {
                double r2 = 0;
                for (int i = 0; i < 6; ++i) {
                    r2 += z[i] * z[i];
                    gp[i] += quadratic_ * z[i];
                }
                p += 0.5 * quadratic_ * r2;
                if (hess)
                    for (int i = 0; i < 6; ++i) hp(i, i) += quadratic_;
            }
            for (int i = 0; i < 3; ++i) {
                p += translation_[i] * z[3 + i];
                gp[3 + i] += translation_[i];
            }
            total += b * p;
            if (grad)
                for (int i = 0; i < 6; ++i) (*grad)[i] += b * gp[i] + p * gb[i];
            if (hess)
                for (int i = 0; i < 6; ++i)
                    for (int j = 0; j < 6; ++j)
                        (*hess)(i, j) += b * hp(i, j) + p * hb(i, j) + gb[i] * gp[j] + gp[i] * gb[j];
        }
    }

    if (energy_ && energy_->amplitude != 0) {
        const double cut = state_->e0() * (1.0 - energy_->margin);
        const double d = cut - state_->e(z);
        if (d > 0) {
            const double a = energy_->amplitude;
            const double d2 = d * d;
            total += a * d2 * d2 * d;
            if (grad || hess) {
                const Phase ge = state_->grad_e(z);
                const double e1 = -5.0 * a * d2 * d2;
                if (grad)
                    for (int i = 0; i < 6; ++i) (*grad)[i] += e1 * ge[i];
                if (hess) {
                    const double e2 = 20.0 * a * d2 * d;
                    *hess += e1 * state_->hess_e(z);
                    for (int i = 0; i < 6; ++i)
                        for (int j = 0; j < 6; ++j) (*hess)(i, j) += e2 * ge[i] * ge[j];
                }
            }
        }
    }
    return total;
}

double HamiltonianField::value(const Phase& z) const { return eval(z, nullptr, nullptr); }

Phase HamiltonianField::gradient(const Phase& z) const {
    Phase g;
    eval(z, &g, nullptr);
    return g;
}

HamiltonianField HamiltonianField::scaled(double lambda) const {
    HamiltonianField h = *this;
    for (Atom& a : h.atoms_) a.coeff *= lambda;
    h.quadratic_ *= lambda;
    for (double& p : h.translation_) p *= lambda;
    if (h.energy_) h.energy_->amplitude *= lambda;
    h.origin.amplitude *= lambda;
    return h;
}

HamiltonianField HamiltonianField::plus(const HamiltonianField& o) const {
    if (bump_.kind != o.bump_.kind || bump_.margin != o.bump_.margin || plateau_ != o.plateau_ ||
        box_length_ != o.box_length_)
        throw std::invalid_argument("HamiltonianField::plus: bump and box must agree");
    HamiltonianField h = *this;
    h.atoms_.insert(h.atoms_.end(), o.atoms_.begin(), o.atoms_.end());
    h.quadratic_ += o.quadratic_;
    for (int i = 0; i < 3; ++i) h.translation_[i] += o.translation_[i];
    if (o.energy_) {
        if (!h.energy_) {
            h.energy_ = o.energy_;
        } else {
            if (h.energy_->margin != o.energy_->margin)
                throw std::invalid_argument("HamiltonianField::plus: energy profile margins differ");
            h.energy_->amplitude += o.energy_->amplitude;
        }
    }
    if (!h.state_) h.state_ = o.state_;
    return h;
}

HamiltonianField sample_hamiltonian(std::shared_ptr<const SteadyState> state, std::uint64_t seed,
                                    int n_modes, double max_wavenumber, double amplitude, BumpSpec bump,
                                    BoxSpec box) {
    if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
    if (!(max_wavenumber >= 1)) throw std::invalid_argument("max_wavenumber must be >= 1");
    HamiltonianField H(std::move(state), bump, box);

    // lattice vectors 0 < |m| <= max_wavenumber with canonical sign (first nonzero entry positive)
    std::vector<std::array<int, 6>> lattice;
    const int mmax = static_cast<int>(std::floor(max_wavenumber));
    const double lim2 = max_wavenumber * max_wavenumber + 1e-9;
    std::array<int, 6> m{};
    auto rec = [&](auto&& self, int d, int norm2) -> void {
        if (norm2 > lim2) return;
        if (d == 6) {
            if (norm2 == 0) return;
            for (int i = 0; i < 6; ++i) {
                if (m[i] > 0) break;
                if (m[i] < 0) return;
            }
            lattice.push_back(m);
            return;
        }
        for (int v = -mmax; v <= mmax; ++v) {
            m[d] = v;
            self(self, d + 1, norm2 + v * v);
        }
        m[d] = 0;
    };
    rec(rec, 0, 0);
    if (H.box().grid / 2 - 1 < mmax)
        throw std::invalid_argument("max_wavenumber exceeds the box grid resolution");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 2.0 * kPi);
    for (int i = 0; i < n_modes; ++i) {
        std::uniform_int_distribution<std::size_t> pick(0, lattice.size() - 1);
        Atom a;
        a.m = lattice[pick(rng)];
        a.coeff = amplitude * normal(rng);
        a.phase = uni(rng);
        H.add_atom(a);
    }
    H.origin = {seed, n_modes, max_wavenumber, amplitude};
    return H;
}

HamiltonianField invariant_hamiltonian(std::shared_ptr<const SteadyState> state, const EnergyProfile& chi) {
    if (!(chi.margin > 0 && chi.margin < 1)) throw std::invalid_argument("energy profile margin must lie in (0, 1)");
    HamiltonianField H(std::move(state), BumpSpec{});
    H.set_energy_profile(chi);
    return H;
}

double poisson_bracket(const Phase& gf, const Phase& gh) {
    double s = 0;
    for (int i = 0; i < 3; ++i) s += gf[i] * gh[3 + i] - gf[3 + i] * gh[i];
    return s;
}

double poisson_bracket(const HamiltonianField& H, const SteadyState& state, const Phase& z) {
    Phase gf;
    state.f_grad(z, gf);
    return poisson_bracket(gf, H.gradient(z));
}

QuadratureCloud support_rule(const HamiltonianField& H, const NormOptions& opt) {
    const double cut = H.energy_cut();
    if (std::isfinite(cut)) {
        const auto& st = H.state();
        CloudSpec cs = opt.support_cloud;
        cs.include_margin = true;
        cs.energy_margin = 1.0 - cut / st->e0();
        if (cs.energy_margin <= 0) {
            cs.include_margin = false;
            cs.energy_margin = opt.support_cloud.energy_margin;
        }
        return build_cloud(*st, cs);
    }
    const double r = H.support_radius();
    if (!std::isfinite(r)) throw std::invalid_argument("support_rule: field has unbounded support");
    return build_ball_rule(r, opt.ball_n_rad, opt.ball_n_alpha, opt.ball_n_theta, opt.ball_n_phi);
}

GradNorms grad_norms(const HamiltonianField& H, const NormOptions& opt) {
    return grad_norms(H, support_rule(H, opt), opt);
}

namespace {

double hess_opnorm(const Mat6& h) {
    Eigen::SelfAdjointEigenSolver<Mat6> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Coordinate-wise golden-section ascent of `fn` from z within a box of half width delta.
template <class Fn>
double refine_max(Fn fn, Phase z, double delta, int sweeps, int iters) {
    double best = fn(z);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int s = 0; s < sweeps; ++s) {
        for (int d = 0; d < 6; ++d) {
            double a = z[d] - delta, b = z[d] + delta;
            auto at = [&](double x) { Phase y = z; y[d] = x; return fn(y); };
            double c = b - g * (b - a), e = a + g * (b - a);
            double fc = at(c), fe = at(e);
            for (int it = 0; it < iters; ++it) {
                if (fc > fe) {
                    b = e; e = c; fe = fc;
                    c = b - g * (b - a); fc = at(c);
                } else {
                    a = c; c = e; fc = fe;
                    e = a + g * (b - a); fe = at(e);
                }
            }
            const double x = 0.5 * (a + b);
            const double fx = at(x);
            if (fx > best) { best = fx; z[d] = x; }
        }
    }
    return best;
}

}  // namespace

GradNorms grad_norms(const HamiltonianField& H, const QuadratureCloud& rule, const NormOptions& opt) {
    const std::size_t n = rule.size();
    std::vector<double> g(n), h(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        Phase gr;
        Mat6 hs;
        H.eval(rule.nodes[i], &gr, &hs);
        g[i] = phase_norm(gr);
        h[i] = hess_opnorm(hs);
    }
    GradNorms out;
    double l2 = 0;
    std::size_t ig = 0, ih = 0;
    for (std::size_t i = 0; i < n; ++i) {
        out.l1 += rule.weights[i] * g[i];
        l2 += rule.weights[i] * g[i] * g[i];
        if (g[i] > g[ig]) ig = i;
        if (h[i] > h[ih]) ih = i;
    }
    out.l2 = std::sqrt(l2);
    if (n == 0) return out;
    const double sampled_g = g[ig], sampled_h = h[ih];
    double delta = 0.05 * H.support_radius();
    if (!std::isfinite(delta)) delta = 0.05 * H.box_length();
    auto fg = [&](const Phase& z) { return phase_norm(H.gradient(z)); };
    auto fh = [&](const Phase& z) { Mat6 m; H.eval(z, nullptr, &m); return hess_opnorm(m); };
    out.linf = std::max(sampled_g, refine_max(fg, rule.nodes[ig], delta, opt.refine_sweeps, opt.golden_iters));
    out.hess_linf = std::max(sampled_h, refine_max(fh, rule.nodes[ih], delta, opt.refine_sweeps, opt.golden_iters));
    out.linf_refine_delta = out.linf - sampled_g;
    out.hess_refine_delta = out.hess_linf - sampled_h;
    return out;
}

namespace {

bool canonical(std::array<int, 6>& m) {
    for (int i = 0; i < 6; ++i) {
        if (m[i] > 0) return false;
        if (m[i] < 0) {
            for (int& c : m) c = -c;
            return true;
        }
    }
    return false;
}

}  // namespace

TrigSpectrum trig_spectrum(const HamiltonianField& H) {
    std::map<std::array<int, 6>, std::complex<double>> acc;
    for (const Atom& a : H.atoms()) {
        std::array<int, 6> m = a.m;
        const bool flipped = canonical(m);
        acc[m] += std::polar(a.coeff, flipped ? -a.phase : a.phase);
    }
    TrigSpectrum s;
    s.box_length = H.box_length();
    for (const auto& [m, c] : acc) {
        s.modes.push_back(m);
        s.amp.push_back(c);
    }
    return s;
}

double TrigSpectrum::norm(int order) const {
    const double L6 = std::pow(box_length, 6);
    double s = 0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        double k2 = 0;
        for (int d = 0; d < 6; ++d) {
            const double k = 2.0 * kPi * modes[i][d] / box_length;
            k2 += k * k;
        }
        const bool zero_mode = k2 == 0;
        const double w = zero_mode ? L6 * std::cos(std::arg(amp[i])) * std::cos(std::arg(amp[i])) : 0.5 * L6;
        s += std::pow(k2, order) * std::norm(amp[i]) * w;
    }
    return std::sqrt(s);
}

TrigSpectrum TrigSpectrum::derivative(int axis) const {
    if (axis < 0 || axis > 5) throw std::invalid_argument("derivative axis out of range");
    TrigSpectrum d;
    d.box_length = box_length;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes[i][axis] == 0) continue;
        const double k = 2.0 * kPi * modes[i][axis] / box_length;
        d.modes.push_back(modes[i]);
        d.amp.push_back(std::complex<double>(0, k) * amp[i]);
    }
    return d;
}

double spectral_norm(const HamiltonianField& H, int order) {
    if (!H.trig_only()) throw std::invalid_argument("spectral_norm: field has non-trigonometric components");
    if (order < 0 || order > H.box().max_order)
        throw std::invalid_argument("spectral_norm: order outside [0, max_order]");
    const int lim = H.box().grid / 2 - 1;
    for (const Atom& a : H.atoms())
        for (int c : a.m)
            if (std::abs(c) > lim) throw NumericalError("spectral_norm: mode aliases on the box grid");
    return trig_spectrum(H).norm(order);
}

double sobolev_norm(const HamiltonianField& H, int order) {
    double s = 0;
    for (int j = 0; j <= order; ++j) {
        const double v = spectral_norm(H, j);
        s += v * v;
    }
    return std::sqrt(s);
}

double box_quadrature_norm(const HamiltonianField& H, int order) {
    if (order != 0 && order != 1) throw std::invalid_argument("box_quadrature_norm: order must be 0 or 1");
    int mmax = 0;
    for (const Atom& a : H.atoms())
        for (int c : a.m) mmax = std::max(mmax, std::abs(c));
    const int n = 2 * mmax + 2;
    const double L = H.box_length(), h = L / n;
    std::vector<Phase> ks;
    for (const Atom& a : H.atoms()) ks.push_back(H.wavevector(a));
    const std::size_t total = static_cast<std::size_t>(std::pow(n, 6));
    std::vector<double> vals(total);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(total); ++idx) {
        Phase z;
        std::ptrdiff_t r = idx;
        for (int d = 0; d < 6; ++d) { z[d] = h * (r % n); r /= n; }
        double v = 0;
        Phase g{};
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const Atom& a = H.atoms()[i];
            double arg = a.phase;
            for (int d = 0; d < 6; ++d) arg += ks[i][d] * z[d];
            v += a.coeff * std::cos(arg);
            if (order == 1) {
                const double s = a.coeff * std::sin(arg);
                for (int d = 0; d < 6; ++d) g[d] -= s * ks[i][d];
            }
        }
        if (order == 0) {
            vals[idx] = v * v;
        } else {
            double s = 0;
            for (double c : g) s += c * c;
            vals[idx] = s;
        }
    }
    double s = 0;
    for (double v : vals) s += v;
    return std::sqrt(s * std::pow(h, 6));
}

AkCertificate ak_certificate(const HamiltonianField& H, const SteadyState& state, const QuadratureCloud& cloud,
                             double k, double near_inv_floor) {
    const double cut = H.energy_cut();
    if (!std::isfinite(cut) || cut > cloud.energy_cut * (1.0 - 1e-12) + 1e-15)
        throw std::invalid_argument("ak_certificate: cloud does not cover the support of H");
    const std::size_t n = cloud.size();
    std::vector<double> gh(n), br(n), gf(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        Phase grad_f;
        state.f_grad(cloud.nodes[i], grad_f);
        const Phase grad_h = H.gradient(cloud.nodes[i]);
        gh[i] = phase_norm(grad_h);
        gf[i] = phase_norm(grad_f);
        br[i] = std::abs(poisson_bracket(grad_f, grad_h));
    }
    AkCertificate c;
    double gf_max = 0;
    for (std::size_t i = 0; i < n; ++i) {
        c.l1_grad += cloud.weights[i] * gh[i];
        c.l1_bracket += cloud.weights[i] * br[i];
        gf_max = std::max(gf_max, gf[i]);
    }
    c.k_threshold = k;
    c.ratio = c.l1_bracket > 0 ? c.l1_grad / c.l1_bracket : std::numeric_limits<double>::infinity();
    c.member = c.l1_grad <= k * c.l1_bracket;
    c.near_invariant = c.l1_bracket <= near_inv_floor * gf_max * c.l1_grad;
    return c;
}

}  // namespace vplab
