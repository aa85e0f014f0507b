#include "vplab/transport.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace vplab {

void FlowOptions::validate() const {
    if (!(tol > 0)) throw std::invalid_argument("flow tolerance must be > 0");
    if (!(h_init > 0 && h_init <= 1)) throw std::invalid_argument("flow h_init must lie in (0, 1]");
    if (!(h_min > 0)) throw std::invalid_argument("flow h_min must be > 0");
    if (max_steps < 1) throw std::invalid_argument("flow max_steps must be >= 1");
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

template <int N>
using Vec = std::array<double, N>;

// Adaptive integration of y' = rhs(y) over [0, s]; FSAL.
template <int N, class Rhs>
Vec<N> dopri5(Rhs rhs, Vec<N> y, double s, const FlowOptions& opt, FlowStats* stats) {
    if (s == 0) return y;
    const double dir = s > 0 ? 1.0 : -1.0;
    const double span = std::abs(s);
    double t = 0;
    double h = std::min(opt.h_init, 1.0) * span;
    const double hmin = opt.h_min * span;
    Vec<N> k1 = rhs(y), k2, k3, k4, k5, k6, k7, tmp, ynew;
    long steps = 0, rejected = 0;
    while (t < span) {
        if (++steps > opt.max_steps) throw NumericalError("flow: step limit exceeded");
        bool last = false;
        if (t + h >= span) { h = span - t; last = true; }
        const double hs = dir * h;
        for (int i = 0; i < N; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
        k2 = rhs(tmp);
        for (int i = 0; i < N; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        k3 = rhs(tmp);
        for (int i = 0; i < N; ++i) tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = rhs(tmp);
        for (int i = 0; i < N; ++i) tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = rhs(tmp);
        for (int i = 0; i < N; ++i)
            tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = rhs(tmp);
        for (int i = 0; i < N; ++i)
            ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = rhs(ynew);
        double err = 0;
        for (int i = 0; i < N; ++i) {
            const double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = opt.tol * (1.0 + std::max(std::abs(y[i]), std::abs(ynew[i])));
            err = std::max(err, std::abs(ei) / sc);
        }
        if (!std::isfinite(err)) throw NumericalError("flow: non-finite state");
        // error per unit step: the local errors over [0, s] sum to at most tol
        err /= h / span;
        if (err <= 1.0) {
            t = last ? span : t + h;
            y = ynew;
            k1 = k7;
        } else {
            ++rejected;
        }
        const double fac = err == 0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.25), 0.2, 5.0);
        h *= err <= 1.0 ? fac : std::min(fac, 1.0);
        if (t < span && h < hmin) throw NumericalError("flow: step size underflow");
    }
    if (stats) {
        stats->accepted += steps - rejected;
        stats->rejected += rejected;
    }
    return y;
}

Phase hamilton_rhs(const HamiltonianField& H, const Phase& z) {
    const Phase g = H.gradient(z);
    return {g[3], g[4], g[5], -g[0], -g[1], -g[2]};
}

bool gradient_vanishes(const HamiltonianField& H, const Phase& z) {
    const Phase g = H.gradient(z);
    for (double c : g)
        if (c != 0) return false;
    return true;
}

}  // namespace

Phase flow(const HamiltonianField& H, const Phase& z0, double s, const FlowOptions& opt, FlowStats* stats) {
    opt.validate();
    // an equilibrium (in particular any point off supp H) stays put exactly
    if (s == 0 || H.is_zero() || gradient_vanishes(H, z0)) return z0;
    return dopri5<6>([&](const Phase& z) { return hamilton_rhs(H, z); }, z0, s, opt, stats);
}

FlowJacobian flow_jacobian(const HamiltonianField& H, const Phase& z0, double s, const FlowOptions& opt,
                           FlowStats* stats) {
    opt.validate();
    FlowJacobian out;
    out.end = z0;
    if (s == 0 || H.is_zero()) return out;
    Vec<42> y{};
    for (int i = 0; i < 6; ++i) {
        y[i] = z0[i];
        y[6 + i * 6 + i] = 1.0;  // Y stored row-major after the point
    }
    auto rhs = [&](const Vec<42>& w) {
        Phase z;
        std::copy_n(w.begin(), 6, z.begin());
        Phase g;
        Mat6 hs;
        H.eval(z, &g, &hs);
        Vec<42> d;
        d[0] = g[3]; d[1] = g[4]; d[2] = g[5];
        d[3] = -g[0]; d[4] = -g[1]; d[5] = -g[2];
        Eigen::Map<const Eigen::Matrix<double, 6, 6, Eigen::RowMajor>> Y(w.data() + 6);
        Mat6 JH;
        JH.topRows<3>() = hs.bottomRows<3>();
        JH.bottomRows<3>() = -hs.topRows<3>();
        Eigen::Map<Eigen::Matrix<double, 6, 6, Eigen::RowMajor>> dY(d.data() + 6);
        dY = JH * Y;
        return d;
    };
    y = dopri5<42>(rhs, y, s, opt, stats);
    std::copy_n(y.begin(), 6, out.end.begin());
    out.jac = Eigen::Map<const Eigen::Matrix<double, 6, 6, Eigen::RowMajor>>(y.data() + 6);
    return out;
}

double reversibility_error(const HamiltonianField& H, const Phase& z0, double s, const FlowOptions& opt) {
    const Phase back = flow(H, flow(H, z0, s, opt), -s, opt);
    double e = 0;
    for (int i = 0; i < 6; ++i) e += (back[i] - z0[i]) * (back[i] - z0[i]);
    return std::sqrt(e);
}

PerturbedState::PerturbedState(std::shared_ptr<const SteadyState> base, HamiltonianField field, double time,
                               FlowOptions opt)
    : base_(std::move(base)), field_(std::move(field)), time_(time), opt_(opt) {
    if (!base_) throw std::invalid_argument("PerturbedState needs a base state");
    opt_.validate();
}

Phase PerturbedState::backward(const Phase& z) const { return flow(field_, z, -time_, opt_); }
Phase PerturbedState::forward(const Phase& z) const { return flow(field_, z, time_, opt_); }

double PerturbedState::eval(const Phase& z) const {
    if (time_ == 0) return base_->f(z);
    return base_->f(backward(z));
}

double pushforward_eval(const PerturbedState& p, const Phase& z) { return p.eval(z); }

namespace {

template <bool Parallel>
Pushforward pushforward_impl(const PerturbedState& p, const QuadratureCloud& cloud, bool backward_values) {
    const std::size_t n = cloud.size();
    Pushforward out;
    out.images.resize(n);
    out.values.resize(n);
    out.masses.resize(n);
    std::vector<long> steps(n, 0);
    const HamiltonianField& H = p.field();
    const double s = p.time();
    const FlowOptions& opt = p.options();
#pragma omp parallel for schedule(dynamic, 64) if (Parallel)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        FlowStats st;
        out.images[i] = flow(H, cloud.nodes[i], s, opt, &st);
        if (backward_values)
            out.values[i] = s == 0 ? cloud.fbar[i] : p.base().f(flow(H, cloud.nodes[i], -s, opt, &st));
        out.masses[i] = cloud.weights[i] * cloud.fbar[i];
        steps[i] = st.accepted;
    }
    for (long k : steps) out.steps += k;
    return out;
}

template <bool Parallel>
std::vector<Phase> images_impl(const HamiltonianField& H, double s, const std::vector<Phase>& nodes,
                               const FlowOptions& opt) {
    std::vector<Phase> out(nodes.size());
#pragma omp parallel for schedule(dynamic, 64) if (Parallel)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nodes.size()); ++i)
        out[i] = flow(H, nodes[i], s, opt);
    return out;
}

}  // namespace

Pushforward pushforward_cloud(const PerturbedState& p, const QuadratureCloud& cloud, bool backward_values) {
    return pushforward_impl<true>(p, cloud, backward_values);
}

Pushforward pushforward_cloud_serial(const PerturbedState& p, const QuadratureCloud& cloud, bool backward_values) {
    return pushforward_impl<false>(p, cloud, backward_values);
}

std::vector<Phase> forward_images(const HamiltonianField& H, double s, const std::vector<Phase>& nodes,
                                  const FlowOptions& opt) {
    return images_impl<true>(H, s, nodes, opt);
}

std::vector<Phase> forward_images_serial(const HamiltonianField& H, double s, const std::vector<Phase>& nodes,
                                         const FlowOptions& opt) {
    return images_impl<false>(H, s, nodes, opt);
}

namespace {

constexpr char kDumpMagic[8] = {'V', 'P', 'L', 'F', 'W', 'D', '0', '1'};
static_assert(std::endian::native == std::endian::little, "forward dumps assume a little-endian host");

}  // namespace

void write_forward_dump(const std::string& path, const Pushforward& pf) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    const std::uint64_t n = pf.images.size();
    os.write(kDumpMagic, 8);
    os.write(reinterpret_cast<const char*>(&n), 8);
    std::vector<double> col(n);
    for (int d = 0; d < 6; ++d) {
        for (std::size_t i = 0; i < n; ++i) col[i] = pf.images[i][d];
        os.write(reinterpret_cast<const char*>(col.data()), static_cast<std::streamsize>(8 * n));
    }
    col.assign(pf.masses.begin(), pf.masses.end());
    col.resize(n, 0.0);
    os.write(reinterpret_cast<const char*>(col.data()), static_cast<std::streamsize>(8 * n));
    col.assign(pf.values.begin(), pf.values.end());
    col.resize(n, 0.0);
    os.write(reinterpret_cast<const char*>(col.data()), static_cast<std::streamsize>(8 * n));
    if (!os) throw std::runtime_error("write failed: " + path);
}

Pushforward read_forward_dump(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    char magic[8];
    std::uint64_t n = 0;
    is.read(magic, 8);
    is.read(reinterpret_cast<char*>(&n), 8);
    if (!is || std::memcmp(magic, kDumpMagic, 8) != 0) throw std::runtime_error("not a forward dump: " + path);
    Pushforward pf;
    pf.images.resize(n);
    std::vector<double> col(n);
    auto read_col = [&] {
        is.read(reinterpret_cast<char*>(col.data()), static_cast<std::streamsize>(8 * n));
        if (!is) throw std::runtime_error("truncated forward dump: " + path);
    };
    for (int d = 0; d < 6; ++d) {
        read_col();
        for (std::size_t i = 0; i < n; ++i) pf.images[i][d] = col[i];
    }
    read_col();
    pf.masses = col;
    read_col();
    pf.values = col;
    return pf;
}

}  // namespace vplab
