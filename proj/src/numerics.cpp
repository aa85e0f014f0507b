#include "vplab/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace vplab {

GaussRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = 0.0;
        for (int j = 1; j <= n; ++j) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

GaussRule gauss_legendre(int n, double a, double b) {
    GaussRule rule = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = c + h * rule.nodes[i];
        rule.weights[i] *= h;
    }
    return rule;
}

HermiteTable::HermiteTable(std::vector<double> x, std::vector<double> y, std::vector<double> dy,
                           bool limit_monotone)
    : x_(std::move(x)), y_(std::move(y)), dy_(std::move(dy)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n || dy_.size() != n)
        throw std::invalid_argument("HermiteTable: need >= 2 consistent nodes");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("HermiteTable: grid not increasing");
    if (limit_monotone) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double delta = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
            if (delta == 0.0) {
                dy_[i] = dy_[i + 1] = 0.0;
                continue;
            }
            double a = dy_[i] / delta, b = dy_[i + 1] / delta;
            if (a < 0.0) { dy_[i] = 0.0; a = 0.0; }
            if (b < 0.0) { dy_[i + 1] = 0.0; b = 0.0; }
            const double s = a * a + b * b;
            if (s > 9.0) {
                const double t = 3.0 / std::sqrt(s);
                dy_[i] = t * a * delta;
                dy_[i + 1] = t * b * delta;
            }
        }
    }
    check_grid();
}

HermiteTable::HermiteTable(std::vector<double> x, std::vector<double> y, std::vector<double> dy,
                           std::vector<double> d2y)
    : x_(std::move(x)), y_(std::move(y)), dy_(std::move(dy)), d2y_(std::move(d2y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n || dy_.size() != n || d2y_.size() != n)
        throw std::invalid_argument("HermiteTable: need >= 2 consistent nodes");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("HermiteTable: grid not increasing");
    check_grid();
}

void HermiteTable::check_grid() {
    const std::size_t n = x_.size();
    const double h0 = x_[1] - x_[0];
    bool uniform = n > 2;
    for (std::size_t i = 1; i + 2 < n && uniform; ++i)
        if (std::abs((x_[i + 1] - x_[i]) - h0) > 1e-9 * h0) uniform = false;
    if (uniform) {
        // last cell may be shorter; the lookup clamps into it
        for (std::size_t i = 0; i + 2 < n; ++i)
            if (std::abs(x_[i] - (x_[0] + i * h0)) > 1e-9 * h0 * (i + 1)) uniform = false;
    }
    uniform_h_ = uniform ? h0 : 0.0;
}

std::size_t HermiteTable::locate(double x) const {
    const std::size_t last = x_.size() - 2;
    if (x <= x_.front()) return 0;
    if (x >= x_.back()) return last;
    if (uniform_h_ > 0.0) {
        auto i = static_cast<std::size_t>((x - x_.front()) / uniform_h_);
        if (i > last) i = last;
        while (i > 0 && x < x_[i]) --i;
        while (i < last && x >= x_[i + 1]) ++i;
        return i;
    }
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(i, last);
}

void HermiteTable::eval(double x, double& y, double& dy) const {
    if (quintic()) {
        double d2;
        eval(x, y, dy, d2);
        return;
    }
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    y = h00 * y_[i] + h10 * h * dy_[i] + h01 * y_[i + 1] + h11 * h * dy_[i + 1];
    const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1;
    const double d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
    dy = (d00 * y_[i] + d01 * y_[i + 1]) / h + d10 * dy_[i] + d11 * dy_[i + 1];
}

void HermiteTable::eval(double x, double& y, double& dy, double& d2y) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    if (!quintic()) {
        eval(x, y, dy);
        const double d00 = 12 * t - 6, d10 = 6 * t - 4, d11 = 6 * t - 2;
        d2y = (d00 * (y_[i] - y_[i + 1]) / h + d10 * dy_[i] + d11 * dy_[i + 1]) / h;
        return;
    }
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double p0 = y_[i], p1 = y_[i + 1];
    const double m0 = h * dy_[i], m1 = h * dy_[i + 1];
    const double c0 = h * h * d2y_[i], c1 = h * h * d2y_[i + 1];
    // quintic Hermite basis and its first two derivatives in t
    const double b0 = 1 - 10 * t3 + 15 * t4 - 6 * t5, b5 = 1 - b0;
    const double b1 = t - 6 * t3 + 8 * t4 - 3 * t5;
    const double b2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    const double b3 = 0.5 * (t3 - 2 * t4 + t5);
    const double b4 = -4 * t3 + 7 * t4 - 3 * t5;
    const double g0 = -30 * t2 + 60 * t3 - 30 * t4;
    const double g1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
    const double g2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4);
    const double g3 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
    const double g4 = -12 * t2 + 28 * t3 - 15 * t4;
    const double k0 = -60 * t + 180 * t2 - 120 * t3;
    const double k1 = -36 * t + 96 * t2 - 60 * t3;
    const double k2 = 0.5 * (2 - 18 * t + 36 * t2 - 20 * t3);
    const double k3 = 0.5 * (6 * t - 24 * t2 + 20 * t3);
    const double k4 = -24 * t + 84 * t2 - 60 * t3;
    y = b0 * p0 + b5 * p1 + b1 * m0 + b4 * m1 + b2 * c0 + b3 * c1;
    dy = (g0 * (p0 - p1) + g1 * m0 + g4 * m1 + g2 * c0 + g3 * c1) / h;
    d2y = (k0 * (p0 - p1) + k1 * m0 + k4 * m1 + k2 * c0 + k3 * c1) / (h * h);
}

double HermiteTable::value(double x) const {
    double y, dy;
    eval(x, y, dy);
    return y;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_loglog_slope: need >= 2 paired samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(std::abs(x[i])), ly = std::log(std::abs(y[i]));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace vplab
