#include "vplab/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace vplab {

namespace {

void check_levels(const std::vector<double>& levels) {
    if (levels.empty()) throw std::invalid_argument("empty level grid");
    for (std::size_t j = 0; j < levels.size(); ++j) {
        if (levels[j] < 0) throw std::invalid_argument("levels must be nonnegative");
        if (j > 0 && !(levels[j] > levels[j - 1])) throw std::invalid_argument("levels must increase");
    }
}

// lambda(s) for every level, from values sorted once
std::vector<double> measures(const std::vector<double>& values, const std::vector<double>& weights,
                             const std::vector<double>& levels) {
    if (values.size() != weights.size()) throw std::invalid_argument("distribution: size mismatch");
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<double> out(levels.size(), 0.0);
    // walk levels from the top down, accumulating nodes above each
    double acc = 0;
    std::size_t k = 0;
    for (std::size_t j = levels.size(); j-- > 0;) {
        while (k < order.size() && values[order[k]] > levels[j]) acc += weights[order[k++]];
        out[j] = acc;
    }
    return out;
}

double max_value(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

}  // namespace

std::vector<double> level_grid(double top, int n, double smallest_ratio) {
    if (!(top > 0) || n < 2 || !(smallest_ratio > 0 && smallest_ratio < 1))
        throw std::invalid_argument("level_grid: bad arguments");
    std::vector<double> l{0.0};
    for (int j = 0; j < n; ++j) l.push_back(top * std::pow(smallest_ratio, 1.0 - double(j) / (n - 1)));
    l.back() = top;
    return l;
}

double ball_volume_6d(double r) { return kPi * kPi * kPi / 6.0 * std::pow(r, 6); }

double ball_radius_6d(double volume) { return std::pow(6.0 * volume / (kPi * kPi * kPi), 1.0 / 6.0); }

DistributionProfile distribution(const std::vector<double>& values, const std::vector<double>& weights,
                                 const std::vector<double>& levels) {
    check_levels(levels);
    DistributionProfile p;
    p.levels = levels;
    p.measures = measures(values, weights, levels);
    for (double m : p.measures) p.radii.push_back(ball_radius_6d(m));
    return p;
}

DistributionProfile steady_distribution(const SteadyState& state, const std::vector<double>& levels) {
    check_levels(levels);
    DistributionProfile p;
    p.levels = levels;
    for (double s : levels) {
        // f > s  iff  e < e0 - (s / A)^(1/mu)
        const double cut = state.e0() - std::pow(s / state.amplitude(), 1.0 / state.mu());
        p.measures.push_back(state.energy_sublevel_volume(cut));
        p.radii.push_back(ball_radius_6d(p.measures.back()));
    }
    return p;
}

double rearranged_l1_distance(const std::vector<double>& a, const std::vector<double>& b,
                              const std::vector<double>& weights, const std::vector<double>& levels) {
    check_levels(levels);
    if (levels.front() != 0.0 || levels.back() < std::max(max_value(a), max_value(b)))
        throw std::invalid_argument("level grid does not cover [0, max]");
    const std::vector<double> la = measures(a, weights, levels), lb = measures(b, weights, levels);
    double s = 0;
    for (std::size_t j = 1; j < levels.size(); ++j)
        s += 0.5 * (levels[j] - levels[j - 1]) * (std::abs(la[j] - lb[j]) + std::abs(la[j - 1] - lb[j - 1]));
    return s;
}

double rearranged_l1_exact(const std::vector<double>& a, const std::vector<double>& b,
                           const std::vector<double>& weights) {
    if (a.size() != weights.size() || b.size() != weights.size())
        throw std::invalid_argument("rearranged_l1_exact: size mismatch");
    // signed jumps: lambda_a - lambda_b drops by w at a_i and rises by w at b_i
    std::vector<std::pair<double, double>> ev;
    ev.reserve(2 * a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > 0) ev.emplace_back(a[i], weights[i]);
        if (b[i] > 0) ev.emplace_back(b[i], -weights[i]);
    }
    std::sort(ev.begin(), ev.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    double diff = 0, s = 0;
    for (std::size_t k = 0; k < ev.size(); ++k) {
        diff += ev[k].second;
        const double lower = k + 1 < ev.size() ? ev[k + 1].first : 0.0;
        s += std::abs(diff) * (ev[k].first - lower);
    }
    return s;
}

double equimeasurability_defect(const std::vector<double>& a, const std::vector<double>& b,
                                const std::vector<double>& weights, const std::vector<double>& levels) {
    check_levels(levels);
    const std::vector<double> la = measures(a, weights, levels), lb = measures(b, weights, levels);
    double d = 0;
    for (std::size_t j = 0; j < levels.size(); ++j) d = std::max(d, std::abs(la[j] - lb[j]));
    return d;
}

RearrangementFloor rearrangement_floor(const SteadyState& state, const QuadratureCloud& cloud,
                                       const std::vector<double>& levels) {
    const DistributionProfile c = distribution(cloud.fbar, cloud.weights, levels);
    const DistributionProfile e = steady_distribution(state, levels);
    RearrangementFloor f;
    for (std::size_t j = 0; j < levels.size(); ++j) {
        const double d = std::abs(c.measures[j] - e.measures[j]);
        f.defect = std::max(f.defect, d);
        if (j > 0) {
            const double dp = std::abs(c.measures[j - 1] - e.measures[j - 1]);
            f.l1 += 0.5 * (levels[j] - levels[j - 1]) * (d + dp);
        }
    }
    return f;
}

void write_profile(const std::string& path, const DistributionProfile& p) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# level measure\n";
    for (std::size_t j = 0; j < p.levels.size(); ++j) out << fmt::format("{:.17g} {:.17g}\n", p.levels[j], p.measures[j]);
}

}  // namespace vplab
