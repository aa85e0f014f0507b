#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vplab/rearrangement.hpp"

using namespace vplab;

namespace {

const SteadyState& steady() {
    static const SteadyState st = build_polytrope({});
    return st;
}

// |{e < level}| = int 4 pi r^2 (4 pi / 3) (2 (level - phi))^(3/2) dr
double sublevel_oracle(const SteadyState& st, double level) {
    auto g = [&](double r) {
        const double k = level - st.phi(r);
        return k > 0 ? 4 * kPi * r * r * 4 * kPi / 3 * std::pow(2 * k, 1.5) : 0.0;
    };
    // the sublevel set ends where phi(r) = level, inside the support
    double lo = 0, hi = st.r_support();
    if (level >= st.e0()) hi = -1 / (4 * kPi * level) * st.mass();
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (lo + hi);
        (st.phi(m) < level ? lo : hi) = m;
    }
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0, lo, 15, 1e-13);
}

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n) {
    std::exponential_distribution<double> e(2.0);
    std::vector<double> v(n);
    for (double& x : v) x = e(rng);
    return v;
}

}  // namespace

TEST_CASE("6D ball volume") {
    CHECK(ball_volume_6d(1.0) == doctest::Approx(std::pow(kPi, 3) / 6));
    CHECK(ball_volume_6d(2.0) == doctest::Approx(64 * std::pow(kPi, 3) / 6));
    CHECK(ball_radius_6d(ball_volume_6d(0.37)) == doctest::Approx(0.37).epsilon(1e-14));
}

TEST_CASE("level grid layout") {
    const std::vector<double> g = level_grid(2.0, 50);
    CHECK(g.size() == 51);
    CHECK(g.front() == 0.0);
    CHECK(g[1] == doctest::Approx(2e-6));
    CHECK(g.back() == 2.0);
    CHECK(std::is_sorted(g.begin(), g.end()));
}

TEST_CASE("distribution of a two-point function") {
    const std::vector<double> a{1, 2}, b{2, 2}, w{1, 1};
    const DistributionProfile p = distribution(a, w, {0, 0.5, 1.0, 1.5, 2.0});
    CHECK(p.measures == std::vector<double>{2, 2, 1, 1, 0});
    CHECK(p.radii[0] == doctest::Approx(ball_radius_6d(2.0)));
    // lambda_a = 2 on [0, 1), 1 on [1, 2); lambda_b = 2 on [0, 2)
    CHECK(rearranged_l1_exact(a, b, w) == doctest::Approx(1.0));
    CHECK(equimeasurability_defect(a, b, w, {0, 0.5, 1.0, 1.5, 2.0}) == 1.0);
}

TEST_CASE("layer cake and rearrangement properties") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 300;
        const std::vector<double> a = random_values(rng, n), b = random_values(rng, n);
        std::vector<double> w = random_values(rng, n);
        const std::vector<double> zero(n, 0.0);
        double mass = 0, l1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            mass += w[i] * a[i];
            l1 += w[i] * std::abs(a[i] - b[i]);
        }
        // int lambda = int f
        CHECK(rearranged_l1_exact(a, zero, w) == doctest::Approx(mass).epsilon(1e-12));
        // rearrangement is a contraction in L1
        CHECK(rearranged_l1_exact(a, b, w) <= l1 * (1 + 1e-12));
        // equal weights: a permutation is equimeasurable
        std::vector<double> u(n, 0.5), p = a;
        std::shuffle(p.begin(), p.end(), rng);
        const double top = *std::max_element(a.begin(), a.end());
        const std::vector<double> levels = level_grid(top * (1 + 1e-12), 100);
        CHECK(equimeasurability_defect(a, p, u, levels) == 0.0);
        CHECK(std::abs(rearranged_l1_exact(a, p, u)) <= 1e-12);
        CHECK(rearranged_l1_distance(a, p, u, levels) == 0.0);
    }
}

TEST_CASE("grid integral converges to the exact one") {
    std::mt19937_64 rng(4);
    const std::vector<double> a = random_values(rng, 2000), w(2000, 1e-3);
    std::vector<double> b = a;
    for (double& x : b) x *= 1.05;
    const double top = *std::max_element(b.begin(), b.end()) * (1 + 1e-12);
    const double exact = rearranged_l1_exact(a, b, w);
    double prev = INFINITY;
    for (int n : {50, 400, 3200}) {
        std::vector<double> levels{0};
        for (int i = 1; i <= n; ++i) levels.push_back(top * i / n);
        const double err = std::abs(rearranged_l1_distance(a, b, w, levels) - exact);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 2e-3 * exact);
    CHECK_THROWS(rearranged_l1_distance(a, b, w, {0.0, 1.0}));
}

TEST_CASE("steady distribution against a radial oracle") {
    const SteadyState& st = steady();
    const std::vector<double> levels = level_grid(st.F(st.phi(0)), 30);
    const DistributionProfile p = steady_distribution(st, levels);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const double cut = st.e0() - std::pow(levels[i] / st.amplitude(), 1 / st.mu());
        CHECK(p.measures[i] == doctest::Approx(sublevel_oracle(st, cut)).epsilon(1e-6).scale(1e-12));
    }
    CHECK(std::abs(p.measures.back()) <= 1e-10);
}

TEST_CASE("cloud floor against the oracle distribution") {
    const SteadyState& st = steady();
    const QuadratureCloud cloud = build_cloud(st, {});
    const std::vector<double> levels = level_grid(st.F(st.phi(0)) * (1 + 1e-6), 200);
    const RearrangementFloor fl = rearrangement_floor(st, cloud, levels);
    const DistributionProfile c = distribution(cloud.fbar, cloud.weights, levels);
    double sup = 0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const double cut = st.e0() - std::pow(levels[i] / st.amplitude(), 1 / st.mu());
        sup = std::max(sup, std::abs(c.measures[i] - sublevel_oracle(st, cut)));
    }
    CHECK(fl.defect == doctest::Approx(sup).epsilon(1e-5));
    CHECK(fl.defect > 0);
    CHECK(fl.l1 > 0);
    // the cloud's own function is equimeasurable with itself
    CHECK(equimeasurability_defect(cloud.fbar, cloud.fbar, cloud.weights, levels) == 0.0);
}

TEST_CASE("profile files") {
    const auto path = (std::filesystem::temp_directory_path() / "vplab_profile.dat").string();
    write_profile(path, distribution({1, 2}, {1, 1}, {0, 1.5}));
    std::ifstream in(path);
    std::string header, l1, l2;
    std::getline(in, header);
    std::getline(in, l1);
    std::getline(in, l2);
    CHECK(header == "# level measure");
    CHECK(l1 == "0 2");
    CHECK(l2 == "1.5 1");
    std::filesystem::remove(path);
}

TEST_CASE("doubling the level grid stays within the quadrature error") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const std::vector<double> a = random_values(rng, 500), b = random_values(rng, 500);
        const std::vector<double> w(500, 2e-3);
        const double top = std::max(*std::max_element(a.begin(), a.end()), *std::max_element(b.begin(), b.end()));
        const double exact = rearranged_l1_exact(a, b, w);
        std::vector<double> coarse{0}, fine{0};
        for (int i = 1; i <= 64; ++i) coarse.push_back(top * (1 + 1e-12) * i / 64);
        for (int i = 1; i <= 128; ++i) fine.push_back(top * (1 + 1e-12) * i / 128);
        const double dc = rearranged_l1_distance(a, b, w, coarse), df = rearranged_l1_distance(a, b, w, fine);
        CHECK(df <= dc + std::abs(dc - exact) + 1e-14);
    }
}
