#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss.hpp>

#include "vplab/numerics.hpp"

using namespace vplab;

TEST_CASE("gauss-legendre matches a reference rule") {
    const GaussRule g = gauss_legendre(7);
    boost::math::quadrature::gauss<double, 7> ref;
    // the reference stores the nonnegative half, our nodes ascend
    for (int i = 0; i < 7; ++i) {
        const int j = std::abs(i - 3);
        CHECK(std::abs(g.nodes[i]) == doctest::Approx(ref.abscissa()[j]).epsilon(1e-14));
        CHECK(g.weights[i] == doctest::Approx(ref.weights()[j]).epsilon(1e-14));
    }
}

TEST_CASE("gauss-legendre is exact to degree 2n - 1") {
    for (int n : {1, 3, 8, 20}) {
        const GaussRule g = gauss_legendre(n, 0.5, 2.0);
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double s = 0;
            for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], p);
            const double exact = (std::pow(2.0, p + 1) - std::pow(0.5, p + 1)) / (p + 1);
            CHECK(s == doctest::Approx(exact).epsilon(1e-13));
        }
    }
}

TEST_CASE("hermite tables reproduce polynomials of their degree") {
    std::vector<double> x{0, 0.3, 0.7, 1.2, 2.0};
    auto cubic = [](double t) { return 1 - 2 * t + 0.5 * t * t * t; };
    auto dcubic = [](double t) { return -2 + 1.5 * t * t; };
    auto quint = [](double t) { return 0.2 * std::pow(t, 5) - t * t + 3; };
    auto dquint = [](double t) { return std::pow(t, 4) - 2 * t; };
    auto d2quint = [](double t) { return 4 * std::pow(t, 3) - 2; };
    std::vector<double> y, dy, qy, qdy, qd2y;
    for (double t : x) {
        y.push_back(cubic(t));
        dy.push_back(dcubic(t));
        qy.push_back(quint(t));
        qdy.push_back(dquint(t));
        qd2y.push_back(d2quint(t));
    }
    const HermiteTable c(x, y, dy, false);
    const HermiteTable q(x, qy, qdy, qd2y);
    CHECK(q.quintic());
    for (double t = 0; t <= 2.0; t += 0.037) {
        double v, d, dd;
        c.eval(t, v, d);
        CHECK(v == doctest::Approx(cubic(t)).epsilon(1e-13));
        CHECK(d == doctest::Approx(dcubic(t)).epsilon(1e-12));
        q.eval(t, v, d, dd);
        CHECK(v == doctest::Approx(quint(t)).epsilon(1e-13));
        CHECK(d == doctest::Approx(dquint(t)).epsilon(1e-12));
        CHECK(dd == doctest::Approx(d2quint(t)).epsilon(1e-11));
    }
}

TEST_CASE("limited cubic stays monotone on monotone data") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x{0}, y{0}, dy;
        for (int i = 0; i < 12; ++i) {
            x.push_back(x.back() + u(rng));
            y.push_back(y.back() + (i % 4 == 0 ? 0.0 : u(rng) * u(rng) * 10));
        }
        // deliberately bad slopes; the limiter must repair them
        for (std::size_t i = 0; i < x.size(); ++i) dy.push_back(5 * u(rng));
        const HermiteTable t(x, y, dy, true);
        double prev = -1;
        for (double s = 0; s <= x.back(); s += x.back() / 2000) {
            const double v = t.value(s);
            CHECK(v >= prev - 1e-14);
            prev = v;
        }
    }
}

TEST_CASE("hermite table rejects bad grids") {
    CHECK_THROWS(HermiteTable({0, 1, 1}, {0, 1, 2}, {0, 0, 0}));
    CHECK_THROWS(HermiteTable({0, 1}, {0, 1, 2}, {0, 0}));
}

TEST_CASE("log-log slope") {
    std::vector<double> x{0.1, 0.05, 0.02, 0.01}, y;
    for (double t : x) y.push_back(3 * std::pow(t, 2.5));
    CHECK(fit_loglog_slope(x, y) == doctest::Approx(2.5).epsilon(1e-12));
    for (double& v : y) v = -v;  // magnitudes are used
    CHECK(fit_loglog_slope(x, y) == doctest::Approx(2.5).epsilon(1e-12));
}
