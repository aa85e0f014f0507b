#include <doctest.h>

#include <cmath>
#include <random>

#include "vplab/multipole.hpp"
#include "vplab/pair_sum.hpp"

using namespace vplab;

namespace {

PointSet random_ball(std::size_t n, std::uint64_t seed, double h) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    PointSet p;
    while (p.size() < n) {
        const Vec3 x{u(rng), u(rng), u(rng)};
        if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] <= 1) p.add(x, 1.0 / static_cast<double>(n), h);
    }
    return p;
}

// plain double loop
double naive_energy(const PointSet& p) {
    double e = 0;
    for (std::size_t a = 0; a < p.size(); ++a)
        for (std::size_t b = 0; b < a; ++b) {
            double d2 = 0;
            for (int k = 0; k < 3; ++k) d2 += std::pow(p.pos[a][k] - p.pos[b][k], 2);
            const double h2 = 0.5 * (p.soft[a] * p.soft[a] + p.soft[b] * p.soft[b]);
            e += -p.mass[a] * p.mass[b] / (4 * kPi * std::sqrt(d2 + h2));
        }
    return e;
}

double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

}  // namespace

TEST_CASE("direct sum matches a plain double loop") {
    const PointSet p = random_ball(500, 1, 0.05);
    CHECK(interaction_energy(p) == doctest::Approx(naive_energy(p)).epsilon(1e-12));
    const std::vector<double> phi = potential_at(p, p, true);
    double half = 0;
    for (std::size_t i = 0; i < p.size(); ++i) half += 0.5 * p.mass[i] * phi[i];
    CHECK(half == doctest::Approx(naive_energy(p)).epsilon(1e-12));
}

TEST_CASE("serial and parallel sums agree bitwise") {
    const PointSet p = random_ball(800, 2, 0.02);
    PairSumOptions par, ser;
    ser.parallel = false;
    CHECK(potential_at(p, p, true, par) == potential_at(p, p, true, ser));
    CHECK(interaction_energy(p, par) == interaction_energy(p, ser));
    par.method = ser.method = PairSumOptions::Method::treecode;
    CHECK(field_at(p, p, true, par) == field_at(p, p, true, ser));
}

TEST_CASE("treecode converges to the direct sum") {
    const PointSet p = random_ball(3000, 3, 0.02);
    const std::vector<double> exact = potential_at(p, p, true);
    double prev = 1;
    for (double theta : {0.8, 0.5, 0.3}) {
        PairSumOptions o;
        o.method = PairSumOptions::Method::treecode;
        o.theta = theta;
        const std::vector<double> t = potential_at(p, p, true, o);
        double err = 0, ref = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            err = std::max(err, std::abs(t[i] - exact[i]));
            ref = std::max(ref, std::abs(exact[i]));
        }
        CHECK(err / ref < 1e-2);
        CHECK(err / ref < prev);
        prev = err / ref;
    }
}

TEST_CASE("field is the gradient of the potential") {
    const PointSet src = random_ball(200, 4, 0.05);
    PointSet tgt;
    tgt.add({0.2, -0.3, 0.1}, 1, 0.05);
    const Vec3 g = field_at(src, tgt, false)[0];
    const double h = 1e-6;
    for (int k = 0; k < 3; ++k) {
        PointSet a = tgt, b = tgt;
        a.pos[0][k] += h;
        b.pos[0][k] -= h;
        const double fd = (potential_at(src, a, false)[0] - potential_at(src, b, false)[0]) / (2 * h);
        CHECK(g[k] == doctest::Approx(fd).epsilon(1e-6));
    }
    const Vec3 d{0.3, 0.1, -0.2};
    const Vec3 kg = softened_kernel_grad(d, 0.01);
    CHECK(kg[0] == doctest::Approx((softened_kernel({0.3 + h, 0.1, -0.2}, 0.01) -
                                    softened_kernel({0.3 - h, 0.1, -0.2}, 0.01)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("uniform ball potential at the centre") {
    // -(1/4pi) 3M/(2R) for a homogeneous ball
    const PointSet p = random_ball(20000, 5, 0.0);
    PointSet c;
    c.add({0, 0, 0}, 1, 0);
    PairSumOptions o;
    o.method = PairSumOptions::Method::treecode;
    const double phi = potential_at(p, c, false, o)[0];
    CHECK(phi == doctest::Approx(-3.0 / (8 * kPi)).epsilon(2e-2));
}

TEST_CASE("truncated shell kernel") {
    const Vec3 x{0.2, 0.1, -0.3}, y{0.9, -0.5, 0.4};
    Vec3 g;
    const double k16 = ShellExpansion::kernel(x, y, 16, &g);
    Vec3 d{y[0] - x[0], y[1] - x[1], y[2] - x[2]};
    CHECK(k16 == doctest::Approx(-1 / (4 * kPi * norm3(d))).epsilon(1e-7));
    // Legendre series oracle
    const double rx = norm3(x), ry = norm3(y);
    const double cosg = (x[0] * y[0] + x[1] * y[1] + x[2] * y[2]) / (rx * ry);
    double series = 0;
    for (unsigned l = 0; l <= 5; ++l) series += std::pow(rx, l) / std::pow(ry, l + 1) * std::legendre(l, cosg);
    CHECK(ShellExpansion::kernel(x, y, 5) == doctest::Approx(-series / (4 * kPi)).epsilon(1e-13));
    // monopole only: -1 / (4 pi r_>)
    CHECK(ShellExpansion::kernel(x, y, 0) == doctest::Approx(-1 / (4 * kPi * norm3(y))).epsilon(1e-14));
    const double h = 1e-6;
    for (int k = 0; k < 3; ++k) {
        Vec3 a = y, b = y;
        a[k] += h;
        b[k] -= h;
        CHECK(g[k] == doctest::Approx((ShellExpansion::kernel(x, a, 16) - ShellExpansion::kernel(x, b, 16)) / (2 * h))
                          .epsilon(1e-6));
    }
    CHECK(max_exact_degree(3, 6) == 5);
}

TEST_CASE("shell expansion energy equals half the potential pairing") {
    const PointSet p = random_ball(400, 6, 0.0);
    const std::vector<double> phi = shell_potential_at(p, p, true, 4);
    double half = 0;
    for (std::size_t i = 0; i < p.size(); ++i) half += 0.5 * p.mass[i] * phi[i];
    CHECK(shell_interaction_energy(p, 4) == doctest::Approx(half).epsilon(1e-12));
}

TEST_CASE("cloud Poisson solve reproduces the steady potential") {
    const SteadyState st = build_polytrope({});
    double prev = INFINITY;
    for (int f : {1, 2}) {
        CloudSpec cs;
        cs.n_r *= f;
        cs.n_r_margin *= f;
        const QuadratureCloud cloud = build_cloud(st, cs);
        std::vector<double> q(cloud.n_xcells());
        for (std::size_t c = 0; c < q.size(); ++c) q[c] = st.rho(norm3(cloud.xcell_pos[c])) * cloud.xcell_volume[c];
        const CloudPoisson solver(cloud, 4);
        const CloudPotential pot = solver.solve(q);
        double err = 0;
        for (std::size_t c = 0; c < q.size(); ++c)
            err = std::max(err, std::abs(pot.cell_phi()[c] - st.phi(norm3(cloud.xcell_pos[c]))));
        err /= std::abs(st.phi(0));
        CHECK(err < (f == 1 ? 1e-3 : 1e-5));
        CHECK(err < prev);
        prev = err;
        double e = 0;
        for (std::size_t c = 0; c < q.size(); ++c) e += 0.5 * q[c] * pot.cell_phi()[c];
        CHECK(pot.energy() == doctest::Approx(e).epsilon(1e-12));
        double phi, dphi;
        Vec3 g;
        const Vec3 y{0.3, 0.2, -0.1};
        pot.eval(y, &phi, &g);
        CHECK(phi == doctest::Approx(st.phi(norm3(y))).epsilon(1e-3));
        st.phi_d(norm3(y), phi, dphi);
        CHECK(norm3(g) == doctest::Approx(dphi).epsilon(1e-3));
    }
}

TEST_CASE("assembled self-forces cancel") {
    const PointSet p = random_ball(1000, 8, 0.03);
    const std::vector<Vec3> g = field_at(p, p, true);
    Vec3 total{0, 0, 0};
    double scale = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (int k = 0; k < 3; ++k) {
            total[k] += p.mass[i] * g[i][k];
            scale += p.mass[i] * std::abs(g[i][k]);
        }
    for (double t : total) CHECK(std::abs(t) <= 1e-13 * scale);
    // K(x - y) = K(y - x)
    const Vec3 d{0.3, -0.2, 0.7}, md{-0.3, 0.2, -0.7};
    CHECK(softened_kernel(d, 0.01) == softened_kernel(md, 0.01));
    const Vec3 ga = softened_kernel_grad(d, 0.01), gb = softened_kernel_grad(md, 0.01);
    for (int k = 0; k < 3; ++k) CHECK(ga[k] == -gb[k]);
}
