#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "vplab/hamiltonian.hpp"

using namespace vplab;

namespace {

std::shared_ptr<const SteadyState> steady() {
    static const auto st = std::make_shared<const SteadyState>(build_polytrope({}));
    return st;
}

Phase random_point(std::mt19937_64& rng, double radius) {
    std::normal_distribution<double> n;
    std::uniform_real_distribution<double> u;
    Phase z;
    double s = 0;
    for (double& q : z) {
        q = n(rng);
        s += q * q;
    }
    const double r = radius * std::pow(u(rng), 1.0 / 6);
    for (double& q : z) q *= r / std::sqrt(s);
    return z;
}

double norm6(const Phase& z) {
    double s = 0;
    for (double q : z) s += q * q;
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("cut-off is C4 with the right end values") {
    CHECK(cutoff(-0.3) == 1.0);
    CHECK(cutoff(0.0) == 1.0);
    CHECK(std::abs(cutoff(1.0)) <= 1e-15);
    CHECK(cutoff(1.7) == 0.0);
    for (double t : {0.0, 1.0}) {
        CHECK(std::abs(cutoff_d1(t)) <= 1e-14);
        CHECK(std::abs(cutoff_d2(t)) <= 1e-13);
    }
    const double h = 1e-6;
    for (double t = 0.05; t < 1; t += 0.1) {
        CHECK(cutoff_d1(t) == doctest::Approx((cutoff(t + h) - cutoff(t - h)) / (2 * h)).epsilon(1e-7));
        CHECK(cutoff_d2(t) == doctest::Approx((cutoff_d1(t + h) - cutoff_d1(t - h)) / (2 * h)).epsilon(1e-6));
        CHECK(cutoff_d1(t) <= 0);
    }
}

TEST_CASE("field derivatives agree with finite differences") {
    std::mt19937_64 rng(11);
    for (BumpSpec::Kind kind : {BumpSpec::Kind::energy_shell, BumpSpec::Kind::phase_ball}) {
        BumpSpec b;
        b.kind = kind;
        HamiltonianField H = sample_hamiltonian(steady(), 3, 8, 1.5, 0.01, b);
        H.set_quadratic(0.02);
        H.set_translation({0.01, -0.02, 0.005});
        H.set_energy_profile({50.0, 0.1});
        for (int trial = 0; trial < 20; ++trial) {
            const Phase z = random_point(rng, 0.9 * H.support_radius());
            Phase g;
            Mat6 hs;
            const double v = H.eval(z, &g, &hs);
            CHECK(v == doctest::Approx(H.value(z)));
            const double step = 1e-5;
            for (int k = 0; k < 6; ++k) {
                Phase zp = z, zm = z;
                zp[k] += step;
                zm[k] -= step;
                const double fd = (H.value(zp) - H.value(zm)) / (2 * step);
                CHECK(g[k] == doctest::Approx(fd).epsilon(1e-6).scale(1e-3));
                const Phase gp = H.gradient(zp), gm = H.gradient(zm);
                for (int j = 0; j < 6; ++j)
                    CHECK(hs(j, k) == doctest::Approx((gp[j] - gm[j]) / (2 * step)).epsilon(1e-5).scale(1e-2));
            }
        }
    }
}

TEST_CASE("compact support") {
    std::mt19937_64 rng(5);
    const HamiltonianField H = sample_hamiltonian(steady(), 1, 8, 1.5, 1.0);
    const SteadyState& st = *steady();
    for (int trial = 0; trial < 2000; ++trial) {
        Phase z = random_point(rng, 1.2 * H.support_radius());
        if (norm6(z) >= H.support_radius()) CHECK(H.value(z) == 0.0);
        if (st.e(z) >= H.energy_cut()) {
            CHECK(H.value(z) == 0.0);
            const Phase g = H.gradient(z);
            CHECK(norm6(g) == 0.0);
        }
    }
    CHECK(H.energy_cut() == doctest::Approx(st.e0() + 0.25 * std::abs(st.e0())));
}

TEST_CASE("sampling is deterministic per seed") {
    const HamiltonianField a = sample_hamiltonian(steady(), 4, 8, 1.5, 0.003);
    const HamiltonianField b = sample_hamiltonian(steady(), 4, 8, 1.5, 0.003);
    const HamiltonianField c = sample_hamiltonian(steady(), 5, 8, 1.5, 0.003);
    REQUIRE(a.atoms().size() == 8);
    for (std::size_t i = 0; i < a.atoms().size(); ++i) {
        CHECK(a.atoms()[i].m == b.atoms()[i].m);
        CHECK(a.atoms()[i].coeff == b.atoms()[i].coeff);
        CHECK(a.atoms()[i].phase == b.atoms()[i].phase);
    }
    const Phase z{0.1, 0.2, -0.1, 0.2, 0.0, 0.1};
    CHECK(a.value(z) == b.value(z));
    CHECK(a.value(z) != c.value(z));
    CHECK(a.origin.seed == 4);
}

TEST_CASE("scaling and sums are linear") {
    const HamiltonianField a = sample_hamiltonian(steady(), 1, 8, 1.5, 0.003);
    const HamiltonianField b = sample_hamiltonian(steady(), 2, 8, 1.5, 0.003);
    const Phase z{0.1, 0.2, -0.1, 0.2, 0.0, 0.1};
    CHECK(a.scaled(0.3).value(z) == doctest::Approx(0.3 * a.value(z)).epsilon(1e-14));
    CHECK(a.plus(b).value(z) == doctest::Approx(a.value(z) + b.value(z)).epsilon(1e-13));
    CHECK(a.scaled(0).is_zero());
}

TEST_CASE("poisson bracket convention and invariance") {
    const Phase gf{1, 2, 3, 4, 5, 6}, gh{-1, 0.5, 2, 0.1, -3, 1};
    // gf . J gh with J = [[0, I], [-I, 0]]
    double expect = 0;
    for (int i = 0; i < 3; ++i) expect += gf[i] * gh[3 + i] - gf[3 + i] * gh[i];
    CHECK(poisson_bracket(gf, gh) == doctest::Approx(expect));
    CHECK(poisson_bracket(gh, gf) == doctest::Approx(-expect));
    CHECK(poisson_bracket(gf, gf) == 0.0);

    const HamiltonianField chi = invariant_hamiltonian(steady(), {1e-2, 0.1});
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        const Phase z = random_point(rng, 1.0);
        CHECK(std::abs(poisson_bracket(chi, *steady(), z)) <= 1e-12);
    }
}

TEST_CASE("spectral norms match grid quadrature and closed forms") {
    BumpSpec none;
    none.kind = BumpSpec::Kind::none;
    HamiltonianField H(steady(), none);
    H.add_atom({{1, 0, 0, 0, 2, 0}, 0.7, 0.3});
    const TrigSpectrum sp = trig_spectrum(H);
    REQUIRE(sp.single_mode());
    const double L = H.box_length();
    const double k = 2 * kPi * std::sqrt(5.0) / L;
    for (int order : {0, 1, 4, 22})
        CHECK(sp.norm(order) == doctest::Approx(0.7 * std::pow(k, order) * std::sqrt(std::pow(L, 6) / 2)).epsilon(1e-12));

    const HamiltonianField G = sample_hamiltonian(steady(), 2, 8, 1.5, 0.01, none);
    CHECK(spectral_norm(G, 0) == doctest::Approx(box_quadrature_norm(G, 0)).epsilon(1e-10));
    CHECK(spectral_norm(G, 1) == doctest::Approx(box_quadrature_norm(G, 1)).epsilon(1e-10));
    double s = 0;
    for (int j = 0; j <= 5; ++j) s += std::pow(spectral_norm(G, j), 2);
    CHECK(sobolev_norm(G, 5) == doctest::Approx(std::sqrt(s)).epsilon(1e-12));

    // derivative along axis multiplies each mode by i k_axis
    const TrigSpectrum d = sp.derivative(4);
    CHECK(d.norm(0) == doctest::Approx(2 * kPi * 2 / L * sp.norm(0)).epsilon(1e-12));
}

TEST_CASE("gradient norms bound pointwise samples") {
    const HamiltonianField H = sample_hamiltonian(steady(), 1, 8, 1.5, 0.003);
    const GradNorms n = grad_norms(H);
    CHECK(n.l1 > 0);
    CHECK(n.l2 > 0);
    std::mt19937_64 rng(9);
    double gmax = 0, hmax = 0;
    for (int t = 0; t < 3000; ++t) {
        const Phase z = random_point(rng, H.support_radius());
        Phase g;
        Mat6 h;
        H.eval(z, &g, &h);
        gmax = std::max(gmax, norm6(g));
        hmax = std::max(hmax, h.norm() > 0 ? Eigen::JacobiSVD<Mat6>(h).singularValues()(0) : 0.0);
    }
    CHECK(n.linf >= gmax * (1 - 1e-9));
    CHECK(n.hess_linf >= hmax * (1 - 1e-9));
    // linear in the amplitude
    const GradNorms n2 = grad_norms(H.scaled(2));
    CHECK(n2.l1 == doctest::Approx(2 * n.l1).epsilon(1e-12));
    CHECK(n2.linf == doctest::Approx(2 * n.linf).epsilon(1e-9));
}

TEST_CASE("A_k certificate") {
    const SteadyState& st = *steady();
    CloudSpec cs;
    const QuadratureCloud cloud = build_cloud(st, cs);
    const HamiltonianField H = sample_hamiltonian(steady(), 1, 8, 1.5, 0.003);
    const AkCertificate c = ak_certificate(H, st, cloud, 50);
    CHECK(c.ratio == doctest::Approx(c.l1_grad / c.l1_bracket));
    CHECK(c.member == (c.ratio <= 50));
    CHECK_FALSE(c.near_invariant);
    // invariant fields have no bracket at all
    const AkCertificate inv = ak_certificate(invariant_hamiltonian(steady(), {1e-2, 0.1}), st, cloud, 50);
    CHECK(inv.near_invariant);
    CHECK_FALSE(inv.member);
}

TEST_CASE("membership is decided by the bracket") {
    const SteadyState& st = *steady();
    const QuadratureCloud cloud = build_cloud(st, {});
    const HamiltonianField chi = invariant_hamiltonian(steady(), {1e-2, 0.1});
    for (double k : {1.0, 50.0, 1e6}) CHECK_FALSE(ak_certificate(chi, st, cloud, k).member);
    for (std::uint64_t seed : {2, 3}) {
        const AkCertificate c = ak_certificate(sample_hamiltonian(steady(), seed, 8, 1.5, 0.003), st, cloud, 1.0);
        REQUIRE(std::isfinite(c.ratio));
        CHECK(ak_certificate(sample_hamiltonian(steady(), seed, 8, 1.5, 0.003), st, cloud, c.ratio * 1.001).member);
    }
    const HamiltonianField H = sample_hamiltonian(steady(), 1, 8, 1.5, 0.003);
    CHECK(spectral_norm(H.scaled(0.25), 7) == doctest::Approx(0.25 * spectral_norm(H, 7)).epsilon(1e-14));
}
