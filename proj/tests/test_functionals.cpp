#include <doctest.h>

#include <cmath>
#include <memory>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vplab/functionals.hpp"

using namespace vplab;

namespace {

std::shared_ptr<const SteadyState> steady() {
    static const auto st = std::make_shared<const SteadyState>(build_polytrope({}));
    return st;
}

CloudSpec small_spec() {
    CloudSpec c;
    c.n_r = 6;
    c.n_r_margin = 2;
    c.n_speed = 4;
    c.n_speed_margin = 2;
    return c;
}

const Discretization& small() {
    static const Discretization d =
        make_discretization(*steady(), small_spec(), pair_cloud_spec(small_spec(), 1000), {}, FlowOptions{1e-9});
    return d;
}

const Discretization& full() {
    static const Discretization d = make_discretization(*steady(), CloudSpec{}, pair_cloud_spec(CloudSpec{}, 9000));
    return d;
}

// 1D radial oracles for the steady energies
double kinetic_oracle(const SteadyState& st) {
    using boost::math::quadrature::gauss_kronrod;
    auto shell = [&](double r) {
        const double psi = st.e0() - st.phi(r);
        if (psi <= 0) return 0.0;
        auto inner = [&](double v) { return 4 * kPi * v * v * 0.5 * v * v * st.F(0.5 * v * v + st.phi(r)); };
        return 4 * kPi * r * r * gauss_kronrod<double, 31>::integrate(inner, 0, std::sqrt(2 * psi), 10, 1e-12);
    };
    return gauss_kronrod<double, 31>::integrate(shell, 0, st.r_support(), 10, 1e-11);
}

double potential_oracle(const SteadyState& st) {
    using boost::math::quadrature::gauss_kronrod;
    auto g = [&](double r) { return 0.5 * 4 * kPi * r * r * st.rho(r) * st.phi(r); };
    return gauss_kronrod<double, 61>::integrate(g, 0, st.r_support(), 15, 1e-13);
}

}  // namespace

TEST_CASE("steady energies against radial quadrature") {
    const SteadyState& st = *steady();
    const EnergyBreakdown e = steady_energy(st, full());
    const double k = kinetic_oracle(st), w = potential_oracle(st);
    CHECK(k == doctest::Approx(-0.5 * w).epsilon(1e-7));  // virial theorem for the oracle itself
    CHECK(e.kinetic == doctest::Approx(k).epsilon(1e-4));
    CHECK(e.potential == doctest::Approx(w).epsilon(1e-4));
    CHECK(std::abs(2 * e.kinetic + e.potential) <= 1e-2 * std::abs(e.potential));
    CHECK(e.delta_total == 0.0);
}

TEST_CASE("zero field and invariant fields leave the energy unchanged") {
    const SteadyState& st = *steady();
    const Discretization& d = small();
    const HamiltonianField zero = sample_hamiltonian(steady(), 1, 8, 1.5, 0.0);
    CHECK(energy(st, zero, 1.0, d).delta_total == 0.0);
    const HamiltonianField chi = invariant_hamiltonian(steady(), {1e-2, 0.1});
    const FlowSample fs = sample_flow(chi, 1.0, d.big, d.flow, false, true);
    CHECK(std::abs(energy(st, fs, d).delta_total) < 1e-10);
    CHECK(l1_distance(fs.values, d.big.fbar, d.big) < 1e-6);
}

TEST_CASE("energy rate and acceleration are derivatives of the energy") {
    const SteadyState& st = *steady();
    const Discretization& d = small();
    const HamiltonianField H = sample_hamiltonian(steady(), 2, 8, 1.5, 0.003);
    const double s = 0.5, h = 0.05;
    const FlowSample m = sample_flow(H, s, d.big, d.flow);
    auto E = [&](double t) { return energy(st, sample_flow(H, t, d.big, d.flow, false, true), d).delta_total; };
    const double ep = E(s + h), em = E(s - h), e0 = energy(st, m, d).delta_total;
    const double fd1 = (ep - em) / (2 * h), fd2 = (ep - 2 * e0 + em) / (h * h);
    const double rate = energy_rate(st, H, m, d), acc = energy_acceleration(st, H, m, d);
    CHECK(rate == doctest::Approx(fd1).epsilon(1e-2));
    CHECK(acc == doctest::Approx(fd2).epsilon(2e-2));
    // the paper-form variations approximate the same quantities
    CHECK(first_variation(st, H, m, d) == doctest::Approx(rate).epsilon(5e-2));
    CHECK(second_variation(st, H, m, d) == doctest::Approx(acc).epsilon(5e-2));
}

TEST_CASE("first variation vanishes at the steady state") {
    const SteadyState& st = *steady();
    const Discretization& d = full();
    const FlowSample at0 = steady_sample(d.big);
    const double scale = std::abs(steady_energy(st, d).total);
    for (std::uint64_t seed : {1, 2, 3}) {
        const HamiltonianField H = sample_hamiltonian(steady(), seed, 8, 1.5, 0.003);
        const double d1 = first_variation(st, H, at0, d);
        CHECK(std::abs(d1) <= 1e-4 * grad_norms(H).linf * scale);
        CHECK(std::abs(energy_rate(st, H, at0, d)) <= 1e-4 * grad_norms(H).linf * scale);
    }
}

TEST_CASE("l1 distance, barycentre and casimirs") {
    const Discretization& d = small();
    const std::vector<double> w{1, 2, 3}, a{1, 0, 2}, b{0, 0, 1};
    CHECK(l1_distance(a, b, w) == 4.0);
    const Vec3 bar = barycenter_x(d.big, steady_sample(d.big).images);
    for (double c : bar) CHECK(std::abs(c) < 1e-12);
    const Vec3 bar2 = barycenter_x(d.big, d.big.fbar);
    for (int k = 0; k < 3; ++k) CHECK(bar2[k] == doctest::Approx(bar[k]).scale(1e-12));
    auto sq = [](double t) { return t * t; };
    CHECK(casimir(d.big, d.big.fbar, sq) == doctest::Approx(casimir_forward(d.big, sq)).epsilon(1e-14));
    CHECK(casimir_forward(d.big, [](double t) { return t; }) == doctest::Approx(d.big.mass()).epsilon(1e-14));
}

TEST_CASE("recentering restores the barycentre") {
    const Discretization& d = small();
    const HamiltonianField H = sample_hamiltonian(steady(), 3, 8, 1.5, 0.003);
    const RecenterResult r = recenter_hamiltonian(H, d.big, d.flow);
    const FlowSample fs = sample_flow(r.field, 1.0, d.big, d.flow, true, false);
    const Vec3 bar = barycenter_x(d.big, fs.images), target = barycenter_x(d.big, d.big.fbar);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(bar[k] - target[k]) <= 1e-9 * d.big.mass());
    CHECK(r.iterations >= 1);
}

TEST_CASE("taylor identity with exact derivatives") {
    const SteadyState& st = *steady();
    const Discretization& d = small();
    const HamiltonianField H = sample_hamiltonian(steady(), 1, 8, 1.5, 0.003);
    const TaylorResidual t = taylor_residual(st, H, d, true);
    CHECK(t.delta_energy > 0);
    CHECK(t.unsymmetric <= 1e-6 * t.delta_energy);
    CHECK(t.s_nodes.size() == 8);
}

TEST_CASE("pair cloud spec and discretisation options") {
    const CloudSpec p = pair_cloud_spec(CloudSpec{}, 9000);
    const QuadratureCloud c = build_cloud(*steady(), p);
    CHECK(c.size() <= 9000);
    CHECK(c.size() >= 3000);
    CHECK(c.mass() == doctest::Approx(1.0).epsilon(2e-2));

    EnergyOptions direct;
    direct.mode = EnergyOptions::Mode::direct;
    const Discretization dd = make_discretization(*steady(), small_spec(), p, direct);
    const EnergyBreakdown e = steady_energy(*steady(), dd);
    CHECK(e.potential == doctest::Approx(potential_oracle(*steady())).epsilon(0.1));
}

#include "vplab/stationarity.hpp"

TEST_CASE("stationarity residual of the steady state") {
    const SteadyState& st = *steady();
    const Discretization& d = full();
    const std::vector<HamiltonianField> tests = stationarity_tests(steady());
    REQUIRE(tests.size() == 20);
    const StationarityResult r = stationarity_residual(steady_measure(steady(), d.big), tests);
    CHECK(r.residual <= 1e-5);
    CHECK(r.per_test.size() == 20);
    CHECK(r.residual == *std::max_element(r.per_test.begin(), r.per_test.end()));
    const StationarityResult moved = stationarity_residual(translated_measure(steady(), d.big, {0.1, 0, 0}), tests);
    CHECK(moved.residual > 10 * r.residual);
    CHECK_THROWS(stationarity_residual(steady_measure(steady(), d.big), {}));
    (void)st;
}

TEST_CASE("stationarity form is linear and is the first variation") {
    const SteadyState& st = *steady();
    const Discretization& d = full();
    const StateMeasure m = steady_measure(steady(), d.big);
    const HamiltonianField H = sample_hamiltonian(steady(), 4, 8, 1.5, 0.003);
    CHECK(stationarity_form(m, H.scaled(2)) == doctest::Approx(2 * stationarity_form(m, H)).epsilon(1e-12));
    CHECK(stationarity_form(m, H) ==
          doctest::Approx(first_variation(st, H, steady_sample(d.big), d)).epsilon(1e-9).scale(1e-12));
    double vmax = 0;
    for (const Phase& z : m.points) vmax = std::max(vmax, std::abs(H.value(z)));
    CHECK(c1_norm(m, H) >= vmax);
}

TEST_CASE("variations at the steady state scale linearly and quadratically") {
    const SteadyState& st = *steady();
    const Discretization& d = small();
    const FlowSample at0 = steady_sample(d.big);
    const HamiltonianField H = sample_hamiltonian(steady(), 6, 8, 1.5, 0.003);
    const double d1 = first_variation(st, H, at0, d), d2 = second_variation(st, H, at0, d);
    for (double lambda : {0.1, 3.0}) {
        const HamiltonianField L = H.scaled(lambda);
        CHECK(first_variation(st, L, at0, d) == doctest::Approx(lambda * d1).epsilon(1e-12));
        CHECK(second_variation(st, L, at0, d) == doctest::Approx(lambda * lambda * d2).epsilon(1e-12));
    }
    CHECK(d2 > 0);
}
