#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>

#include "vplab/transport.hpp"

using namespace vplab;

namespace {

std::shared_ptr<const SteadyState> steady() {
    static const auto st = std::make_shared<const SteadyState>(build_polytrope({}));
    return st;
}

double dist(const Phase& a, const Phase& b) {
    double s = 0;
    for (int i = 0; i < 6; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

double norm6(const Phase& z) { return dist(z, Phase{}); }

}  // namespace

TEST_CASE("zero field flow is the identity") {
    const HamiltonianField H = sample_hamiltonian(steady(), 1, 8, 1.5, 0.0);
    const Phase z{0.1, 0.2, 0.3, -0.1, 0.0, 0.2};
    CHECK(flow(H, z, 1.0) == z);
    const FlowJacobian fj = flow_jacobian(H, z, 1.0);
    CHECK(fj.jac == Mat6::Identity());
}

TEST_CASE("harmonic flow is a rotation") {
    BumpSpec none;
    none.kind = BumpSpec::Kind::none;
    HamiltonianField H(steady(), none);
    const double q = 1.3;
    H.set_quadratic(q);
    const Phase z{0.3, -0.2, 0.1, 0.05, 0.4, -0.3};
    FlowOptions o;
    o.tol = 1e-11;
    for (double s : {0.5, 1.0, -2.0}) {
        const Phase end = flow(H, z, s, o);
        // x' = q v, v' = -q x
        for (int i = 0; i < 3; ++i) {
            CHECK(end[i] == doctest::Approx(z[i] * std::cos(q * s) + z[3 + i] * std::sin(q * s)).epsilon(1e-9));
            CHECK(end[3 + i] ==
                  doctest::Approx(-z[i] * std::sin(q * s) + z[3 + i] * std::cos(q * s)).epsilon(1e-9));
        }
    }
}

TEST_CASE("flows conserve H and volume and are reversible") {
    const FlowOptions o{1e-9};
    const CloudSpec cs;
    const QuadratureCloud cloud = build_cloud(*steady(), cs);
    for (std::uint64_t seed : {1, 2, 3}) {
        const HamiltonianField H = sample_hamiltonian(steady(), seed, 8, 1.5, 0.003);
        for (std::size_t i = 0; i < cloud.size(); i += cloud.size() / 7) {
            const Phase& z = cloud.nodes[i];
            const FlowJacobian fj = flow_jacobian(H, z, 1.0, o);
            CHECK(std::abs(fj.jac.determinant() - 1) <= 1e-8);
            CHECK(H.value(fj.end) == doctest::Approx(H.value(z)).scale(1e-7));
            // symplectic: M^T J M = J
            Mat6 J = Mat6::Zero();
            J.block<3, 3>(0, 3).setIdentity();
            J.block<3, 3>(3, 0) = -Eigen::Matrix3d::Identity();
            CHECK((fj.jac.transpose() * J * fj.jac - J).norm() <= 1e-7);
            CHECK(reversibility_error(H, z, 1.0, o) <= 10 * o.tol * (1 + norm6(z)));
            // Jacobian column against finite differences of the flow
            const double h = 1e-5;
            for (int k : {0, 4}) {
                Phase zp = z, zm = z;
                zp[k] += h;
                zm[k] -= h;
                const Phase ep = flow(H, zp, 1.0, o), em = flow(H, zm, 1.0, o);
                for (int j = 0; j < 6; ++j)
                    CHECK(fj.jac(j, k) == doctest::Approx((ep[j] - em[j]) / (2 * h)).scale(1).epsilon(1e-3));
            }
        }
    }
}

TEST_CASE("parallel kernels match their serial references bitwise") {
    CloudSpec cs;
    cs.n_r = 4;
    cs.n_speed = 3;
    const QuadratureCloud cloud = build_cloud(*steady(), cs);
    const HamiltonianField H = sample_hamiltonian(steady(), 2, 8, 1.5, 0.003);
    const FlowOptions o{1e-8};
    CHECK(forward_images(H, 1.0, cloud.nodes, o) == forward_images_serial(H, 1.0, cloud.nodes, o));
    const PerturbedState p(steady(), H, 1.0, o);
    const Pushforward a = pushforward_cloud(p, cloud), b = pushforward_cloud_serial(p, cloud);
    CHECK(a.values == b.values);
    CHECK(a.images == b.images);
    CHECK(a.masses == b.masses);
}

TEST_CASE("pushforward values and masses") {
    CloudSpec cs;
    cs.n_r = 4;
    cs.n_speed = 3;
    const QuadratureCloud cloud = build_cloud(*steady(), cs);
    const HamiltonianField H = sample_hamiltonian(steady(), 3, 8, 1.5, 0.003);
    const PerturbedState p(steady(), H, 0.7, {1e-9});
    const Pushforward pf = pushforward_cloud(p, cloud);
    double m = 0, m0 = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        m += pf.masses[i];
        m0 += cloud.weights[i] * cloud.fbar[i];
    }
    CHECK(m == doctest::Approx(m0).epsilon(1e-14));
    for (std::size_t i = 0; i < cloud.size(); i += 97) {
        const Phase& z = cloud.nodes[i];
        CHECK(pf.values[i] == doctest::Approx(steady()->f(p.backward(z))).epsilon(1e-14));
        CHECK(pushforward_eval(p, z) == pf.values[i]);
        CHECK(dist(p.forward(p.backward(z)), z) <= 1e-7);
        CHECK(dist(pf.images[i], p.forward(z)) == 0.0);
    }
}

TEST_CASE("forward dump round-trip and format") {
    CloudSpec cs;
    cs.n_r = 3;
    cs.n_speed = 2;
    const QuadratureCloud cloud = build_cloud(*steady(), cs);
    const PerturbedState p(steady(), sample_hamiltonian(steady(), 1, 8, 1.5, 0.003), 1.0, {1e-8});
    const Pushforward pf = pushforward_cloud(p, cloud);
    const auto path = (std::filesystem::temp_directory_path() / "vplab_fwd_test.bin").string();
    write_forward_dump(path, pf);
    CHECK(std::filesystem::file_size(path) == 16 + 8 * 8 * pf.images.size());
    {
        std::ifstream in(path, std::ios::binary);
        char magic[8];
        in.read(magic, 8);
        CHECK(std::string(magic, 8) == "VPLFWD01");
    }
    const Pushforward back = read_forward_dump(path);
    CHECK(back.images == pf.images);
    CHECK(back.masses == pf.masses);
    CHECK(back.values == pf.values);
    {
        std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
        f.write("XXXXXXXX", 8);
    }
    CHECK_THROWS(read_forward_dump(path));
    std::filesystem::remove(path);
}

TEST_CASE("flow options validation") {
    FlowOptions o;
    o.tol = 0;
    CHECK_THROWS(o.validate());
    o = {};
    o.max_steps = 0;
    CHECK_THROWS(o.validate());
}

TEST_CASE("group property and Gronwall bound") {
    const FlowOptions o{1e-9};
    const HamiltonianField H = sample_hamiltonian(steady(), 4, 8, 1.5, 0.003);
    const GradNorms n = grad_norms(H);
    const Phase z{0.2, 0.1, -0.15, 0.1, -0.2, 0.05};
    for (auto [s, t] : {std::pair{0.3, 0.7}, std::pair{1.0, -0.4}, std::pair{-0.5, -0.5}}) {
        const Phase a = flow(H, flow(H, z, s, o), t, o), b = flow(H, z, s + t, o);
        CHECK(dist(a, b) <= 10 * o.tol * (1 + norm6(z)));
    }
    for (double s : {0.25, 0.5, 1.0}) {
        const FlowJacobian fj = flow_jacobian(H, z, s, o);
        const double op = Eigen::JacobiSVD<Mat6>(fj.jac).singularValues()(0);
        CHECK(op <= std::exp(s * n.hess_linf));
    }
}
