#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "vplab/functionals.hpp"

namespace vplab {

// A state as a weighted point measure, int A f = sum m_i A(Z_i), together with
// the gradient of its own potential.
struct StateMeasure {
    std::vector<Phase> points;
    std::vector<double> masses;
    std::function<Vec3(const Vec3&)> grad_phi;
};

StateMeasure steady_measure(std::shared_ptr<const SteadyState> state, const QuadratureCloud& cloud);
// f(x, v - shift): same density, hence the same potential
StateMeasure translated_measure(std::shared_ptr<const SteadyState> state, const QuadratureCloud& cloud,
                                const Vec3& shift_v);
// fbar o Phi_{-s} in forward form on d.big; the potential is the steady one plus
// the cloud solve of the density change.
StateMeasure pushforward_measure(std::shared_ptr<const SteadyState> state, const HamiltonianField& H, double s,
                                 const Discretization& d);
// same from a sample carrying forward images and backward values
StateMeasure pushforward_measure(std::shared_ptr<const SteadyState> state, const FlowSample& fs,
                                 const Discretization& d);

struct TestFamily {
    int count = 20;
    int n_modes = 6;
    double max_wavenumber = 1.5;
    std::uint64_t seed = 1000;
};
// Band-limited test functions with the phase-ball cut-off.
std::vector<HamiltonianField> stationarity_tests(std::shared_ptr<const SteadyState> state, const TestFamily& fam = {});

// -int v . grad_x psi f + int grad phi_f . grad_v psi f.  With psi = H this is
// the first variation of the energy along H.
double stationarity_form(const StateMeasure& m, const HamiltonianField& psi);
// sup|psi| + sup|grad psi| sampled on the measure's points
double c1_norm(const StateMeasure& m, const HamiltonianField& psi);

struct StationarityResult {
    double residual = 0;          // max over tests
    std::vector<double> per_test;  // |form| / C1 norm
};
StationarityResult stationarity_residual(const StateMeasure& m, const std::vector<HamiltonianField>& tests);

}  // namespace vplab
