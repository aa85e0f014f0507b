#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "vplab/cloud.hpp"
#include "vplab/hamiltonian.hpp"
#include "vplab/multipole.hpp"
#include "vplab/pair_sum.hpp"
#include "vplab/transport.hpp"

namespace vplab {

// How the energy is assembled.
//  split:  H(f) = H(fbar) + sum w (f - fbar) e + 1/2 <K dRho, dRho> on the fixed
//          nodes, where dRho is collected per spatial node and paired through
//          the cloud Poisson solve of degree l_max (spherical clouds only).
//  direct: kinetic sum on the big cloud plus the softened pair sum
//          1/2 sum_{i != j} m_i m_j K_h(X_i - X_j) over the pair cloud's forward
//          images (Plummer length softening * (x-cell volume)^(1/3)).
struct EnergyOptions {
    enum class Mode { split, direct };
    Mode mode = Mode::split;
    int l_max = 4;
    double softening = 0.5;
    PairSumOptions pair;
    bool richardson_probe = false;
    // split: relative change of the paired term from l_max - 1 to l_max;
    // direct: relative change of the potential under halved softening
    double probe_limit = 0.25;
};

// Clouds and tolerances shared by every functional.
struct Discretization {
    QuadratureCloud big;   // flows and all O(N) sums
    QuadratureCloud pair;  // O(N^2) softened sums (direct mode)
    EnergyOptions energy;
    FlowOptions flow;
    // radial tables for `big`, up to its exact angular degree; rebuilt on demand when null
    std::shared_ptr<const CloudPoisson> poisson;
};

Discretization make_discretization(const SteadyState& state, const CloudSpec& big, const CloudSpec& pair,
                                   const EnergyOptions& energy = {}, const FlowOptions& flow = {});
// Cloud spec with the layout of `big` and roughly `target` nodes.
CloudSpec pair_cloud_spec(const CloudSpec& big, std::size_t target = 9000);

// The big cloud at flow time s: forward images Phi_s(z_i) and backward points
// Phi_{-s}(z_i) with the transported density fbar(Phi_{-s}(z_i)).
struct FlowSample {
    double s = 0;
    std::vector<Phase> images;
    std::vector<Phase> origins;
    std::vector<double> values;
    bool has_forward() const { return !images.empty(); }
    bool has_backward() const { return !values.empty(); }
};
FlowSample steady_sample(const QuadratureCloud& cloud);
FlowSample sample_flow(const HamiltonianField& H, double s, const QuadratureCloud& cloud, const FlowOptions& flow,
                       bool forward = true, bool backward = true);
// Continues whichever parts `from` carries to time s.
FlowSample advance_flow(const HamiltonianField& H, const FlowSample& from, double s, const QuadratureCloud& cloud,
                        const FlowOptions& flow);

struct EnergyBreakdown {
    double kinetic = 0;
    double potential = 0;
    double total = 0;
    double delta_total = 0;  // total minus the steady-state total on the same discretization
    double paired_term = 0;  // 1/2 <K dRho, dRho> (split) or the pair sum (direct)
    double probe_sensitivity = 0;
};

EnergyBreakdown steady_energy(const SteadyState& state, const Discretization& d);
// split mode; needs backward values
EnergyBreakdown energy(const SteadyState& state, const FlowSample& fs, const Discretization& d);
// either mode, flowing what it needs
EnergyBreakdown energy(const SteadyState& state, const HamiltonianField& H, double s, const Discretization& d);

// Potential of the density change sum w (f - fbar) collected on the spatial nodes of d.big.
CloudPotential density_change_potential(const Discretization& d, const std::vector<double>& values);

// sum w |a - b|
double l1_distance(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& w);
double l1_distance(const std::vector<double>& a, const std::vector<double>& b, const QuadratureCloud& cloud);

// sum m_i X_i over forward images (s = 0: the nodes themselves)
Vec3 barycenter_x(const QuadratureCloud& cloud, const std::vector<Phase>& images);
// sum w_i f_i x_i for values on the fixed nodes
Vec3 barycenter_x(const QuadratureCloud& cloud, const std::vector<double>& values);

struct RecenterOptions {
    int max_iterations = 30;
    double damping = 1.0;
    double tolerance = 1e-10;  // |Bar - target| relative to mass
};
struct RecenterResult {
    HamiltonianField field;
    Vec3 shift{};
    Vec3 barycenter{};
    int iterations = 0;
};
// Adds p.v (bumped) to H so that the time-1 forward image of the cloud keeps
// the cloud's own barycenter.
RecenterResult recenter_hamiltonian(const HamiltonianField& H, const QuadratureCloud& cloud, const FlowOptions& flow,
                                    const RecenterOptions& opt = {});

// sum w G(f): forward form uses the nodes' own density, backward form the supplied values.
double casimir_forward(const QuadratureCloud& cloud, const std::function<double(double)>& G);
double casimir(const QuadratureCloud& cloud, const std::vector<double>& values,
               const std::function<double(double)>& G);

// d/ds H(f_s): sum m [grad phi_s(X) . grad_v H(Z) - V . grad_x H(Z)] over forward
// images, phi_s from the backward values.
double first_variation(const SteadyState& state, const HamiltonianField& H, const FlowSample& fs,
                       const Discretization& d);
double first_variation(const SteadyState& state, const HamiltonianField& H, double s, const Discretization& d);
// Exact s-derivative of the split energy: -sum w g(Phi_{-s} z) [e(z) + dphi(x)].
double energy_rate(const SteadyState& state, const HamiltonianField& H, const FlowSample& fs,
                   const Discretization& d);

// d^2/ds^2 H(f_s) in the bracket-weighted form, g = {H, fbar} at the backward points:
//   sum w g(Phi_{-s} z) [v . grad_x H - grad phi_s . grad_v H](z)
//   - sum w f_s(z) grad_v H(z) . grad phi_{g_s}(x)
double second_variation(const SteadyState& state, const HamiltonianField& H, const FlowSample& fs,
                        const Discretization& d);
double second_variation(const SteadyState& state, const HamiltonianField& H, double s, const Discretization& d);
// Exact s-derivative of energy_rate (same nodes, same expansion).
double energy_acceleration(const SteadyState& state, const HamiltonianField& H, const FlowSample& fs,
                           const Discretization& d);

struct TaylorResidual {
    double delta_energy = 0;
    double first_order = 0;           // discrete D1(0) of the same form; zero in the continuum
    double symmetric_integral = 0;    // 1/2 int (1-2s)(D2(s) - D2(0)) ds
    double unsymmetric_integral = 0;  // int (1-s) D2(s) ds
    double symmetric = 0;             // |delta - symmetric_integral|
    double unsymmetric = 0;           // |delta - first_order - unsymmetric_integral|
    std::vector<double> s_nodes, d2;
};
// 8-point Gauss-Legendre in s on [0, 1].  exact_derivative selects energy_acceleration
// and energy_rate in place of second_variation and first_variation.
TaylorResidual taylor_residual(const SteadyState& state, const HamiltonianField& H, const Discretization& d,
                               bool exact_derivative = false);

}  // namespace vplab
