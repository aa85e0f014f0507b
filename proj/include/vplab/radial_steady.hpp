#pragma once

#include <string>

#include "vplab/numerics.hpp"

namespace vplab {

struct RadialGridSpec {
    int nodes = 4000;                // RK4 steps across the support radius
    double max_scaled_radius = 80.0; // shooting gives up beyond this many core radii
};

// F(e) = A (e0 - e)_+^mu.  With amplitude <= 0 the solver chooses A so that
// the spatial support has radius `support_radius`; otherwise A is fixed and
// the support radius is an output.
struct PolytropeSpec {
    double mu = 3.0;
    double amplitude = 0.0;
    double target_mass = 1.0;
    double support_radius = 1.0;
    RadialGridSpec grid;
    double mass_tolerance = 1e-10;
    int max_iterations = 200;

    void validate() const;  // throws std::invalid_argument
};

// Isotropic polytrope. The potential uses K(x) = -1/(4 pi |x|), so that
// Laplacian(phi) = rho.  Immutable after construction.
class SteadyState {
public:
    SteadyState() = default;

    const PolytropeSpec& spec() const { return spec_; }
    double mu() const { return spec_.mu; }
    double amplitude() const { return amplitude_; }
    double shell_constant() const { return c_mu_; }  // rho = c_mu A psi^(mu+3/2)
    double e0() const { return e0_; }
    double r_support() const { return r_support_; }
    double rho_phase() const { return rho_phase_; }
    double mass() const { return mass_; }
    double poisson_residual() const { return poisson_residual_; }

    const HermiteTable& phi_table() const { return phi_; }

    double phi(double r) const;
    void phi_d(double r, double& phi, double& dphi) const;
    double d2phi(double r) const;
    double rho(double r) const;

    double F(double e) const;
    double dF(double e) const;
    double d2F(double e) const;

    double e(const Phase& z) const;
    double f(const Phase& z) const { return F(e(z)); }
    Phase grad_e(const Phase& z) const;
    Mat6 hess_e(const Phase& z) const;
    // value and gradient of f in one pass
    double f_grad(const Phase& z, Phase& grad) const;

    // |{ e < level }| in phase space, by 1D radial quadrature.
    double energy_sublevel_volume(double level, int n_quad = 400) const;

    friend SteadyState build_polytrope(const PolytropeSpec& spec);
    friend SteadyState load_profile(const std::string& path);

private:
    void finish();

    PolytropeSpec spec_;
    double amplitude_ = 0, c_mu_ = 0, e0_ = 0, r_support_ = 0, rho_phase_ = 0, mass_ = 0;
    double poisson_residual_ = 0, rho_center_ = 0;
    HermiteTable phi_;
};

// exact |v|-shell constant: int_{R^3} (psi - |v|^2/2)_+^mu dv = c_mu psi^(mu+3/2)
double shell_constant(double mu);

SteadyState build_polytrope(const PolytropeSpec& spec);

void save_profile(const SteadyState& state, const std::string& path);
SteadyState load_profile(const std::string& path);

}  // namespace vplab
