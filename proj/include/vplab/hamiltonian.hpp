#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "vplab/cloud.hpp"
#include "vplab/radial_steady.hpp"

namespace vplab {

// C^4 polynomial cut-off: 1 on t <= 0, 0 on t >= 1.
double cutoff(double t);
double cutoff_d1(double t);
double cutoff_d2(double t);

// Smooth cut-off multiplying every bumped component of a field.
//  energy_shell: 1 on {e <= e0}, 0 on {e >= e0 + margin |e0|}; requires a state.
//  phase_ball:   1 on |z| <= plateau, 0 on |z| >= 2 plateau.
//  none:         identically 1 (test-only; support is no longer compact).
struct BumpSpec {
    enum class Kind { energy_shell, phase_ball, none };
    Kind kind = Kind::energy_shell;
    double margin = 0.25;
    double plateau = 0.0;  // phase_ball; <= 0 means the state's phase-space radius
};

// Trigonometric atom c cos(k.z + theta) with k = 2 pi m / L.
struct Atom {
    std::array<int, 6> m{};
    double coeff = 0;
    double phase = 0;
};

struct BoxSpec {
    double length = 0;       // <= 0: 5 times the phase-space support radius
    int grid = 16;           // per-axis resolution of the spectral evaluation
    int max_order = 32;      // highest derivative order accepted
};

// E(e) = amplitude (cut - e)_+^5 with cut = e0 + margin |e0|.
struct EnergyProfile {
    double amplitude = 0;
    double margin = 0.1;
};

struct FieldOrigin {
    std::uint64_t seed = 0;
    int n_modes = 0;
    double max_wavenumber = 0;
    double amplitude = 0;
};

// H(z) = b(z) [ sum_atoms c cos(k.z + theta) + q |z|^2/2 + p.v ] + E(e(z)).
class HamiltonianField {
public:
    HamiltonianField() = default;
    HamiltonianField(std::shared_ptr<const SteadyState> state, BumpSpec bump, BoxSpec box = {});

    double value(const Phase& z) const;
    Phase gradient(const Phase& z) const;
    // any of grad / hess may be null
    double eval(const Phase& z, Phase* grad, Mat6* hess) const;

    // components
    void add_atom(const Atom& a) { atoms_.push_back(a); }
    void set_quadratic(double q) { quadratic_ = q; }
    void set_translation(const Vec3& p) { translation_ = p; }
    void set_energy_profile(const EnergyProfile& e) { energy_ = e; }

    const std::vector<Atom>& atoms() const { return atoms_; }
    double quadratic() const { return quadratic_; }
    const Vec3& translation() const { return translation_; }
    const std::optional<EnergyProfile>& energy_profile() const { return energy_; }
    const BumpSpec& bump() const { return bump_; }
    const BoxSpec& box() const { return box_; }
    double box_length() const { return box_length_; }
    const std::shared_ptr<const SteadyState>& state() const { return state_; }
    FieldOrigin origin;

    Phase wavevector(const Atom& a) const;
    bool is_zero() const;
    bool trig_only() const;  // no polynomial or energy component
    double support_radius() const;  // every point with |z| >= this has H = 0
    double energy_cut() const;      // energy_shell: H = 0 on {e >= cut}

    HamiltonianField scaled(double lambda) const;
    HamiltonianField plus(const HamiltonianField& other) const;  // same bump and box required

private:
    double bump(const Phase& z, Phase* grad, Mat6* hess) const;

    std::shared_ptr<const SteadyState> state_;
    BumpSpec bump_;
    BoxSpec box_;
    double box_length_ = 0;
    double plateau_ = 0;
    std::vector<Atom> atoms_;
    double quadratic_ = 0;
    Vec3 translation_{0, 0, 0};
    std::optional<EnergyProfile> energy_;
};

HamiltonianField sample_hamiltonian(std::shared_ptr<const SteadyState> state, std::uint64_t seed,
                                    int n_modes, double max_wavenumber, double amplitude,
                                    BumpSpec bump = {}, BoxSpec box = {});

HamiltonianField invariant_hamiltonian(std::shared_ptr<const SteadyState> state, const EnergyProfile& chi);

// {H, f}(z) = grad f . J grad H
double poisson_bracket(const HamiltonianField& H, const SteadyState& state, const Phase& z);
double poisson_bracket(const Phase& grad_f, const Phase& grad_h);

struct NormOptions {
    CloudSpec support_cloud;    // quadrature over supp H (energy_shell bump)
    int ball_n_rad = 16, ball_n_alpha = 8, ball_n_theta = 6, ball_n_phi = 12;  // phase_ball bump
    int refine_sweeps = 2;
    int golden_iters = 40;
};

struct GradNorms {
    double l1 = 0, l2 = 0, linf = 0, hess_linf = 0;
    double linf_refine_delta = 0, hess_refine_delta = 0;  // refined minus sampled maximum
};

// Quadrature rule covering supp H.
QuadratureCloud support_rule(const HamiltonianField& H, const NormOptions& opt = {});
GradNorms grad_norms(const HamiltonianField& H, const NormOptions& opt = {});
GradNorms grad_norms(const HamiltonianField& H, const QuadratureCloud& rule, const NormOptions& opt = {});

// Merged Fourier content of the trigonometric part on the periodic box.
struct TrigSpectrum {
    double box_length = 0;
    std::vector<std::array<int, 6>> modes;
    std::vector<std::complex<double>> amp;  // H = Re sum amp e^{i k.z}
    double norm(int order) const;           // || |xi|^order H ||_{L2(box)}
    TrigSpectrum derivative(int axis) const;
    bool single_mode() const { return modes.size() == 1; }
};
TrigSpectrum trig_spectrum(const HamiltonianField& H);

double spectral_norm(const HamiltonianField& H, int order);
// sum_{j <= order} ||grad^j H||^2, square-rooted
double sobolev_norm(const HamiltonianField& H, int order);
// ||grad^order H_trig||_{L2(box)} by a periodic grid quadrature (order 0 or 1)
double box_quadrature_norm(const HamiltonianField& H, int order);

struct AkCertificate {
    double l1_grad = 0, l1_bracket = 0, ratio = 0, k_threshold = 0;
    bool member = false;
    bool near_invariant = false;  // bracket below the noise floor: certificate unreliable
};
AkCertificate ak_certificate(const HamiltonianField& H, const SteadyState& state,
                             const QuadratureCloud& cloud, double k, double near_inv_floor = 1e-7);

}  // namespace vplab
