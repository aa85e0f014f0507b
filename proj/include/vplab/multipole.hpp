#pragma once

#include <memory>
#include <vector>

#include "vplab/cloud.hpp"
#include "vplab/pair_sum.hpp"

namespace vplab {

// Poisson solve by spherical-harmonic expansion about the origin, truncated
// at degree l_max:
//   1/|x - y| ~ sum_{l <= l_max} r_<^l / r_>^(l+1) P_l(cos angle),
// exact in radius, band-limited in angle.  No softening is needed since the
// truncated kernel is bounded by (l_max + 1) / r_>.  A target at the same
// radius as a source takes the mean of the inner and outer forms, which is
// the symmetric derivative across the source shell.
class ShellExpansion {
public:
    ShellExpansion(const PointSet& sources, int l_max);

    int l_max() const { return l_max_; }
    // sum_k q_k K_L(y, x_k) with K_L = -k_L / (4 pi), plus its gradient in y
    void eval(const Vec3& y, double* phi, Vec3* grad) const;

    // truncated kernel between two points and its gradient in y
    static double kernel(const Vec3& x, const Vec3& y, int l_max, Vec3* grad_y = nullptr);

private:
    int l_max_ = 0;
    int ncomp_ = 0;
    std::vector<double> radius_;  // sorted source radii
    std::vector<double> inner_;   // (n+1) x ncomp prefix sums of q R(x)
    std::vector<double> outer_;   // (n+1) x ncomp suffix sums of q R(x) / r^(2l+1)
};

// l_max admissible for a spherical product rule with the given angular counts
// (the rule must integrate every harmonic up to that degree exactly).
int max_exact_degree(int n_theta, int n_phi);

// As the pair-sum entry points, with pairs in a common group left out.
std::vector<double> shell_potential_at(const PointSet& sources, const PointSet& targets, bool skip_group, int l_max);
std::vector<Vec3> shell_field_at(const PointSet& sources, const PointSet& targets, bool skip_group, int l_max);
// 1/2 sum over pairs in different groups of q_a q_b K_L(p_a, p_b)
double shell_interaction_energy(const PointSet& pts, int l_max);

class CloudPotential;

// Poisson solve for charges sitting on the spatial nodes of a spherical cloud.
// Angularly as the shell expansion; radially the per-shell moments are
// interpolated on each segment's Gauss nodes and integrated against
// r_<^l / r_>^(l+1) exactly, split at the kink.  Pairing the shells as points
// instead leaves an error of first order in the shell spacing.
class CloudPoisson {
public:
    // tables for every degree up to l_max
    CloudPoisson(const QuadratureCloud& cloud, int l_max, int grid_per_segment = 128);

    int l_max() const;
    std::size_t n_cells() const;
    // charges per spatial node; l_max < 0 uses the full degree of the tables
    CloudPotential solve(const std::vector<double>& charges, int l_max = -1) const;

    struct Tables;

private:
    std::shared_ptr<const Tables> t_;
};

class CloudPotential {
public:
    // potential and field at the spatial nodes; the potential there comes from
    // the symmetrized radial operator, so 1/2 sum q phi is a symmetric form
    const std::vector<double>& cell_phi() const { return phi_; }
    const std::vector<Vec3>& cell_grad() const { return grad_; }
    double energy() const;
    // anywhere, by Hermite interpolation of the radial profiles
    void eval(const Vec3& y, double* phi, Vec3* grad) const;

private:
    friend class CloudPoisson;
    std::shared_ptr<const CloudPoisson::Tables> t_;
    int l_max_ = 0;
    std::vector<double> charges_;
    std::vector<double> phi_;
    std::vector<Vec3> grad_;
    std::vector<double> psi_, dpsi_;  // reduced profiles on the grid, ncomp per grid point
};

}  // namespace vplab
