#pragma once

#include <array>
#include <string>
#include <vector>

#include "vplab/radial_steady.hpp"

namespace vplab {

// Node layout of a phase-space quadrature cloud.
//  spherical: x = r w_x, v = u w_v with Gauss rules in a core-stretched radius,
//             in the speed (split at the escape speed of each shell), in cos(theta)
//             and a trapezoid in azimuth on both spheres.
//  tensor:    midpoint grid on the box around {e < energy cut}, pruned to it.
// The covered region is {e < e0 + energy_margin |e0|} when include_margin is set,
// otherwise supp f.
struct CloudSpec {
    std::string kind = "spherical";
    int n_r = 12;
    int n_r_margin = 3;
    int n_speed = 6;
    int n_speed_margin = 3;
    int n_theta = 3;
    int n_phi = 6;
    int n_theta_v = 3;
    int n_phi_v = 6;
    double core_stretch = 4.0;
    double energy_margin = 0.25;
    bool include_margin = true;
    int tensor_n = 12;
    double resolution_scale = 1.0;

    void validate() const;
    CloudSpec scaled(double factor) const;  // all counts times factor (rounded, >= 1)
};

// Radial layout of a spherical cloud: shells sit at the Gauss nodes t of each
// segment, r = scale sinh(stretch t) / sinh(stretch), or r = t when stretch is 0.
struct RadialSegment {
    double t0 = 0, t1 = 1;
    double scale = 1, stretch = 0;
    std::vector<double> t;  // Gauss nodes, ascending

    double radius(double tt) const;
    double param(double r) const;  // inverse of radius
};

struct QuadratureCloud {
    CloudSpec spec;
    double energy_cut = 0;          // upper energy of the covered region
    std::vector<Phase> nodes;
    std::vector<double> weights;    // 6D volume
    std::vector<double> fbar;       // steady density at the node
    std::vector<int> xcell;         // spatial node the phase node sits on
    std::vector<Vec3> xcell_pos;
    std::vector<double> xcell_volume;  // spatial quadrature weight of the cell
    // spherical clouds only: segments in increasing radius, and per spatial node
    // its segment and node index within it
    std::vector<RadialSegment> segments;
    std::vector<std::array<int, 2>> xcell_shell;

    std::size_t size() const { return nodes.size(); }
    std::size_t n_xcells() const { return xcell_pos.size(); }
    double total_volume() const;
    double mass() const;
};

QuadratureCloud build_cloud(const SteadyState& state, const CloudSpec& spec);

// 6D ball rule of radius `radius` in hyperspherical coordinates
// z = t (cos a w_1, sin a w_2).
QuadratureCloud build_ball_rule(double radius, int n_rad, int n_alpha, int n_theta, int n_phi);

// Product rule on the unit sphere: Gauss in cos(theta), trapezoid in azimuth.
struct SphereRule {
    std::vector<Vec3> dirs;
    std::vector<double> weights;  // sum = 4 pi
};
SphereRule sphere_rule(int n_theta, int n_phi, double azimuth_offset = 0.5);

}  // namespace vplab
