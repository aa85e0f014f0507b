#pragma once

#include <string>
#include <vector>

#include "vplab/cloud.hpp"
#include "vplab/radial_steady.hpp"

namespace vplab {

// Distribution function lambda(s) = |{f > s}| sampled on increasing levels,
// with the radius of the 6D ball of the same volume.
struct DistributionProfile {
    std::vector<double> levels;
    std::vector<double> measures;
    std::vector<double> radii;
};

// 0 followed by n geometric levels from top * smallest_ratio up to top.
std::vector<double> level_grid(double top, int n, double smallest_ratio = 1e-6);

double ball_volume_6d(double r);
double ball_radius_6d(double volume);

DistributionProfile distribution(const std::vector<double>& values, const std::vector<double>& weights,
                                 const std::vector<double>& levels);
// lambda of fbar by the radial level-measure quadrature
DistributionProfile steady_distribution(const SteadyState& state, const std::vector<double>& levels);

// int_0^top |lambda_a - lambda_b| ds, trapezoid on the level grid.  The grid
// must start at 0 and reach max(a, b).
double rearranged_l1_distance(const std::vector<double>& a, const std::vector<double>& b,
                              const std::vector<double>& weights, const std::vector<double>& levels);
// Same integral without a grid: both distribution functions are step
// functions, integrated exactly between merged breakpoints.
double rearranged_l1_exact(const std::vector<double>& a, const std::vector<double>& b,
                           const std::vector<double>& weights);

// sup over the levels of |lambda_a - lambda_b|
double equimeasurability_defect(const std::vector<double>& a, const std::vector<double>& b,
                                const std::vector<double>& weights, const std::vector<double>& levels);

// Quadrature error of the cloud on the level sets of fbar: the sup and the
// integral of |lambda_cloud - lambda_exact|.  Twice these bound the defect and
// the rearranged distance between two equimeasurable functions on the cloud.
struct RearrangementFloor {
    double defect = 0;
    double l1 = 0;
};
RearrangementFloor rearrangement_floor(const SteadyState& state, const QuadratureCloud& cloud,
                                       const std::vector<double>& levels);

// two columns: level, measure
void write_profile(const std::string& path, const DistributionProfile& p);

}  // namespace vplab
