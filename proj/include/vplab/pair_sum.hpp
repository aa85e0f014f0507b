#pragma once

#include <vector>

#include "vplab/numerics.hpp"

namespace vplab {

// Weighted points in space.  Pairs whose `group` entries agree are skipped
// when self-exclusion is requested (a point is always its own group when the
// vector is empty).  `soft` holds a per-point Plummer length; a pair uses
// h^2 = (h_a^2 + h_b^2) / 2.
struct PointSet {
    std::vector<Vec3> pos;
    std::vector<double> mass;
    std::vector<double> soft;
    std::vector<int> group;

    std::size_t size() const { return pos.size(); }
    void add(const Vec3& p, double m, double h, int g = -1);
};

struct PairSumOptions {
    enum class Method { direct, treecode };
    Method method = Method::direct;
    double theta = 0.5;  // treecode opening angle
    int leaf_size = 8;
    bool parallel = true;
};

// Softened kernel K_h(d) = -1 / (4 pi sqrt(|d|^2 + h^2)) and its gradient.
double softened_kernel(const Vec3& d, double h2);
Vec3 softened_kernel_grad(const Vec3& d, double h2);

// sum_j m_j K(t_i - s_j) for each target; with skip_self, pairs whose group ids
// agree are left out (ids default to the point index).
std::vector<double> potential_at(const PointSet& sources, const PointSet& targets, bool skip_self,
                                 const PairSumOptions& opt = {});
// gradient of the same sum with respect to the target position
std::vector<Vec3> field_at(const PointSet& sources, const PointSet& targets, bool skip_self,
                           const PairSumOptions& opt = {});

// 1/2 sum_{a, b in different groups} m_a m_b K(p_a - p_b)
double interaction_energy(const PointSet& pts, const PairSumOptions& opt = {});

}  // namespace vplab
