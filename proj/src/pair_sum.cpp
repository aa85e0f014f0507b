#include "vplab/pair_sum.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace vplab {

void PointSet::add(const Vec3& p, double m, double h, int g) {
    if (!group.empty() || g >= 0) {
        while (group.size() < pos.size()) group.push_back(static_cast<int>(group.size()));
        group.push_back(g >= 0 ? g : static_cast<int>(pos.size()));
    }
    pos.push_back(p);
    mass.push_back(m);
    soft.push_back(h);
}

double softened_kernel(const Vec3& d, double h2) {
    return -1.0 / (4.0 * kPi * std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + h2));
}

Vec3 softened_kernel_grad(const Vec3& d, double h2) {
    const double u = d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + h2;
    const double c = 1.0 / (4.0 * kPi * u * std::sqrt(u));
    return {c * d[0], c * d[1], c * d[2]};
}

namespace {

int group_of(const PointSet& p, std::size_t i) {
    return p.group.empty() ? static_cast<int>(i) : p.group[i];
}

void check(const PointSet& p) {
    if (p.mass.size() != p.size() || p.soft.size() != p.size() || (!p.group.empty() && p.group.size() != p.size()))
        throw std::invalid_argument("PointSet: inconsistent array lengths");
}

// Octree over the sources with cell-centred monopole + dipole moments.
struct Tree {
    struct Node {
        Vec3 center{};
        double half = 0;
        double mass = 0;
        Vec3 dipole{};      // sum m (s - center)
        double soft2 = 0;   // mean h^2 over the cell
        std::size_t begin = 0, end = 0;
        int child[8] = {-1, -1, -1, -1, -1, -1, -1, -1};
        bool leaf = true;
    };
    std::vector<Node> nodes;
    std::vector<std::size_t> order;
    const PointSet* src = nullptr;
    int leaf_size = 8;

    explicit Tree(const PointSet& s, int leaf) : src(&s), leaf_size(std::max(1, leaf)) {
        order.resize(s.size());
        std::iota(order.begin(), order.end(), 0);
        if (s.size() == 0) return;
        Vec3 lo = s.pos[0], hi = s.pos[0];
        for (const Vec3& p : s.pos)
            for (int d = 0; d < 3; ++d) {
                lo[d] = std::min(lo[d], p[d]);
                hi[d] = std::max(hi[d], p[d]);
            }
        Node root;
        double half = 0;
        for (int d = 0; d < 3; ++d) {
            root.center[d] = 0.5 * (lo[d] + hi[d]);
            half = std::max(half, 0.5 * (hi[d] - lo[d]));
        }
        root.half = half * (1 + 1e-12) + 1e-300;
        root.begin = 0;
        root.end = s.size();
        nodes.push_back(root);
        build(0, 0);
    }

    void build(int id, int depth) {
        Node n = nodes[id];
        double m = 0, h2 = 0;
        Vec3 dip{};
        for (std::size_t k = n.begin; k < n.end; ++k) {
            const std::size_t j = order[k];
            m += src->mass[j];
            h2 += src->soft[j] * src->soft[j];
            for (int d = 0; d < 3; ++d) dip[d] += src->mass[j] * (src->pos[j][d] - n.center[d]);
        }
        n.mass = m;
        n.dipole = dip;
        n.soft2 = h2 / static_cast<double>(n.end - n.begin);
        const std::size_t count = n.end - n.begin;
        if (count > static_cast<std::size_t>(leaf_size) && depth < 40) {
            n.leaf = false;
            // bucket by octant, stable to keep determinism
            std::vector<std::size_t> bucket[8];
            for (std::size_t k = n.begin; k < n.end; ++k) {
                const std::size_t j = order[k];
                int oct = 0;
                for (int d = 0; d < 3; ++d)
                    if (src->pos[j][d] >= n.center[d]) oct |= 1 << d;
                bucket[oct].push_back(j);
            }
            std::size_t pos = n.begin;
            for (int o = 0; o < 8; ++o) {
                if (bucket[o].empty()) continue;
                Node c;
                c.half = 0.5 * n.half;
                for (int d = 0; d < 3; ++d) c.center[d] = n.center[d] + ((o >> d) & 1 ? c.half : -c.half);
                c.begin = pos;
                for (std::size_t j : bucket[o]) order[pos++] = j;
                c.end = pos;
                n.child[o] = static_cast<int>(nodes.size());
                nodes.push_back(c);
            }
            nodes[id] = n;
            for (int o = 0; o < 8; ++o)
                if (n.child[o] >= 0) build(n.child[o], depth + 1);
            return;
        }
        nodes[id] = n;
    }
};

struct Contribution {
    double phi = 0;
    Vec3 grad{};
};

void direct_into(const PointSet& src, const Vec3& t, double ht2, int tg, bool skip, std::size_t b,
                 std::size_t e, const std::size_t* idx, bool want_phi, bool want_grad, Contribution& out) {
    for (std::size_t k = b; k < e; ++k) {
        const std::size_t j = idx ? idx[k] : k;
        if (skip && group_of(src, j) == tg) continue;
        const Vec3 d = {t[0] - src.pos[j][0], t[1] - src.pos[j][1], t[2] - src.pos[j][2]};
        const double h2 = 0.5 * (ht2 + src.soft[j] * src.soft[j]);
        if (want_phi) out.phi += src.mass[j] * softened_kernel(d, h2);
        if (want_grad) {
            const Vec3 g = softened_kernel_grad(d, h2);
            for (int q = 0; q < 3; ++q) out.grad[q] += src.mass[j] * g[q];
        }
    }
}

void tree_into(const Tree& tr, int id, const Vec3& t, double ht2, int tg, bool skip, double theta, bool want_phi,
               bool want_grad, Contribution& out) {
    const Tree::Node& n = tr.nodes[id];
    const Vec3 r = {t[0] - n.center[0], t[1] - n.center[1], t[2] - n.center[2]};
    const double dist = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    // a cell may be used whole only if the target is outside it (so no self pair hides inside)
    const bool far = dist > std::sqrt(3.0) * n.half && 2.0 * n.half < theta * dist;
    if (far) {
        const double h2 = 0.5 * (ht2 + n.soft2);
        const double u = dist * dist + h2;
        const double c3 = 1.0 / (4.0 * kPi * u * std::sqrt(u));
        const double rd = r[0] * n.dipole[0] + r[1] * n.dipole[1] + r[2] * n.dipole[2];
        if (want_phi) out.phi += n.mass * (-1.0 / (4.0 * kPi * std::sqrt(u))) - c3 * rd;
        if (want_grad) {
            const double c5 = 3.0 * c3 / u;
            for (int q = 0; q < 3; ++q) out.grad[q] += n.mass * c3 * r[q] - (c3 * n.dipole[q] - c5 * r[q] * rd);
        }
        return;
    }
    if (n.leaf) {
        direct_into(*tr.src, t, ht2, tg, skip, n.begin, n.end, tr.order.data(), want_phi, want_grad, out);
        return;
    }
    for (int c : n.child)
        if (c >= 0) tree_into(tr, c, t, ht2, tg, skip, theta, want_phi, want_grad, out);
}

std::vector<Contribution> evaluate(const PointSet& src, const PointSet& tgt, bool skip_self,
                                   const PairSumOptions& opt, bool want_phi, bool want_grad) {
    check(src);
    check(tgt);
    if (skip_self && tgt.group.empty() && src.group.empty() && &src != &tgt && src.size() != tgt.size())
        throw std::invalid_argument("pair sum: self-exclusion without groups needs index-aligned sets");
    std::vector<Contribution> out(tgt.size());
    std::unique_ptr<Tree> tree;
    if (opt.method == PairSumOptions::Method::treecode) {
        if (!(opt.theta > 0 && opt.theta < 1.5)) throw std::invalid_argument("treecode theta must lie in (0, 1.5)");
        tree = std::make_unique<Tree>(src, opt.leaf_size);
    }
    const bool par = opt.parallel;
#pragma omp parallel for schedule(dynamic, 32) if (par)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(tgt.size()); ++i) {
        const double ht2 = tgt.soft[i] * tgt.soft[i];
        const int tg = group_of(tgt, static_cast<std::size_t>(i));
        if (tree) {
            if (!tree->nodes.empty())
                tree_into(*tree, 0, tgt.pos[i], ht2, tg, skip_self, opt.theta, want_phi, want_grad, out[i]);
        } else {
            direct_into(src, tgt.pos[i], ht2, tg, skip_self, 0, src.size(), nullptr, want_phi, want_grad, out[i]);
        }
    }
    return out;
}

}  // namespace

std::vector<double> potential_at(const PointSet& sources, const PointSet& targets, bool skip_self,
                                 const PairSumOptions& opt) {
    const auto c = evaluate(sources, targets, skip_self, opt, true, false);
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].phi;
    return out;
}

std::vector<Vec3> field_at(const PointSet& sources, const PointSet& targets, bool skip_self,
                           const PairSumOptions& opt) {
    const auto c = evaluate(sources, targets, skip_self, opt, false, true);
    std::vector<Vec3> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].grad;
    return out;
}

double interaction_energy(const PointSet& pts, const PairSumOptions& opt) {
    const std::vector<double> phi = potential_at(pts, pts, true, opt);
    double e = 0;
    for (std::size_t i = 0; i < phi.size(); ++i) e += pts.mass[i] * phi[i];
    return 0.5 * e;
}

}  // namespace vplab
