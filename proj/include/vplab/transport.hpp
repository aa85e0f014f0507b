#pragma once

#include <memory>
#include <string>
#include <vector>

#include "vplab/cloud.hpp"
#include "vplab/hamiltonian.hpp"

namespace vplab {

// Embedded Dormand-Prince 5(4).  Each step's error estimate, measured against
// tol (1 + |z|), is charged per unit of time so that tol bounds the summed
// local error over the whole flow.
struct FlowOptions {
    double tol = 1e-10;
    double h_init = 0.05;      // first trial step, in units of |s|
    double h_min = 1e-13;      // relative to |s|; smaller accepted steps are an error
    long max_steps = 200000;
    void validate() const;
};

struct FlowStats {
    long accepted = 0;
    long rejected = 0;
};

// Phi_s(z0) for dz/ds = J grad H(z).
Phase flow(const HamiltonianField& H, const Phase& z0, double s, const FlowOptions& opt = {},
           FlowStats* stats = nullptr);

struct FlowJacobian {
    Phase end{};
    Mat6 jac = Mat6::Identity();
};
// Flow together with its derivative, from dY/ds = J hess H(Phi_s) Y.
FlowJacobian flow_jacobian(const HamiltonianField& H, const Phase& z0, double s, const FlowOptions& opt = {},
                           FlowStats* stats = nullptr);

// |Phi_{-s}(Phi_s(z0)) - z0|
double reversibility_error(const HamiltonianField& H, const Phase& z0, double s, const FlowOptions& opt = {});

// f o Phi_{-s}
class PerturbedState {
public:
    PerturbedState(std::shared_ptr<const SteadyState> base, HamiltonianField field, double time,
                   FlowOptions opt = {});

    const SteadyState& base() const { return *base_; }
    const std::shared_ptr<const SteadyState>& base_ptr() const { return base_; }
    const HamiltonianField& field() const { return field_; }
    double time() const { return time_; }
    const FlowOptions& options() const { return opt_; }

    Phase backward(const Phase& z) const;  // Phi_{-s}(z)
    Phase forward(const Phase& z) const;   // Phi_s(z)
    double eval(const Phase& z) const;

private:
    std::shared_ptr<const SteadyState> base_;
    HamiltonianField field_;
    double time_;
    FlowOptions opt_;
};

double pushforward_eval(const PerturbedState& p, const Phase& z);

// Per node: backward value f(Phi_{-s} z_i) and forward image Phi_s(z_i), which
// carries the mass w_i fbar(z_i).
struct Pushforward {
    std::vector<double> values;
    std::vector<Phase> images;
    std::vector<double> masses;
    long steps = 0;
};
Pushforward pushforward_cloud(const PerturbedState& p, const QuadratureCloud& cloud, bool backward_values = true);
// single-threaded reference of the same computation
Pushforward pushforward_cloud_serial(const PerturbedState& p, const QuadratureCloud& cloud,
                                     bool backward_values = true);

std::vector<Phase> forward_images(const HamiltonianField& H, double s, const std::vector<Phase>& nodes,
                                  const FlowOptions& opt = {});
std::vector<Phase> forward_images_serial(const HamiltonianField& H, double s, const std::vector<Phase>& nodes,
                                         const FlowOptions& opt = {});

// Binary columnar dump of forward images.
//   bytes 0-7   magic "VPLFWD01"
//   bytes 8-15  uint64 node count n
//   then 8 columns of n little-endian doubles: x1 x2 x3 v1 v2 v3 mass value
void write_forward_dump(const std::string& path, const Pushforward& pf);
Pushforward read_forward_dump(const std::string& path);

}  // namespace vplab
