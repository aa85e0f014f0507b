#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "vplab/functionals.hpp"
#include "vplab/rearrangement.hpp"
#include "vplab/stationarity.hpp"

namespace vplab {

// Discretization floors of one (state, cloud) pair, measured once.
struct Floors {
    double energy = 0;        // |Delta H| along an invariant flow at s = 1
    double stationarity = 0;  // residual of fbar itself
    RearrangementFloor rearrangement;
    std::vector<double> levels;
};
Floors measure_floors(std::shared_ptr<const SteadyState> state, const Discretization& d,
                      const std::vector<HamiltonianField>& tests, int n_levels = 200);

// End state of one perturbation: forward images and backward values at s = 1.
struct PerturbedSample {
    HamiltonianField field;
    FlowSample end;
    GradNorms norms;
};
PerturbedSample perturb(const HamiltonianField& H, const Discretization& d);

struct LowerBound {
    double delta_energy = 0;
    double l1 = 0;
    double l1_sq = 0;
    double ratio = 0;   // Delta H / l1^2
    double k0_hat = 0;  // l1^2 / Delta H
    bool ratio_defined = false;  // Delta H above 10 energy floors
    double defect = 0;
    double rearranged_l1 = 0;
    double barycenter_error = 0;  // |Bar(end) - Bar(fbar)| / mass
    bool hypotheses_ok = false;   // equimeasurability within floor, barycenter matched
    bool positive = false;        // Delta H >= -energy floor
};
LowerBound check_lower_bound(const SteadyState& state, const PerturbedSample& p, const Discretization& d,
                             const Floors& floors, double barycenter_tol = 1e-6);

// | ||fbar - f_1|| - ||g|| | against G (G + S e^S), G = |grad H|_inf, S = |grad^2 H|_inf.
struct BracketComparison {
    double l1_distance = 0;
    double g_l1 = 0;
    double gap = 0;
    double log10_bound = 0;  // log10 of G (G + S e^S)
};
BracketComparison check_bracket_comparison(const SteadyState& state, const PerturbedSample& p,
                                           const Discretization& d);

// |D2(s) - D2(0)| over an s grid, paper form, against G^2 (G + S).
struct SecondVariationDeviation {
    std::vector<double> s;
    std::vector<double> deviation;
    double d2_zero = 0;
    double max_deviation = 0;
    double cubic_form = 0;
    double constant = 0;  // max_deviation / cubic_form
};
SecondVariationDeviation check_second_variation_deviation(const SteadyState& state, const HamiltonianField& H,
                                                          const std::vector<double>& s_grid,
                                                          const Discretization& d);

// ||grad^l u|| <= ||u||^(1 - l/m) ||grad^m u||^(l/m) on the embedding box
struct Interpolation {
    int l = 0, m = 0;
    double lhs = 0, rhs = 0, margin = 0;
};
Interpolation check_interpolation(const TrigSpectrum& u, int l, int m, int max_order = 32);

// ||u||_2^(1 + 2/n) against ||u||_1^(2/n) ||grad u||_2, n = 6
struct Nash {
    double l1 = 0, l2 = 0, grad_l2 = 0;
    double lhs = 0, rhs = 0;  // rhs without the constant
    double constant = 0;      // lhs / rhs
};
using FieldFn = std::function<double(const Phase&, Phase*)>;
Nash check_nash(const FieldFn& u, const QuadratureCloud& rule);
FieldFn field_fn(const HamiltonianField& H);

// sup_{B_R} |u| against ||grad^s u||_2 on the box, s > n/2
struct Sobolev {
    int order = 0;
    double radius = 0;
    double sup = 0, rhs = 0, constant = 0;
};
Sobolev check_sobolev(const HamiltonianField& H, int order, double radius, const QuadratureCloud& rule);

using Rational = boost::rational<long long>;
struct ChainExponents {
    int r = 0, n = 0, s = 0;
    Rational a1, a2;           // interpolation weights (r-s-2)/(r-1), (s+1)/(r-1)
    Rational nash;             // 1 + 2/n
    Rational eps_power;        // (1 + 3(s+1)/n)/(r-1)
    Rational h_exponent;       // 3(r-s-2)/(n(r-1)) + (r-2)/(r-1)
    Rational final_eps_power;  // eps_power + h_exponent - nash
    bool h_exceeds_nash = false;
};
ChainExponents exponent_calculator(int r, int n, int s);
std::string to_string(const Rational& q);

// A lambda sweep of one seeded field, with recentering at each lambda.
struct SweepPoint {
    double lambda = 0, amplitude = 0;
    GradNorms norms;
    LowerBound lower;
    BracketComparison bracket;
    SecondVariationDeviation deviation;
};
struct SweepFit {
    double l1 = 0, delta_energy = 0, gap = 0, deviation = 0;
    double ratio_spread = 0;  // relative spread of Delta H / l1^2 over the two smallest lambda
};
struct Sweep {
    std::uint64_t seed = 0;
    std::vector<SweepPoint> points;
    SweepFit fit;
};
struct SweepSpec {
    std::uint64_t seed = 1;
    int n_modes = 8;
    double max_wavenumber = 1.5;
    double base_amplitude = 0.003;
    std::vector<double> lambdas{0.1, 0.05, 0.02, 0.01};
    std::vector<double> s_grid{0.25, 0.5, 0.75, 1.0};
};
Sweep scaling_sweep(std::shared_ptr<const SteadyState> state, const SweepSpec& spec, const Discretization& d,
                    const Floors& floors);

// Desk-scale scan of the uniqueness statement.  Each seeded field is scaled so
// that its Sobolev budget (the W^{order,2} norm per unit box volume) equals eps.
struct ScanSpec {
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::vector<double> eps{0.1, 0.05, 0.02};
    int n_modes = 8;
    double max_wavenumber = 1.5;
    double k = 50;
    int budget_order = 22;
    double flow_tol = 1e-8;
};
double sobolev_budget(const HamiltonianField& H, int order);

struct ChainReport {
    std::uint64_t seed = 0;
    double eps = 0, amplitude = 0;
    AkCertificate ak;
    GradNorms norms;
    LowerBound lower;
    BracketComparison bracket;
    double stationarity = 0;      // residual of the end state
    double stationarity_floor = 0;
    double log10_chain_rhs = 0;   // k (G (G + S)^(1/2) + G^2 + G S e^S), log10
    double log10_chain_constant = 0;  // log10(|grad H|_1 / chain rhs)
    std::vector<Interpolation> interp;
    Nash nash;
    Sobolev sobolev;
    bool impostor = false;  // end state within 10 floors of stationary
};
std::vector<ChainReport> uniqueness_scan(std::shared_ptr<const SteadyState> state, const ScanSpec& spec,
                                         const Discretization& d, const Floors& floors,
                                         const std::vector<HamiltonianField>& tests);

}  // namespace vplab
