#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vplab {

// Phase point (x1,x2,x3,v1,v2,v3).
using Phase = std::array<double, 6>;
using Vec3 = std::array<double, 3>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

inline constexpr double kPi = 3.14159265358979323846;

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

// Gauss-Legendre rule mapped to [a, b].
GaussRule gauss_legendre(int n, double a, double b);

// Hermite interpolant on a strictly increasing grid with prescribed node
// slopes.  Cubic by default, with slopes limited (Fritsch-Carlson) where the
// data are monotone.  Given node second derivatives as well, the interpolant
// is the C^2 quintic Hermite spline.
class HermiteTable {
public:
    HermiteTable() = default;
    HermiteTable(std::vector<double> x, std::vector<double> y, std::vector<double> dy,
                 bool limit_monotone = true);
    HermiteTable(std::vector<double> x, std::vector<double> y, std::vector<double> dy,
                 std::vector<double> d2y);

    double value(double x) const;
    // value and first derivative of the interpolant
    void eval(double x, double& y, double& dy) const;
    void eval(double x, double& y, double& dy, double& d2y) const;

    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }
    const std::vector<double>& dy() const { return dy_; }
    const std::vector<double>& d2y() const { return d2y_; }
    bool quintic() const { return !d2y_.empty(); }
    bool empty() const { return x_.empty(); }

private:
    std::size_t locate(double x) const;
    void check_grid();

    std::vector<double> x_, y_, dy_, d2y_;
    double uniform_h_ = 0.0;  // > 0 when all cells but the last have equal width
};

// Least-squares slope of log|y| against log|x|.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace vplab
