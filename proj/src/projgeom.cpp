#include "coclab/projgeom.hpp"

#include <cmath>
#include <numbers>

#include "coclab/errors.hpp"

namespace coclab {

namespace {

constexpr double kSignZeroThreshold = 1e-14;

void normalize_and_canonicalize(std::vector<double>& v) {
    double nrm = 0.0;
    for (double x : v)
        nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0 || !std::isfinite(nrm))
        throw singular_input_error("proj_point: zero or non-finite representative");
    for (double& x : v)
        x /= nrm;
    for (double x : v) {
        if (std::fabs(x) > kSignZeroThreshold) {
            if (x < 0.0)
                for (double& y : v)
                    y = -y;
            break;
        }
    }
}

} // namespace

proj_point::proj_point(std::vector<double> v) : rep_(std::move(v)) {
    if (rep_.empty())
        throw dimension_error("proj_point: empty representative");
    normalize_and_canonicalize(rep_);
}

proj_point proj_point::basis(std::size_t d, std::size_t i) {
    std::vector<double> v(d, 0.0);
    v.at(i) = 1.0;
    return proj_point(std::move(v));
}

proj_point proj_point::from_angle(double theta) {
    return proj_point({std::cos(theta), std::sin(theta)});
}

double proj_point::angle() const {
    if (rep_.size() != 2)
        throw dimension_error("proj_point: angle is defined on P^1 only");
    double a = std::atan2(rep_[1], rep_[0]);
    if (a < 0.0)
        a += std::numbers::pi;
    if (a >= std::numbers::pi)
        a -= std::numbers::pi;
    return a;
}

group_element::group_element(matrix entries)
    : entries_(std::move(entries)), inv_(entries_.inverse()) {
    // Invariant: entries * inv = identity within 1e-10 relative error.
    const matrix prod = entries_ * inv_;
    const double scale = std::fmax(1.0, entries_.max_abs() * inv_.max_abs());
    for (std::size_t i = 0; i < prod.dim(); ++i)
        for (std::size_t j = 0; j < prod.dim(); ++j) {
            const double target = i == j ? 1.0 : 0.0;
            if (std::fabs(prod(i, j) - target) > 1e-10 * scale)
                throw singular_input_error(
                    "group_element: matrix is numerically singular (inverse check failed)");
        }
    norm_n_ = std::fmax(entries_.opnorm(), inv_.opnorm());
}

proj_point act(const group_element& g, const proj_point& x) {
    return proj_point(g.entries().apply(x.rep()));
}

double cocycle(const group_element& g, const proj_point& x) {
    const std::vector<double> w = g.entries().apply(x.rep());
    double nrm2 = 0.0;
    for (double c : w)
        nrm2 += c * c;
    return 0.5 * std::log(nrm2);
}

double proj_distance(const proj_point& x, const proj_point& w) {
    // Wedge-product form of the sine: sqrt(sum_{i<j} (x_i w_j - x_j w_i)^2).
    // Equals sqrt(1 - <x,w>^2) for unit vectors but stays exact near zero.
    const auto& a = x.rep();
    const auto& b = w.rep();
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const double c = a[i] * b[j] - a[j] * b[i];
            s += c * c;
        }
    return std::fmin(std::sqrt(s), 1.0);
}

double delta(const proj_point& x, const dual_proj_point& y) {
    double ip = 0.0;
    for (std::size_t i = 0; i < x.rep().size(); ++i)
        ip += x.rep()[i] * y.rep()[i];
    return std::fmin(std::fabs(ip), 1.0);
}

ext_real log_coefficient(const group_element& g, const proj_point& v_dir,
                         const dual_proj_point& f_dir) {
    const std::vector<double> gv = g.entries().apply(v_dir.rep());
    double pairing = 0.0;
    for (std::size_t i = 0; i < gv.size(); ++i)
        pairing += f_dir.rep()[i] * gv[i];
    if (pairing == 0.0)
        return ext_real::neg_inf();
    return ext_real(std::log(std::fabs(pairing)));
}

} // namespace coclab
