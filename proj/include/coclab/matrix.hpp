#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace coclab {

/// Small dense d x d real matrix, row-major. Sized for group elements of the
/// walk (d is 2 in the spectral module, single digits elsewhere).
class matrix {
  public:
    matrix() = default;
    explicit matrix(std::size_t d) : d_(d), a_(d * d, 0.0) {}
    matrix(std::size_t d, std::vector<double> entries);

    static matrix identity(std::size_t d);
    /// 2x2 rotation by angle (radians).
    static matrix rotation2(double angle);
    /// Diagonal matrix from entries.
    static matrix diagonal(const std::vector<double>& diag);

    std::size_t dim() const { return d_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * d_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * d_ + j]; }
    const std::vector<double>& data() const { return a_; }

    matrix operator*(const matrix& rhs) const;
    std::vector<double> apply(const std::vector<double>& v) const;
    matrix transposed() const;

    /// Inverse by Gauss-Jordan with partial pivoting. Throws
    /// singular_input_error when the pivot collapses.
    matrix inverse() const;

    /// Operator (spectral) norm via power iteration on A^T A, relative
    /// tolerance 1e-12.
    double opnorm() const;

    double max_abs() const;

  private:
    std::size_t d_ = 0;
    std::vector<double> a_;
};

} // namespace coclab
