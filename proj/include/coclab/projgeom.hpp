#pragma once

#include <vector>

#include "coclab/ext_real.hpp"
#include "coclab/matrix.hpp"

namespace coclab {

/// A line in R^d, stored as a sign-canonicalized unit representative: the
/// first coordinate exceeding 1e-14 in absolute value is made positive, so v
/// and -v map to the same stored value.
class proj_point {
  public:
    /// Build from any nonzero representative (normalized and canonicalized).
    explicit proj_point(std::vector<double> v);

    const std::vector<double>& rep() const { return rep_; }
    std::size_t dim() const { return rep_.size(); }

    /// Canonical basis line [e_i].
    static proj_point basis(std::size_t d, std::size_t i);
    /// Line in R^2 at the given angle from e_1.
    static proj_point from_angle(double theta);
    /// Angle in [0, pi) of a line in R^2.
    double angle() const;

    friend bool operator==(const proj_point& a, const proj_point& b) {
        return a.rep_ == b.rep_;
    }

  private:
    std::vector<double> rep_;
};

/// A line in the dual space (R^d)^*, same canonical storage as proj_point.
/// Determines the hyperplane H_y = P(ker f).
class dual_proj_point {
  public:
    explicit dual_proj_point(std::vector<double> f) : rep_(proj_point(std::move(f))) {}

    const std::vector<double>& rep() const { return rep_.rep(); }
    std::size_t dim() const { return rep_.dim(); }

    static dual_proj_point basis(std::size_t d, std::size_t i) {
        return dual_proj_point(proj_point::basis(d, i).rep());
    }

  private:
    proj_point rep_;
};

/// An invertible d x d matrix with its cached inverse and the size gauge
/// N(g) = max(||g||, ||g^-1||).
class group_element {
  public:
    explicit group_element(matrix entries);

    const matrix& entries() const { return entries_; }
    const matrix& inverse_entries() const { return inv_; }
    double norm_n() const { return norm_n_; }
    std::size_t dim() const { return entries_.dim(); }

  private:
    matrix entries_;
    matrix inv_;
    double norm_n_;
};

/// Projective action x -> [g v].
proj_point act(const group_element& g, const proj_point& x);

/// Norm cocycle sigma(g, x) = log(||g v|| / ||v||).
double cocycle(const group_element& g, const proj_point& x);

/// Sine of the angle between two lines; in [0, 1], zero iff equal.
double proj_distance(const proj_point& x, const proj_point& w);

/// delta(x, y) = |<f, v>| for unit representatives; the distance from x to
/// the hyperplane H_y.
double delta(const proj_point& x, const dual_proj_point& y);

/// log(|<f, g v>| / (||f|| ||v||)); tagged -inf when the pairing vanishes
/// exactly. Splits as cocycle(g, x) + log(delta(g x, y)).
ext_real log_coefficient(const group_element& g, const proj_point& v_dir,
                         const dual_proj_point& f_dir);

} // namespace coclab
