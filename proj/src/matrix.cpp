#include "coclab/matrix.hpp"

#include <cmath>
#include <utility>

#include "coclab/errors.hpp"

namespace coclab {

matrix::matrix(std::size_t d, std::vector<double> entries) : d_(d), a_(std::move(entries)) {
    if (a_.size() != d * d)
        throw dimension_error("matrix: entry count does not match dimension");
}

matrix matrix::identity(std::size_t d) {
    matrix m(d);
    for (std::size_t i = 0; i < d; ++i)
        m(i, i) = 1.0;
    return m;
}

matrix matrix::rotation2(double angle) {
    matrix m(2);
    const double c = std::cos(angle), s = std::sin(angle);
    m(0, 0) = c;
    m(0, 1) = -s;
    m(1, 0) = s;
    m(1, 1) = c;
    return m;
}

matrix matrix::diagonal(const std::vector<double>& diag) {
    matrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i)
        m(i, i) = diag[i];
    return m;
}

matrix matrix::operator*(const matrix& rhs) const {
    if (d_ != rhs.d_)
        throw dimension_error("matrix: dimension mismatch in product");
    matrix out(d_);
    for (std::size_t i = 0; i < d_; ++i)
        for (std::size_t k = 0; k < d_; ++k) {
            const double aik = (*this)(i, k);
            for (std::size_t j = 0; j < d_; ++j)
                out(i, j) += aik * rhs(k, j);
        }
    return out;
}

std::vector<double> matrix::apply(const std::vector<double>& v) const {
    std::vector<double> out(d_, 0.0);
    for (std::size_t i = 0; i < d_; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d_; ++j)
            acc += (*this)(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

matrix matrix::transposed() const {
    matrix out(d_);
    for (std::size_t i = 0; i < d_; ++i)
        for (std::size_t j = 0; j < d_; ++j)
            out(j, i) = (*this)(i, j);
    return out;
}

matrix matrix::inverse() const {
    const std::size_t d = d_;
    matrix work = *this;
    matrix inv = identity(d);
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t pivot = col;
        double best = std::fabs(work(col, col));
        for (std::size_t r = col + 1; r < d; ++r) {
            if (std::fabs(work(r, col)) > best) {
                best = std::fabs(work(r, col));
                pivot = r;
            }
        }
        if (best == 0.0 || !std::isfinite(best))
            throw singular_input_error("matrix: singular matrix has no inverse");
        if (pivot != col) {
            for (std::size_t j = 0; j < d; ++j) {
                std::swap(work(pivot, j), work(col, j));
                std::swap(inv(pivot, j), inv(col, j));
            }
        }
        const double scale = 1.0 / work(col, col);
        for (std::size_t j = 0; j < d; ++j) {
            work(col, j) *= scale;
            inv(col, j) *= scale;
        }
        for (std::size_t r = 0; r < d; ++r) {
            if (r == col)
                continue;
            const double f = work(r, col);
            if (f == 0.0)
                continue;
            for (std::size_t j = 0; j < d; ++j) {
                work(r, j) -= f * work(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

namespace {

// Power iteration for the largest eigenvalue of the PSD matrix A^T A.
double psd_power_iteration(const matrix& b, std::vector<double>& v) {
    const std::size_t d = b.dim();
    auto normalize = [&](std::vector<double>& w) {
        double nrm = 0.0;
        for (double x : w)
            nrm += x * x;
        nrm = std::sqrt(nrm);
        if (nrm == 0.0)
            return 0.0;
        for (double& x : w)
            x /= nrm;
        return nrm;
    };

    if (normalize(v) == 0.0)
        return 0.0;
    double lambda = 0.0;
    for (int it = 0; it < 100000; ++it) {
        std::vector<double> w = b.apply(v);
        double next = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            next += w[i] * v[i];
        if (normalize(w) == 0.0)
            return 0.0;
        v = std::move(w);
        if (it > 0 && std::fabs(next - lambda) <= 1e-12 * std::fabs(next))
            return next;
        lambda = next;
    }
    return lambda;
}

} // namespace

double matrix::opnorm() const {
    matrix b = transposed() * (*this);
    // Two deterministic starts guard against an unlucky orthogonal start.
    double best = 0.0;
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::vector<double> v(d_);
        for (std::size_t i = 0; i < d_; ++i)
            v[i] = attempt == 0 ? 1.0 + 0.137 * static_cast<double>(i)
                                : 1.0 - 0.311 * static_cast<double>(i % 3) +
                                      0.053 * static_cast<double>(i);
        const double lambda = psd_power_iteration(b, v);
        if (lambda > best)
            best = lambda;
    }
    return std::sqrt(std::fmax(best, 0.0));
}

double matrix::max_abs() const {
    double m = 0.0;
    for (double x : a_)
        m = std::fmax(m, std::fabs(x));
    return m;
}

} // namespace coclab
