#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"

namespace matrec {

using cplx = std::complex<double>;

/// Dense row-major complex matrix with value semantics. Everything in this
/// library runs at desk scale, so there is no sparse or view machinery.
class complex_matrix {
public:
    complex_matrix() = default;

    complex_matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    static complex_matrix identity(std::size_t n) {
        complex_matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static complex_matrix scalar(cplx v) {
        complex_matrix m(1, 1);
        m(0, 0) = v;
        return m;
    }

    static complex_matrix from_rows(const std::vector<std::vector<cplx>>& rows) {
        if (rows.empty() || rows.front().empty()) {
            throw dimension_mismatch_error("matrix literal must have at least one row and column");
        }
        complex_matrix m(rows.size(), rows.front().size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != m.cols_) {
                throw dimension_mismatch_error("matrix literal rows must all have equal length");
            }
            for (std::size_t c = 0; c < m.cols_; ++c) m(r, c) = rows[r][c];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t entry_count() const { return data_.size(); }
    bool is_square() const { return rows_ == cols_; }
    bool is_scalar() const { return rows_ == 1 && cols_ == 1; }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<cplx>& data() const { return data_; }

    bool operator==(const complex_matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

/// Standard product, accumulated in a fixed row-major order so results are
/// reproducible bit for bit.
inline complex_matrix matmul(const complex_matrix& x, const complex_matrix& y) {
    if (x.cols() != y.rows()) {
        throw dimension_mismatch_error("matmul: inner dimensions differ (" +
                                       std::to_string(x.cols()) + " vs " +
                                       std::to_string(y.rows()) + ")");
    }
    complex_matrix out(x.rows(), y.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t c = 0; c < y.cols(); ++c) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < x.cols(); ++k) acc += x(i, k) * y(k, c);
            out(i, c) = acc;
        }
    }
    return out;
}

inline complex_matrix operator*(const complex_matrix& x, const complex_matrix& y) {
    return matmul(x, y);
}

/// Kronecker product: the (i,j) block of the result is x(i,j) * y. Result
/// size is guarded because it multiplies at every application.
inline complex_matrix kron(const complex_matrix& x, const complex_matrix& y,
                           std::size_t entry_budget = 10'000'000) {
    const std::size_t rows = x.rows() * y.rows();
    const std::size_t cols = x.cols() * y.cols();
    if (rows != 0 && (rows > entry_budget || cols > entry_budget / rows)) {
        throw size_overflow_error("kron result of " + std::to_string(rows) + "x" +
                                  std::to_string(cols) + " exceeds entry budget " +
                                  std::to_string(entry_budget));
    }
    complex_matrix out(rows, cols);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
            const cplx scale = x(i, c);
            for (std::size_t bi = 0; bi < y.rows(); ++bi) {
                for (std::size_t bc = 0; bc < y.cols(); ++bc) {
                    out(i * y.rows() + bi, c * y.cols() + bc) = scale * y(bi, bc);
                }
            }
        }
    }
    return out;
}

enum class norm_kind { frobenius, operator_norm };

inline const char* to_string(norm_kind k) {
    return k == norm_kind::frobenius ? "frobenius" : "operator";
}

/// sqrt(sum |x_ij|^2) = sqrt(Tr(X X^H)), scaled so entries near the
/// double-precision ceiling do not overflow in the squares.
inline double frobenius_norm(const complex_matrix& x) {
    double peak = 0.0;
    for (const cplx& v : x.data()) {
        peak = std::max({peak, std::abs(v.real()), std::abs(v.imag())});
    }
    if (peak == 0.0) return 0.0;
    double acc = 0.0;
    for (const cplx& v : x.data()) {
        const double re = v.real() / peak;
        const double im = v.imag() / peak;
        acc += re * re + im * im;
    }
    return peak * std::sqrt(acc);
}

namespace detail {

// One application of H = (X/f)^H (X/f) without forming H. Division keeps the
// scaling finite even when f is denormal, where 1/f would overflow.
inline void apply_gram(const complex_matrix& x, double scale, const std::vector<cplx>& v,
                       std::vector<cplx>& work, std::vector<cplx>& out) {
    const std::size_t rows = x.rows(), cols = x.cols();
    for (std::size_t i = 0; i < rows; ++i) {
        cplx acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += x(i, c) / scale * v[c];
        work[i] = acc;
    }
    for (std::size_t c = 0; c < cols; ++c) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < rows; ++i) acc += std::conj(x(i, c)) / scale * work[i];
        out[c] = acc;
    }
}

} // namespace detail

/// Largest singular value via power iteration on X^H X, matrix-free and
/// deterministic: the start vector is all-ones normalized, falling back to
/// the basis vector of the largest column when that start lies in the kernel.
/// The input is pre-scaled by its Frobenius norm, which keeps the dominant
/// eigenvalue of the Gram matrix in [1/rank, 1] and makes the residual test
/// effectively relative.
inline double operator_norm(const complex_matrix& x, double tol = 1e-12, int max_iter = 10'000) {
    const double f = frobenius_norm(x);
    if (f == 0.0 || x.entry_count() == 0) return 0.0;
    const std::size_t cols = x.cols();
    // The scaled Gram matrix has unit Frobenius mass, so its dominant
    // eigenvalue is at least 1/rank. Converging below that floor means the
    // start vector missed the dominant eigenspace.
    const double lambda_floor = 0.99 / static_cast<double>(std::min(x.rows(), cols));

    std::vector<cplx> v(cols, cplx(1.0 / std::sqrt(static_cast<double>(cols)), 0.0));
    std::vector<cplx> work(x.rows());
    std::vector<cplx> hv(cols);
    bool restarted = false;

    for (int iter = 0; iter < max_iter; ++iter) {
        detail::apply_gram(x, f, v, work, hv);
        double lambda = 0.0;
        for (std::size_t c = 0; c < cols; ++c) lambda += (std::conj(v[c]) * hv[c]).real();
        double residual = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            const cplx r = hv[c] - lambda * v[c];
            residual += std::norm(r);
        }
        residual = std::sqrt(residual);
        const bool converged = residual <= tol * std::max(1.0, lambda);
        if (converged && (lambda >= lambda_floor || restarted)) {
            return f * std::sqrt(std::max(lambda, 0.0));
        }
        double hv_norm = 0.0;
        for (const cplx& c : hv) hv_norm += std::norm(c);
        hv_norm = std::sqrt(hv_norm);
        if (hv_norm == 0.0 || converged) {
            // Deficient start: restart once from the heaviest column.
            if (restarted) return f * std::sqrt(std::max(lambda, 0.0));
            restarted = true;
            std::size_t best = 0;
            double best_norm = -1.0;
            for (std::size_t c = 0; c < cols; ++c) {
                double col = 0.0;
                for (std::size_t i = 0; i < x.rows(); ++i) col += std::norm(x(i, c) / f);
                if (col > best_norm) {
                    best_norm = col;
                    best = c;
                }
            }
            std::fill(v.begin(), v.end(), cplx(0.0, 0.0));
            v[best] = 1.0;
            continue;
        }
        for (std::size_t c = 0; c < cols; ++c) v[c] = hv[c] / hv_norm;
    }
    throw convergence_failure_error("operator norm power iteration did not reach residual " +
                                    std::to_string(tol) + " within " + std::to_string(max_iter) +
                                    " iterations");
}

inline double norm(const complex_matrix& x, norm_kind kind, double tol = 1e-12,
                   int max_iter = 10'000) {
    return kind == norm_kind::frobenius ? frobenius_norm(x) : operator_norm(x, tol, max_iter);
}

} // namespace matrec
