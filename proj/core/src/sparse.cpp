#include "isosum/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "isosum/errors.hpp"

namespace isosum {

DenseMatrix::DenseMatrix(std::int64_t rows, std::int64_t cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), fill) {}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::int64_t r = 0; r < rows_; ++r) {
        for (std::int64_t c = 0; c < cols_; ++c) {
            t(c, r) = (*this)(r, c);
        }
    }
    return t;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
        throw ArgumentError("DenseMatrix: shape mismatch in +=");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += o.data_[i];
    }
    return *this;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols_ != b.rows_) {
        throw ArgumentError("DenseMatrix: shape mismatch in product");
    }
    DenseMatrix c(a.rows_, b.cols_);
    for (std::int64_t i = 0; i < a.rows_; ++i) {
        for (std::int64_t k = 0; k < a.cols_; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) {
                continue;
            }
            for (std::int64_t j = 0; j < b.cols_; ++j) {
                c(i, j) += aik * b(k, j);
            }
        }
    }
    return c;
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::int64_t ia = 0; ia < a.rows(); ++ia) {
        for (std::int64_t ja = 0; ja < a.cols(); ++ja) {
            const double s = a(ia, ja);
            for (std::int64_t ib = 0; ib < b.rows(); ++ib) {
                for (std::int64_t jb = 0; jb < b.cols(); ++jb) {
                    k(ia * b.rows() + ib, ja * b.cols() + jb) = s * b(ib, jb);
                }
            }
        }
    }
    return k;
}

DenseMatrix identity_matrix(std::int64_t n) {
    DenseMatrix id(n, n);
    for (std::int64_t i = 0; i < n; ++i) {
        id(i, i) = 1.0;
    }
    return id;
}

double max_abs_difference(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ArgumentError("max_abs_difference: shape mismatch");
    }
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    }
    return m;
}

SparseMatrix::SparseMatrix(std::shared_ptr<const SparsityPattern> pattern)
    : pattern_(std::move(pattern)), values_(static_cast<std::size_t>(pattern_->nnz()), 0.0) {}

SparseMatrix::SparseMatrix(std::shared_ptr<const SparsityPattern> pattern, std::vector<double> values)
    : pattern_(std::move(pattern)), values_(std::move(values)) {
    if (static_cast<std::int64_t>(values_.size()) != pattern_->nnz()) {
        throw ArgumentError("SparseMatrix: values not aligned with pattern");
    }
}

double SparseMatrix::at(std::int64_t row, std::int64_t col) const {
    const std::int64_t s = pattern_->find(row, col);
    return s < 0 ? 0.0 : values_[static_cast<std::size_t>(s)];
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
    if (static_cast<std::int64_t>(x.size()) != cols()) {
        throw ArgumentError("SparseMatrix::multiply: vector length mismatch");
    }
    std::vector<double> y(static_cast<std::size_t>(rows()), 0.0);
    const auto rp = pattern_->row_ptr();
    const auto ci = pattern_->col_idx();
    for (std::int64_t r = 0; r < rows(); ++r) {
        double s = 0.0;
        for (std::int64_t k = rp[static_cast<std::size_t>(r)]; k < rp[static_cast<std::size_t>(r) + 1]; ++k) {
            s += values_[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(ci[static_cast<std::size_t>(k)])];
        }
        y[static_cast<std::size_t>(r)] = s;
    }
    return y;
}

double SparseMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const double v : values_) {
        s += v * v;
    }
    return std::sqrt(s);
}

DenseMatrix SparseMatrix::to_dense() const {
    DenseMatrix d(rows(), cols());
    const auto rp = pattern_->row_ptr();
    const auto ci = pattern_->col_idx();
    for (std::int64_t r = 0; r < rows(); ++r) {
        for (std::int64_t k = rp[static_cast<std::size_t>(r)]; k < rp[static_cast<std::size_t>(r) + 1]; ++k) {
            d(r, ci[static_cast<std::size_t>(k)]) = values_[static_cast<std::size_t>(k)];
        }
    }
    return d;
}

SparseMatrix& SparseMatrix::operator+=(const SparseMatrix& o) {
    if (pattern_ != o.pattern_) {
        throw ArgumentError("SparseMatrix: += requires a shared pattern");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] += o.values_[i];
    }
    return *this;
}

double relative_frobenius_distance(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ArgumentError("relative_frobenius_distance: shape mismatch");
    }
    double diff = 0.0;
    const auto& pa = a.pattern();
    const auto& pb = b.pattern();
    for (std::int64_t r = 0; r < a.rows(); ++r) {
        auto ka = pa.row_ptr()[static_cast<std::size_t>(r)];
        auto kb = pb.row_ptr()[static_cast<std::size_t>(r)];
        const auto ea = pa.row_ptr()[static_cast<std::size_t>(r) + 1];
        const auto eb = pb.row_ptr()[static_cast<std::size_t>(r) + 1];
        while (ka < ea || kb < eb) {
            const std::int64_t ca = ka < ea ? pa.col_idx()[static_cast<std::size_t>(ka)] : INT64_MAX;
            const std::int64_t cb = kb < eb ? pb.col_idx()[static_cast<std::size_t>(kb)] : INT64_MAX;
            double va = 0.0;
            double vb = 0.0;
            if (ca <= cb) {
                va = a.values()[static_cast<std::size_t>(ka++)];
            }
            if (cb <= ca) {
                vb = b.values()[static_cast<std::size_t>(kb++)];
            }
            diff += (va - vb) * (va - vb);
        }
    }
    const double nb = b.frobenius_norm();
    return nb > 0.0 ? std::sqrt(diff) / nb : std::sqrt(diff);
}

double relative_frobenius_distance(const SparseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ArgumentError("relative_frobenius_distance: shape mismatch");
    }
    const DenseMatrix da = a.to_dense();
    double diff = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < da.data().size(); ++i) {
        const double e = da.data()[i] - b.data()[i];
        diff += e * e;
        nb += b.data()[i] * b.data()[i];
    }
    return nb > 0.0 ? std::sqrt(diff / nb) : std::sqrt(diff);
}

double symmetry_defect(const SparseMatrix& a) {
    if (a.rows() != a.cols()) {
        throw ArgumentError("symmetry_defect: matrix is not square");
    }
    double diff = 0.0;
    const auto& p = a.pattern();
    for (std::int64_t r = 0; r < a.rows(); ++r) {
        for (auto k = p.row_ptr()[static_cast<std::size_t>(r)]; k < p.row_ptr()[static_cast<std::size_t>(r) + 1]; ++k) {
            const auto c = p.col_idx()[static_cast<std::size_t>(k)];
            const double e = a.values()[static_cast<std::size_t>(k)] - a.at(c, r);
            diff += e * e;
        }
    }
    const double n = a.frobenius_norm();
    return n > 0.0 ? std::sqrt(diff) / n : std::sqrt(diff);
}

double relative_l2_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ArgumentError("relative_l2_distance: length mismatch");
    }
    double diff = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        nb += b[i] * b[i];
    }
    return nb > 0.0 ? std::sqrt(diff / nb) : std::sqrt(diff);
}

}  // namespace isosum
