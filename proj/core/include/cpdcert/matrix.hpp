#ifndef CPDCERT_MATRIX_HPP
#define CPDCERT_MATRIX_HPP

#include <initializer_list>
#include <vector>

#include "cpdcert/errors.hpp"
#include "cpdcert/rational.hpp"

namespace cpdcert {

/// Dense row-major matrix over an exact rational (S = Rat) or floating
/// (S = double) scalar backend. Matrices are immutable values in spirit:
/// all operations return new matrices. Indices are 0-based here; the
/// 1-based convention of reports and multi-indices is applied at the API
/// boundaries that emit them.
template <class S>
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols)
        : rows_(rows), cols_(cols),
          data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), S(0)) {
        if (rows < 0 || cols < 0) throw domain_error("Matrix: negative dimension");
    }
    Matrix(std::initializer_list<std::initializer_list<S>> rows) {
        rows_ = static_cast<int>(rows.size());
        cols_ = rows_ ? static_cast<int>(rows.begin()->size()) : 0;
        data_.reserve(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_));
        for (const auto& r : rows) {
            if (static_cast<int>(r.size()) != cols_)
                throw domain_error("Matrix: ragged initializer");
            for (const auto& v : r) data_.push_back(v);
        }
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = S(1);
        return m;
    }

    static Matrix diagonal(const std::vector<S>& d) {
        const int n = static_cast<int>(d.size());
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
        return m;
    }

    static Matrix from_columns(const std::vector<std::vector<S>>& cols) {
        if (cols.empty()) return Matrix();
        const int r = static_cast<int>(cols.front().size());
        Matrix m(r, static_cast<int>(cols.size()));
        for (int j = 0; j < m.cols(); ++j) {
            if (static_cast<int>(cols[static_cast<std::size_t>(j)].size()) != r)
                throw domain_error("from_columns: ragged columns");
            for (int i = 0; i < r; ++i) m(i, j) = cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        }
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    S& operator()(int i, int j) {
        return data_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
                     static_cast<std::size_t>(j)];
    }
    const S& operator()(int i, int j) const {
        return data_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
                     static_cast<std::size_t>(j)];
    }

    std::vector<S> col(int j) const {
        std::vector<S> out(static_cast<std::size_t>(rows_));
        for (int i = 0; i < rows_; ++i) out[static_cast<std::size_t>(i)] = (*this)(i, j);
        return out;
    }
    std::vector<S> row(int i) const {
        std::vector<S> out(static_cast<std::size_t>(cols_));
        for (int j = 0; j < cols_; ++j) out[static_cast<std::size_t>(j)] = (*this)(i, j);
        return out;
    }

    /// Submatrix from 1-based row/column index lists (minor selection).
    Matrix select(const std::vector<int>& row_idx, const std::vector<int>& col_idx) const {
        Matrix out(static_cast<int>(row_idx.size()), static_cast<int>(col_idx.size()));
        for (int i = 0; i < out.rows(); ++i)
            for (int j = 0; j < out.cols(); ++j)
                out(i, j) = (*this)(row_idx[static_cast<std::size_t>(i)] - 1,
                                    col_idx[static_cast<std::size_t>(j)] - 1);
        return out;
    }

    /// Columns selected by 1-based indices, all rows kept.
    Matrix select_columns(const std::vector<int>& col_idx) const {
        Matrix out(rows_, static_cast<int>(col_idx.size()));
        for (int j = 0; j < out.cols(); ++j)
            for (int i = 0; i < rows_; ++i)
                out(i, j) = (*this)(i, col_idx[static_cast<std::size_t>(j)] - 1);
        return out;
    }

    Matrix transpose() const {
        Matrix out(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    Matrix operator*(const Matrix& rhs) const {
        if (cols_ != rhs.rows_) throw domain_error("Matrix product: inner dimension mismatch");
        Matrix out(rows_, rhs.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const S& a = (*this)(i, k);
                if (a == S(0)) continue;
                for (int j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
            }
        return out;
    }

    std::vector<S> operator*(const std::vector<S>& v) const {
        if (cols_ != static_cast<int>(v.size()))
            throw domain_error("Matrix-vector product: dimension mismatch");
        std::vector<S> out(static_cast<std::size_t>(rows_), S(0));
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j)
                out[static_cast<std::size_t>(i)] += (*this)(i, j) * v[static_cast<std::size_t>(j)];
        return out;
    }

    Matrix operator+(const Matrix& rhs) const {
        if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
            throw domain_error("Matrix sum: shape mismatch");
        Matrix out(rows_, cols_);
        for (std::size_t t = 0; t < data_.size(); ++t) out.data_[t] = data_[t] + rhs.data_[t];
        return out;
    }

    Matrix operator-(const Matrix& rhs) const {
        if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
            throw domain_error("Matrix difference: shape mismatch");
        Matrix out(rows_, cols_);
        for (std::size_t t = 0; t < data_.size(); ++t) out.data_[t] = data_[t] - rhs.data_[t];
        return out;
    }

    Matrix scaled(const S& s) const {
        Matrix out(rows_, cols_);
        for (std::size_t t = 0; t < data_.size(); ++t) out.data_[t] = data_[t] * s;
        return out;
    }

    bool operator==(const Matrix& rhs) const {
        return rows_ == rhs.rows_ && cols_ == rhs.cols_ && data_ == rhs.data_;
    }
    bool operator!=(const Matrix& rhs) const { return !(*this == rhs); }

    bool is_zero() const {
        for (const auto& v : data_)
            if (!(v == S(0))) return false;
        return true;
    }

    const std::vector<S>& flat() const { return data_; }
    std::vector<S>& flat() { return data_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<S> data_;
};

using RatMatrix = Matrix<Rat>;

/// Exact-to-float conversion (lossy only in the usual double sense).
inline Matrix<double> to_float(const Matrix<Rat>& m) {
    Matrix<double> out(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
    return out;
}

/// Exact lift of a float matrix; every double is a dyadic rational.
inline Matrix<Rat> to_exact(const Matrix<double>& m) {
    Matrix<Rat> out(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out(i, j) = rational_from_double(m(i, j));
    return out;
}

} // namespace cpdcert

#endif
