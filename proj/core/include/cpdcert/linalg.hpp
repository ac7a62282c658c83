#ifndef CPDCERT_LINALG_HPP
#define CPDCERT_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cpdcert/combinatorics.hpp"
#include "cpdcert/errors.hpp"
#include "cpdcert/matrix.hpp"

namespace cpdcert {

/// Shared numeric policy. `tolerance` only affects the float backend:
/// singular values below tolerance * sigma_max * max(rows, cols) count as
/// zero (and the same scale-relative rule is used for entry tests).
/// `cap` bounds every combinatorial size we agree to enumerate.
struct NumericOptions {
    double tolerance = 1e-10;
    std::int64_t cap = kDefaultCap;
};

template <class S>
struct RankReport {
    int rank = 0;
    std::vector<std::vector<S>> kernel_basis;
    std::vector<int> pivot_columns; // 1-based
};

namespace detail {

/// Fraction-free (Bareiss) forward elimination of an integer matrix.
/// Rows may be swapped and rank-deficient columns skipped; every division
/// is exact. Returns pivot column indices (0-based); the matrix is left in
/// echelon form with exact integer entries.
inline int bareiss_echelon(std::vector<std::vector<BigInt>>& m, std::vector<int>& pivots,
                           int* swaps = nullptr) {
    const int rows = static_cast<int>(m.size());
    const int cols = rows ? static_cast<int>(m.front().size()) : 0;
    BigInt prev = 1;
    int row = 0;
    pivots.clear();
    if (swaps) *swaps = 0;
    for (int col = 0; col < cols && row < rows; ++col) {
        int pr = -1;
        for (int i = row; i < rows; ++i)
            if (m[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)] != 0) { pr = i; break; }
        if (pr < 0) continue;
        if (pr != row) {
            std::swap(m[static_cast<std::size_t>(pr)], m[static_cast<std::size_t>(row)]);
            if (swaps) ++*swaps;
        }
        auto& prow = m[static_cast<std::size_t>(row)];
        for (int i = row + 1; i < rows; ++i) {
            auto& irow = m[static_cast<std::size_t>(i)];
            const BigInt head = irow[static_cast<std::size_t>(col)];
            for (int j = col + 1; j < cols; ++j) {
                BigInt t = prow[static_cast<std::size_t>(col)] * irow[static_cast<std::size_t>(j)] -
                           head * prow[static_cast<std::size_t>(j)];
                irow[static_cast<std::size_t>(j)] = t / prev;
            }
            irow[static_cast<std::size_t>(col)] = 0;
        }
        prev = prow[static_cast<std::size_t>(col)];
        pivots.push_back(col);
        ++row;
    }
    return row;
}

/// Clear denominators row by row so Bareiss can run over integers.
/// Row scaling changes neither rank nor null space.
inline std::vector<std::vector<BigInt>> integerize_rows(const Matrix<Rat>& m) {
    std::vector<std::vector<BigInt>> out(static_cast<std::size_t>(m.rows()),
                                         std::vector<BigInt>(static_cast<std::size_t>(m.cols())));
    for (int i = 0; i < m.rows(); ++i) {
        BigInt l = 1;
        for (int j = 0; j < m.cols(); ++j) {
            const BigInt den = denominator(m(i, j));
            l = lcm(l, den);
        }
        for (int j = 0; j < m.cols(); ++j) {
            const Rat v = m(i, j) * Rat(l);
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = numerator(v);
        }
    }
    return out;
}

} // namespace detail

/// Exact rank, null-space basis and pivot columns via fraction-free
/// Gaussian elimination; back substitution for the kernel runs over the
/// rationals on the integer echelon form.
inline RankReport<Rat> rank_report(const Matrix<Rat>& m, const NumericOptions& = {}) {
    RankReport<Rat> rep;
    auto e = detail::integerize_rows(m);
    std::vector<int> pivots;
    rep.rank = detail::bareiss_echelon(e, pivots);
    rep.pivot_columns.reserve(pivots.size());
    for (int p : pivots) rep.pivot_columns.push_back(p + 1);

    const int cols = m.cols();
    std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
    for (int p : pivots) is_pivot[static_cast<std::size_t>(p)] = true;
    for (int f = 0; f < cols; ++f) {
        if (is_pivot[static_cast<std::size_t>(f)]) continue;
        std::vector<Rat> v(static_cast<std::size_t>(cols), Rat(0));
        v[static_cast<std::size_t>(f)] = Rat(1);
        // Solve the echelon system for the pivot coordinates, bottom up.
        for (int t = rep.rank - 1; t >= 0; --t) {
            const auto& row = e[static_cast<std::size_t>(t)];
            const int p = pivots[static_cast<std::size_t>(t)];
            Rat acc(0);
            for (int j = p + 1; j < cols; ++j) {
                const auto& c = row[static_cast<std::size_t>(j)];
                if (c != 0 && !(v[static_cast<std::size_t>(j)] == Rat(0)))
                    acc += Rat(c) * v[static_cast<std::size_t>(j)];
            }
            v[static_cast<std::size_t>(p)] = -acc / Rat(row[static_cast<std::size_t>(p)]);
        }
        rep.kernel_basis.push_back(std::move(v));
    }
    return rep;
}

/// Numerical rank with the declared tolerance policy; kernel basis from
/// the right singular vectors, pivot columns from column-pivoted QR.
inline RankReport<double> rank_report(const Matrix<double>& m, const NumericOptions& opts = {}) {
    RankReport<double> rep;
    if (m.rows() == 0 || m.cols() == 0) {
        for (int j = 0; j < m.cols(); ++j) {
            std::vector<double> v(static_cast<std::size_t>(m.cols()), 0.0);
            v[static_cast<std::size_t>(j)] = 1.0;
            rep.kernel_basis.push_back(std::move(v));
        }
        return rep;
    }
    Eigen::MatrixXd em(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) em(i, j) = m(i, j);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(em, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    const double thresh = opts.tolerance * smax * std::max(m.rows(), m.cols());
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++r;
    rep.rank = r;
    const auto& V = svd.matrixV();
    for (int j = r; j < m.cols(); ++j) {
        std::vector<double> v(static_cast<std::size_t>(m.cols()));
        for (int i = 0; i < m.cols(); ++i) v[static_cast<std::size_t>(i)] = V(i, j);
        rep.kernel_basis.push_back(std::move(v));
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(em);
    const auto& perm = qr.colsPermutation().indices();
    std::vector<int> piv;
    for (int t = 0; t < r && t < perm.size(); ++t) piv.push_back(perm(t) + 1);
    std::sort(piv.begin(), piv.end());
    rep.pivot_columns = std::move(piv);
    return rep;
}

template <class S>
int rank(const Matrix<S>& m, const NumericOptions& opts = {}) {
    return rank_report(m, opts).rank;
}

/// Largest k such that every k-column subset is linearly independent;
/// 0 when a zero column is present. Subsets are tested in lexicographic
/// order for ascending k with early exit on the first dependent subset.
template <class S>
int k_rank(const Matrix<S>& m, const NumericOptions& opts = {}) {
    const int R = m.cols();
    if (R == 0) return 0;
    std::vector<int> all_rows(static_cast<std::size_t>(m.rows()));
    for (int i = 0; i < m.rows(); ++i) all_rows[static_cast<std::size_t>(i)] = i + 1;
    const int kmax = std::min(m.rows(), R);
    for (int k = 1; k <= kmax; ++k) {
        binomial_checked(R, k, opts.cap);
        std::vector<int> c = first_combination(k);
        while (true) {
            if (rank(m.select(all_rows, c), opts) < k) return k - 1;
            if (!next_combination(c, R)) break;
        }
    }
    return kmax;
}

template <class S>
std::vector<S> kron(const std::vector<S>& a, const std::vector<S>& b) {
    std::vector<S> out;
    out.reserve(a.size() * b.size());
    for (const auto& x : a)
        for (const auto& y : b) out.push_back(x * y);
    return out;
}

/// Columnwise Kronecker product; column r is kron(A[:,r], B[:,r]).
template <class S>
Matrix<S> khatri_rao(const Matrix<S>& a, const Matrix<S>& b) {
    if (a.cols() != b.cols()) throw domain_error("khatri_rao: column counts differ");
    Matrix<S> out(a.rows() * b.rows(), a.cols());
    for (int r = 0; r < a.cols(); ++r)
        for (int i = 0; i < a.rows(); ++i)
            for (int j = 0; j < b.rows(); ++j)
                out(i * b.rows() + j, r) = a(i, r) * b(j, r);
    return out;
}

/// Column-stacking vectorization.
template <class S>
std::vector<S> vec(const Matrix<S>& m) {
    std::vector<S> out;
    out.reserve(static_cast<std::size_t>(m.rows()) * static_cast<std::size_t>(m.cols()));
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i) out.push_back(m(i, j));
    return out;
}

/// Inverse of vec for a known shape.
template <class S>
Matrix<S> unvec(const std::vector<S>& v, int rows, int cols) {
    if (static_cast<int>(v.size()) != rows * cols) throw domain_error("unvec: length mismatch");
    Matrix<S> out(rows, cols);
    std::size_t t = 0;
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) out(i, j) = v[t++];
    return out;
}

inline bool scalar_is_zero(const Rat& v, double, double) { return v == 0; }
inline bool scalar_is_zero(double v, double tol, double scale) {
    return std::abs(v) <= tol * std::max(1.0, scale);
}

template <class S>
double inf_norm(const std::vector<S>& v) {
    double n = 0.0;
    for (const auto& x : v) {
        double a;
        if constexpr (std::is_same_v<S, double>) a = std::abs(x);
        else a = std::abs(to_double(x));
        n = std::max(n, a);
    }
    return n;
}

/// omega(d): nonzero count, tolerance-aware on the float backend.
template <class S>
int weight(const std::vector<S>& d, const NumericOptions& opts) {
    if constexpr (std::is_same_v<S, Rat>) {
        return weight(d);
    } else {
        const double scale = inf_norm(d);
        int w = 0;
        for (const auto& v : d)
            if (!scalar_is_zero(v, opts.tolerance, scale)) ++w;
        return w;
    }
}

template <class S>
bool vector_is_zero(const std::vector<S>& v, const NumericOptions& opts) {
    return weight(v, opts) == 0;
}

/// Ratio t with target = t * base, when it exists (t may be zero);
/// both-zero vectors count as proportional with t = 1.
template <class S>
std::optional<S> proportionality_ratio(const std::vector<S>& base, const std::vector<S>& target,
                                       const NumericOptions& opts = {}) {
    if (base.size() != target.size()) return std::nullopt;
    if constexpr (std::is_same_v<S, Rat>) {
        std::optional<Rat> t;
        for (std::size_t i = 0; i < base.size(); ++i) {
            if (base[i] == 0) {
                if (!(target[i] == 0)) return std::nullopt;
                continue;
            }
            Rat r = target[i] / base[i];
            if (!t) t = r;
            else if (*t != r) return std::nullopt;
        }
        if (!t) return Rat(1); // base was zero, target too
        return t;
    } else {
        double bb = 0.0, bt = 0.0, scale_b = 0.0, scale_t = 0.0;
        for (std::size_t i = 0; i < base.size(); ++i) {
            bb += base[i] * base[i];
            bt += base[i] * target[i];
            scale_b = std::max(scale_b, std::abs(base[i]));
            scale_t = std::max(scale_t, std::abs(target[i]));
        }
        if (scale_b <= opts.tolerance * std::max(1.0, scale_t)) {
            if (scale_t <= opts.tolerance) return 1.0;
            return std::nullopt;
        }
        const double t = bt / bb;
        for (std::size_t i = 0; i < base.size(); ++i) {
            const double resid = target[i] - t * base[i];
            if (std::abs(resid) > opts.tolerance * std::max(1.0, scale_t + std::abs(t) * scale_b))
                return std::nullopt;
        }
        return t;
    }
}

/// Any solution x of A x = b, or nullopt when inconsistent (exact).
std::optional<std::vector<Rat>> solve_consistent(const Matrix<Rat>& a, const std::vector<Rat>& b);

/// Float variant: least-squares solve accepted when the residual is small.
std::optional<std::vector<double>> solve_consistent(const Matrix<double>& a,
                                                    const std::vector<double>& b,
                                                    const NumericOptions& opts);

} // namespace cpdcert

#endif
