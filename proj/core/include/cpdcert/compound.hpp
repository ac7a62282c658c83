#ifndef CPDCERT_COMPOUND_HPP
#define CPDCERT_COMPOUND_HPP

#include <cstdint>
#include <vector>

#include "cpdcert/combinatorics.hpp"
#include "cpdcert/linalg.hpp"
#include "cpdcert/matrix.hpp"

namespace cpdcert {

/// C_k(A): all k x k minors of the source matrix, rows indexed by k-row
/// subsets and columns by k-column subsets, both in lexicographic order.
/// The source shape is kept so multi-index labels can be reconstructed.
template <class S>
struct CompoundMatrix {
    Matrix<S> data;
    int source_rows = 0;
    int source_cols = 0;
    int order = 0;

    std::vector<int> row_label(std::int64_t i, std::int64_t cap = kDefaultCap) const {
        return CombinadicTable(source_rows, order, cap).unrank(i);
    }
    std::vector<int> col_label(std::int64_t j, std::int64_t cap = kDefaultCap) const {
        return CombinadicTable(source_cols, order, cap).unrank(j);
    }
};

namespace detail {

/// One step of the last-column Laplace expansion: given the vector of all
/// (j-1)x(j-1) minors of an I x (j-1) matrix, produce the j x j minors of
/// the matrix extended by column x. Entry for row set S = (i_1..i_j):
///   sum_t (-1)^(j-1-t) x[i_t] * prev[S \ {i_t}]   (t = 0..j-1).
template <class S>
std::vector<S> phi_apply(const std::vector<S>& x, int j, const std::vector<S>& prev,
                         std::int64_t cap) {
    const int I = static_cast<int>(x.size());
    if (j == 1) return x;
    CombinadicTable to(I, j, cap);
    CombinadicTable from(I, j - 1, cap);
    std::vector<S> out(static_cast<std::size_t>(to.count()), S(0));
    std::vector<int> set = first_combination(j);
    std::vector<int> sub(static_cast<std::size_t>(j - 1));
    std::int64_t r = 0;
    do {
        S acc(0);
        for (int t = 0; t < j; ++t) {
            for (int u = 0, w = 0; u < j; ++u)
                if (u != t) sub[static_cast<std::size_t>(w++)] = set[static_cast<std::size_t>(u)];
            const S term = x[static_cast<std::size_t>(set[static_cast<std::size_t>(t)] - 1)] *
                           prev[static_cast<std::size_t>(from.rank(sub) - 1)];
            if ((j - 1 - t) % 2 == 0) acc += term;
            else acc -= term;
        }
        out[static_cast<std::size_t>(r++)] = acc;
    } while (next_combination(set, I));
    return out;
}

} // namespace detail

/// The Phi^{I,m} expansion map as an explicit C(I,m) x C(I,m-1) matrix:
/// C_m([A x]) = phi_map(x, m) * C_{m-1}(A) for every A in F^{I x (m-1)}.
/// Nonzero entries are entries of x up to sign, the sign convention being
/// fixed by expansion along the last column.
template <class S>
Matrix<S> phi_map(const std::vector<S>& x, int m, std::int64_t cap = kDefaultCap) {
    const int I = static_cast<int>(x.size());
    if (m < 1 || m > I) throw domain_error("phi_map: need 1 <= m <= I");
    if (m == 1) {
        Matrix<S> out(I, 1);
        for (int i = 0; i < I; ++i) out(i, 0) = x[static_cast<std::size_t>(i)];
        return out;
    }
    CombinadicTable rows(I, m, cap);
    CombinadicTable cols(I, m - 1, cap);
    if (rows.count() > cap / std::max<std::int64_t>(1, cols.count()))
        throw resource_error("phi_map: C(I,m) * C(I,m-1) entries exceed cap");
    Matrix<S> out(static_cast<int>(rows.count()), static_cast<int>(cols.count()));
    std::vector<int> set = first_combination(m);
    std::vector<int> sub(static_cast<std::size_t>(m - 1));
    std::int64_t r = 0;
    do {
        for (int t = 0; t < m; ++t) {
            for (int u = 0, w = 0; u < m; ++u)
                if (u != t) sub[static_cast<std::size_t>(w++)] = set[static_cast<std::size_t>(u)];
            const std::int64_t c = cols.rank(sub) - 1;
            const S v = x[static_cast<std::size_t>(set[static_cast<std::size_t>(t)] - 1)];
            out(static_cast<int>(r), static_cast<int>(c)) = ((m - 1 - t) % 2 == 0) ? v : S(0) - v;
        }
        ++r;
    } while (next_combination(set, I));
    return out;
}

/// k-th compound matrix. Minors are evaluated division-free by a prefix
/// DP over column subsets: the minor vectors of shared column prefixes are
/// computed once and extended one column at a time via the last-column
/// Laplace expansion, walking subsets in lexicographic order.
template <class S>
CompoundMatrix<S> compound(const Matrix<S>& a, int k, std::int64_t cap = kDefaultCap) {
    const int I = a.rows(), R = a.cols();
    if (k < 1 || k > I || k > R)
        throw domain_error("compound: need 1 <= k <= min(rows, cols)");
    const std::int64_t out_rows = binomial_checked(I, k, cap);
    const std::int64_t out_cols = binomial_checked(R, k, cap);
    if (out_rows > cap / std::max<std::int64_t>(1, out_cols))
        throw resource_error("compound: C(" + std::to_string(I) + "," + std::to_string(k) +
                             ") * C(" + std::to_string(R) + "," + std::to_string(k) +
                             ") entries exceed cap");
    CompoundMatrix<S> out;
    out.source_rows = I;
    out.source_cols = R;
    out.order = k;
    out.data = Matrix<S>(static_cast<int>(out_rows), static_cast<int>(out_cols));

    // DFS over increasing column tuples; stack[j] holds the minor vector of
    // the current prefix of length j+1.
    std::vector<std::vector<S>> stack(static_cast<std::size_t>(k));
    std::vector<int> prefix(static_cast<std::size_t>(k));
    std::int64_t col_out = 0;
    auto dfs = [&](auto&& self, int depth, int first) -> void {
        for (int c = first; c <= R - (k - depth - 1); ++c) {
            prefix[static_cast<std::size_t>(depth)] = c;
            const std::vector<S> xcol = a.col(c - 1);
            if (depth == 0) stack[0] = xcol;
            else stack[static_cast<std::size_t>(depth)] =
                detail::phi_apply(xcol, depth + 1, stack[static_cast<std::size_t>(depth - 1)], cap);
            if (depth + 1 == k) {
                const auto& minors = stack[static_cast<std::size_t>(depth)];
                for (std::int64_t i = 0; i < out_rows; ++i)
                    out.data(static_cast<int>(i), static_cast<int>(col_out)) =
                        minors[static_cast<std::size_t>(i)];
                ++col_out;
            } else {
                self(self, depth + 1, c + 1);
            }
        }
    };
    dfs(dfs, 0, 1);
    return out;
}

/// C_k(Diag(d)) is diagonal with the product vector on the diagonal, so
/// only the diagonal is returned.
template <class S>
std::vector<S> compound_diag(const std::vector<S>& d, int k, std::int64_t cap = kDefaultCap) {
    const int R = static_cast<int>(d.size());
    if (k < 1 || k > R) throw domain_error("compound_diag: k out of range");
    return product_vector(d, k, cap);
}

/// U_m = C_m(A) (Khatri-Rao) C_m(B), the matrix behind conditions (Cm),
/// (Um) and (Wm). Shape C(I,m)*C(J,m) x C(R,m).
template <class S>
Matrix<S> khatri_rao_compound(const Matrix<S>& a, const Matrix<S>& b, int m,
                              std::int64_t cap = kDefaultCap) {
    if (a.cols() != b.cols()) throw domain_error("khatri_rao_compound: column counts differ");
    if (m < 1 || m > std::min({a.rows(), b.rows(), a.cols()}))
        throw domain_error("khatri_rao_compound: need 1 <= m <= min(I, J, R)");
    const auto ca = compound(a, m, cap);
    const auto cb = compound(b, m, cap);
    const std::int64_t rows = static_cast<std::int64_t>(ca.data.rows()) * cb.data.rows();
    if (rows > cap || rows * ca.data.cols() > cap)
        throw resource_error("khatri_rao_compound: result exceeds cap");
    return khatri_rao(ca.data, cb.data);
}

/// Self-test oracle for the compound/Khatri-Rao vectorization identity
///   vec(C_k(B Diag(d) A^T)) = [C_k(A) kr C_k(B)] d-hat.
/// The two sides take independent code paths (matrix product + compound
/// of the product vs. compounds of the factors + product vector).
template <class S>
bool vec_compound_identity_check(const Matrix<S>& a, const Matrix<S>& b, const std::vector<S>& d,
                                 int k, const NumericOptions& opts = {}) {
    if (a.cols() != b.cols() || a.cols() != static_cast<int>(d.size()))
        throw domain_error("vec_compound_identity_check: shape mismatch");
    if (k < 1 || k > std::min({a.rows(), b.rows(), a.cols()}))
        throw domain_error("vec_compound_identity_check: k out of range");
    const Matrix<S> m = b * Matrix<S>::diagonal(d) * a.transpose();
    const auto lhs = vec(compound(m, k, opts.cap).data);
    const auto rhs = khatri_rao_compound(a, b, k, opts.cap) * product_vector(d, k, opts.cap);
    if (lhs.size() != rhs.size()) return false;
    std::vector<S> diff(lhs.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) diff[i] = lhs[i] - rhs[i];
    const double scale = std::max(inf_norm(lhs), inf_norm(rhs));
    for (const auto& v : diff)
        if (!scalar_is_zero(v, opts.tolerance, scale)) return false;
    return true;
}

} // namespace cpdcert

#endif
