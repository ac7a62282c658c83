#ifndef CPDCERT_TENSOR_HPP
#define CPDCERT_TENSOR_HPP

#include <optional>
#include <vector>

#include "cpdcert/detail/assignment.hpp"
#include "cpdcert/linalg.hpp"
#include "cpdcert/matrix.hpp"

namespace cpdcert {

/// Dense third-order tensor. Entry t_{ijk} (1-based paper indexing) sits
/// at flat position (i-1)JK + (j-1)K + k, so the flat layout coincides
/// with the vectorization convention.
template <class S>
struct Tensor3 {
    int I = 0, J = 0, K = 0;
    std::vector<S> entries;

    Tensor3() = default;
    Tensor3(int i, int j, int k)
        : I(i), J(j), K(k),
          entries(static_cast<std::size_t>(i) * static_cast<std::size_t>(j) *
                      static_cast<std::size_t>(k),
                  S(0)) {}

    S& at(int i, int j, int k) { // 0-based accessors
        return entries[(static_cast<std::size_t>(i) * static_cast<std::size_t>(J) +
                        static_cast<std::size_t>(j)) * static_cast<std::size_t>(K) +
                       static_cast<std::size_t>(k)];
    }
    const S& at(int i, int j, int k) const {
        return entries[(static_cast<std::size_t>(i) * static_cast<std::size_t>(J) +
                        static_cast<std::size_t>(j)) * static_cast<std::size_t>(K) +
                       static_cast<std::size_t>(k)];
    }

    Tensor3 operator+(const Tensor3& o) const {
        if (I != o.I || J != o.J || K != o.K) throw domain_error("Tensor3 sum: shape mismatch");
        Tensor3 out(I, J, K);
        for (std::size_t t = 0; t < entries.size(); ++t) out.entries[t] = entries[t] + o.entries[t];
        return out;
    }
    bool operator==(const Tensor3& o) const {
        return I == o.I && J == o.J && K == o.K && entries == o.entries;
    }
};

/// A polyadic decomposition [A, B, C]_R given by its factor matrices.
/// R is the declared number of terms, not necessarily the tensor rank.
template <class S>
struct FactorTriple {
    Matrix<S> a, b, c;

    int terms() const { return a.cols(); }
    void validate() const {
        if (a.cols() != b.cols() || a.cols() != c.cols())
            throw domain_error("FactorTriple: factor matrices must share the column count R");
    }
};

/// t_{ijk} = sum_r a_{ir} b_{jr} c_{kr}.
template <class S>
Tensor3<S> build_tensor(const FactorTriple<S>& f) {
    f.validate();
    const int I = f.a.rows(), J = f.b.rows(), K = f.c.rows(), R = f.terms();
    Tensor3<S> t(I, J, K);
    for (int r = 0; r < R; ++r)
        for (int i = 0; i < I; ++i) {
            const S& ai = f.a(i, r);
            if (ai == S(0)) continue;
            for (int j = 0; j < J; ++j) {
                const S ab = ai * f.b(j, r);
                if (ab == S(0)) continue;
                for (int k = 0; k < K; ++k) t.at(i, j, k) += ab * f.c(k, r);
            }
        }
    return t;
}

/// IJ x K unfolding: entry ((i-1)J + j, k) = t_{ijk}. Satisfies
/// matricize(build_tensor([A,B,C])) = (A kr B) C^T.
template <class S>
Matrix<S> matricize(const Tensor3<S>& t) {
    Matrix<S> out(t.I * t.J, t.K);
    for (int i = 0; i < t.I; ++i)
        for (int j = 0; j < t.J; ++j)
            for (int k = 0; k < t.K; ++k) out(i * t.J + j, k) = t.at(i, j, k);
    return out;
}

/// Inverse relayout of matricize for known mode sizes.
template <class S>
Tensor3<S> dematricize(const Matrix<S>& m, int I, int J) {
    if (m.rows() != I * J) throw domain_error("dematricize: row count is not I*J");
    Tensor3<S> t(I, J, m.cols());
    for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j)
            for (int k = 0; k < m.cols(); ++k) t.at(i, j, k) = m(i * J + j, k);
    return t;
}

/// Flat vector of length IJK; a rank-1 tensor maps to a kron b kron c.
template <class S>
std::vector<S> vectorize_tensor(const Tensor3<S>& t) {
    return t.entries;
}

/// Result of testing two decompositions for equality up to the trivial
/// indeterminacies. permutation[s] = r means column s of the second triple
/// corresponds to column r of the first (both 1-based); the three scaling
/// vectors are per-column with entrywise product 1.
template <class S>
struct EquivalenceReport {
    bool matched = false;
    std::optional<std::vector<int>> permutation;
    std::optional<std::vector<S>> scale_a, scale_b, scale_c;
};

namespace detail {

inline double projective_distance(const std::vector<double>& u, const std::vector<double>& v) {
    double uu = 0, vv = 0, uv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        uu += u[i] * u[i];
        vv += v[i] * v[i];
        uv += u[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0) return (uu == vv) ? 0.0 : 1.0;
    return 1.0 - (uv * uv) / (uu * vv);
}

template <class S>
double column_pair_cost(const Matrix<S>& m1, int r, const Matrix<S>& m2, int s,
                        const NumericOptions& opts) {
    if constexpr (std::is_same_v<S, Rat>) {
        auto ratio = proportionality_ratio(m1.col(r), m2.col(s), opts);
        return (ratio && !(*ratio == Rat(0))) ? 0.0 : 1.0;
    } else {
        std::vector<double> u = m1.col(r), v = m2.col(s);
        return projective_distance(u, v);
    }
}

} // namespace detail

/// Single-matrix equivalence: is C2 = C1 Pi Lambda for a permutation Pi
/// and nonsingular diagonal Lambda? Assignment on projective column
/// distances, then exact (or tolerance) verification of the candidate.
template <class S>
EquivalenceReport<S> match_single_factor(const Matrix<S>& c1, const Matrix<S>& c2,
                                         const NumericOptions& opts = {}) {
    if (c1.rows() != c2.rows() || c1.cols() != c2.cols())
        throw domain_error("match_single_factor: shape mismatch");
    const int R = c1.cols();
    EquivalenceReport<S> rep;
    if (R == 0) {
        rep.matched = true;
        rep.permutation = std::vector<int>{};
        rep.scale_c = std::vector<S>{};
        return rep;
    }
    std::vector<std::vector<double>> cost(static_cast<std::size_t>(R),
                                          std::vector<double>(static_cast<std::size_t>(R)));
    for (int r = 0; r < R; ++r)
        for (int s = 0; s < R; ++s)
            cost[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] =
                detail::column_pair_cost(c1, r, c2, s, opts);
    const std::vector<int> row_of_col = detail::min_cost_assignment(cost);
    std::vector<int> perm(static_cast<std::size_t>(R));
    std::vector<S> lam(static_cast<std::size_t>(R));
    for (int s = 0; s < R; ++s) {
        const int r = row_of_col[static_cast<std::size_t>(s)];
        auto ratio = proportionality_ratio(c1.col(r), c2.col(s), opts);
        if (!ratio || scalar_is_zero(*ratio, opts.tolerance, 1.0)) return rep; // matched = false
        perm[static_cast<std::size_t>(s)] = r + 1;
        lam[static_cast<std::size_t>(s)] = *ratio;
    }
    rep.matched = true;
    rep.permutation = perm;
    rep.scale_c = lam;
    return rep;
}

/// Triple equivalence up to the trivial indeterminacies: a permutation of
/// rank-1 terms and per-term scalings with product 1. Stacked normalized
/// column scores feed a minimum-cost assignment; the candidate
/// (Pi, Lambda_A, Lambda_B, Lambda_C) is then verified before matched is
/// reported. Zero columns are rejected: a PD term must be nonzero.
template <class S>
EquivalenceReport<S> match_factors(const FactorTriple<S>& f1, const FactorTriple<S>& f2,
                                   const NumericOptions& opts = {}) {
    f1.validate();
    f2.validate();
    if (f1.a.rows() != f2.a.rows() || f1.b.rows() != f2.b.rows() || f1.c.rows() != f2.c.rows() ||
        f1.terms() != f2.terms())
        throw domain_error("match_factors: dimension mismatch");
    const int R = f1.terms();
    for (const auto* m : {&f1.a, &f1.b, &f1.c, &f2.a, &f2.b, &f2.c})
        for (int r = 0; r < R; ++r)
            if (weight(m->col(r), opts) == 0)
                throw domain_error("match_factors: zero column; rank-1 terms must be nonzero");

    EquivalenceReport<S> rep;
    std::vector<std::vector<double>> cost(static_cast<std::size_t>(R),
                                          std::vector<double>(static_cast<std::size_t>(R)));
    for (int r = 0; r < R; ++r)
        for (int s = 0; s < R; ++s)
            cost[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] =
                detail::column_pair_cost(f1.a, r, f2.a, s, opts) +
                detail::column_pair_cost(f1.b, r, f2.b, s, opts) +
                detail::column_pair_cost(f1.c, r, f2.c, s, opts);
    const std::vector<int> row_of_col = detail::min_cost_assignment(cost);

    std::vector<int> perm(static_cast<std::size_t>(R));
    std::vector<S> la(static_cast<std::size_t>(R)), lb(static_cast<std::size_t>(R)),
        lc(static_cast<std::size_t>(R));
    for (int s = 0; s < R; ++s) {
        const int r = row_of_col[static_cast<std::size_t>(s)];
        const auto ra = proportionality_ratio(f1.a.col(r), f2.a.col(s), opts);
        const auto rb = proportionality_ratio(f1.b.col(r), f2.b.col(s), opts);
        const auto rc = proportionality_ratio(f1.c.col(r), f2.c.col(s), opts);
        if (!ra || !rb || !rc) return rep;
        if (scalar_is_zero(*ra, opts.tolerance, 1.0) || scalar_is_zero(*rb, opts.tolerance, 1.0) ||
            scalar_is_zero(*rc, opts.tolerance, 1.0))
            return rep;
        // The three scalings must multiply to 1 columnwise (same rank-1 term).
        const S prod = *ra * *rb * *rc;
        if (!scalar_is_zero(prod - S(1), opts.tolerance, 1.0)) return rep;
        perm[static_cast<std::size_t>(s)] = r + 1;
        la[static_cast<std::size_t>(s)] = *ra;
        lb[static_cast<std::size_t>(s)] = *rb;
        lc[static_cast<std::size_t>(s)] = *rc;
    }
    rep.matched = true;
    rep.permutation = perm;
    rep.scale_a = la;
    rep.scale_b = lb;
    rep.scale_c = lc;
    return rep;
}

} // namespace cpdcert

#endif
