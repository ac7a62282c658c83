#ifndef CPDCERT_DETAIL_WM_STRUCTURAL_HPP
#define CPDCERT_DETAIL_WM_STRUCTURAL_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpdcert/combinatorics.hpp"
#include "cpdcert/compound.hpp"
#include "cpdcert/detail/um_search.hpp"
#include "cpdcert/linalg.hpp"
#include "cpdcert/matrix.hpp"
#include "cpdcert/verdict.hpp"

namespace cpdcert {

/// Any x with C^T x = d, or nullopt when d is outside range(C^T).
template <class S>
std::optional<std::vector<S>> solve_preimage(const Matrix<S>& c, const std::vector<S>& d,
                                             const NumericOptions& opts) {
    if constexpr (std::is_same_v<S, Rat>) {
        (void)opts;
        return solve_consistent(c.transpose(), d);
    } else {
        return solve_consistent(c.transpose(), d, opts);
    }
}

namespace detail {

template <class S>
void verify_wm_witness(const Matrix<S>& a, const Matrix<S>& b, const Matrix<S>& c, int m,
                       const std::vector<S>& d, const std::vector<S>& x,
                       const NumericOptions& opts) {
    const auto lifted = c.transpose() * x;
    const double scale = std::max(inf_norm(d), inf_norm(lifted));
    for (std::size_t i = 0; i < d.size(); ++i)
        if (!scalar_is_zero(d[i] - lifted[i], opts.tolerance, scale))
            throw std::logic_error("wm witness: d != C^T x");
    verify_um_witness(a, b, m, d, opts);
}

enum class SupportOutcome {
    EmptyIntersection,   // no nonzero d in range(C^T) vanishes outside P
    CoordinateVanishes,  // some d_i (i in P) is identically zero on W_P
    ForcedZeroMonomial,  // the collapsed system forces a monomial in the
                         // nonzero coordinates to vanish: contradiction
    Witness,             // U d-hat vanishes identically on W_P
    Undecided
};

inline const char* to_string(SupportOutcome o) {
    switch (o) {
        case SupportOutcome::EmptyIntersection: return "empty intersection";
        case SupportOutcome::CoordinateVanishes: return "coordinate vanishes on range slice";
        case SupportOutcome::ForcedZeroMonomial: return "forced-zero monomial";
        case SupportOutcome::Witness: return "witness";
        case SupportOutcome::Undecided: return "undecided";
    }
    return "?";
}

template <class S>
struct SupportAnalysis {
    SupportOutcome outcome = SupportOutcome::Undecided;
    std::optional<std::pair<std::vector<S>, std::vector<S>>> witness; // (d, x)
};

/// Decide whether some d in range(C^T) with support exactly P can satisfy
/// U d-hat = 0. On the slice W_P = {d in range(C^T): d_i = 0 outside P},
/// group the coordinate functionals into proportionality classes; d-hat
/// restricted to P-subsets then collapses column-wise into monomials in
/// the class variables. If the collapsed matrix V forces some monomial to
/// vanish on its kernel, the support is impossible (all class variables
/// are nonzero when supp(d) = P); if V = 0, any generic element of W_P
/// with full support is a witness.
template <class S>
SupportAnalysis<S> analyze_support(const Matrix<S>& u, const Matrix<S>& c, int m,
                                   const std::vector<int>& P, const CombinadicTable& table,
                                   const NumericOptions& opts) {
    SupportAnalysis<S> res;
    const int R = c.cols();
    const int K = c.rows();
    std::vector<int> outside;
    {
        std::vector<bool> in(static_cast<std::size_t>(R) + 1, false);
        for (int i : P) in[static_cast<std::size_t>(i)] = true;
        for (int i = 1; i <= R; ++i)
            if (!in[static_cast<std::size_t>(i)]) outside.push_back(i);
    }
    // x-space of the slice: c_i^T x = 0 for i outside P.
    std::vector<std::vector<S>> xs;
    if (outside.empty()) {
        for (int k = 0; k < K; ++k) {
            std::vector<S> e(static_cast<std::size_t>(K), S(0));
            e[static_cast<std::size_t>(k)] = S(1);
            xs.push_back(std::move(e));
        }
    } else {
        Matrix<S> n(static_cast<int>(outside.size()), K);
        for (std::size_t t = 0; t < outside.size(); ++t)
            for (int k = 0; k < K; ++k)
                n(static_cast<int>(t), k) = c(k, outside[t] - 1);
        xs = rank_report(n, opts).kernel_basis;
    }
    // Independent basis of W_P = C^T * xs, keeping preimages.
    std::vector<std::pair<std::vector<S>, std::vector<S>>> basis; // (w, x)
    {
        Matrix<S> acc(0, R);
        for (const auto& x : xs) {
            std::vector<S> w = c.transpose() * x;
            Matrix<S> trial(acc.rows() + 1, R);
            for (int i = 0; i < acc.rows(); ++i)
                for (int j = 0; j < R; ++j) trial(i, j) = acc(i, j);
            for (int j = 0; j < R; ++j) trial(acc.rows(), j) = w[static_cast<std::size_t>(j)];
            if (rank(trial, opts) > acc.rows()) {
                acc = trial;
                basis.emplace_back(std::move(w), x);
            }
        }
    }
    const int s = static_cast<int>(basis.size());
    if (s == 0) {
        res.outcome = SupportOutcome::EmptyIntersection;
        return res;
    }
    // Coordinate functionals f_i in F^s and their proportionality classes.
    std::vector<std::vector<S>> reps;
    std::map<int, int> cls;
    std::map<int, S> alpha;
    for (int i : P) {
        std::vector<S> fi(static_cast<std::size_t>(s));
        for (int j = 0; j < s; ++j)
            fi[static_cast<std::size_t>(j)] = basis[static_cast<std::size_t>(j)].first[static_cast<std::size_t>(i - 1)];
        if (weight(fi, opts) == 0) {
            res.outcome = SupportOutcome::CoordinateVanishes;
            return res;
        }
        bool placed = false;
        for (std::size_t r = 0; r < reps.size(); ++r) {
            auto ratio = proportionality_ratio(reps[r], fi, opts);
            if (ratio && !scalar_is_zero(*ratio, opts.tolerance, 1.0)) {
                cls[i] = static_cast<int>(r);
                alpha[i] = *ratio;
                placed = true;
                break;
            }
        }
        if (!placed) {
            cls[i] = static_cast<int>(reps.size());
            alpha[i] = S(1);
            reps.push_back(fi);
        }
    }
    // Collapse columns of U by monomial class.
    std::map<std::vector<int>, int> mono_index;
    std::vector<int> col_monos; // per local column: monomial id
    std::vector<S> col_beta;
    std::vector<int> col_global;
    {
        std::vector<int> sub = first_combination(m);
        const int size = static_cast<int>(P.size());
        do {
            std::vector<int> expo(reps.size(), 0);
            S beta(1);
            std::vector<int> global(static_cast<std::size_t>(m));
            for (int t = 0; t < m; ++t) {
                const int i = P[static_cast<std::size_t>(sub[static_cast<std::size_t>(t)] - 1)];
                global[static_cast<std::size_t>(t)] = i;
                expo[static_cast<std::size_t>(cls[i])] += 1;
                beta = beta * alpha[i];
            }
            auto it = mono_index.find(expo);
            int id;
            if (it == mono_index.end()) {
                id = static_cast<int>(mono_index.size());
                mono_index.emplace(expo, id);
            } else {
                id = it->second;
            }
            col_monos.push_back(id);
            col_beta.push_back(beta);
            col_global.push_back(static_cast<int>(table.rank(global)));
        } while (next_combination(sub, size));
    }
    const int nmono = static_cast<int>(mono_index.size());
    Matrix<S> v(u.rows(), nmono);
    for (std::size_t j = 0; j < col_global.size(); ++j) {
        const int g = col_global[j] - 1;
        const int mi = col_monos[j];
        for (int i = 0; i < u.rows(); ++i) v(i, mi) += col_beta[j] * u(i, g);
    }
    bool vzero = true;
    for (const auto& e : v.flat())
        if (!scalar_is_zero(e, opts.tolerance, std::max(1.0, inf_norm(u.flat())))) { vzero = false; break; }
    if (vzero) {
        // Every d in the slice kills U d-hat; pick one with full support.
        for (int sigma = 1; sigma <= 1000; ++sigma) {
            std::vector<S> d(static_cast<std::size_t>(R), S(0));
            std::vector<S> x(static_cast<std::size_t>(K), S(0));
            S lam(1);
            for (int j = 0; j < s; ++j) {
                for (int t = 0; t < R; ++t)
                    d[static_cast<std::size_t>(t)] +=
                        lam * basis[static_cast<std::size_t>(j)].first[static_cast<std::size_t>(t)];
                for (int t = 0; t < K; ++t)
                    x[static_cast<std::size_t>(t)] +=
                        lam * basis[static_cast<std::size_t>(j)].second[static_cast<std::size_t>(t)];
                lam = lam * S(sigma);
            }
            bool full = true;
            const double dscale = inf_norm(d);
            for (int i : P)
                if (scalar_is_zero(d[static_cast<std::size_t>(i - 1)], opts.tolerance, dscale)) {
                    full = false;
                    break;
                }
            if (!full) continue;
            if constexpr (std::is_same_v<S, Rat>) tidy_exact_witness(d, &x);
            res.outcome = SupportOutcome::Witness;
            res.witness = std::make_pair(std::move(d), std::move(x));
            return res;
        }
        res.outcome = SupportOutcome::Undecided; // could not realize full support
        return res;
    }
    // Forced-zero monomial: e_k in the row space of V means every kernel
    // element of V has k-th coordinate zero, impossible for a monomial in
    // nonzero class variables.
    const int rho = rank(v, opts);
    for (int k = 0; k < nmono; ++k) {
        Matrix<S> stacked(v.rows() + 1, nmono);
        for (int i = 0; i < v.rows(); ++i)
            for (int j = 0; j < nmono; ++j) stacked(i, j) = v(i, j);
        stacked(v.rows(), k) = S(1);
        if (rank(stacked, opts) == rho) {
            res.outcome = SupportOutcome::ForcedZeroMonomial;
            return res;
        }
    }
    res.outcome = SupportOutcome::Undecided;
    return res;
}

/// Structural (Wm) decision by exhaustive support enumeration, gated the
/// same way the worked-example regime is: few zero columns in U, small
/// rank(C), small R. Any witness is re-verified before Fails is returned.
template <class S, class Opts, class Verdict>
Verdict structural_wm(const Matrix<S>& a, const Matrix<S>& b, const Matrix<S>& c, int m,
                      const Opts& opts, Verdict v) {
    const int R = a.cols();
    const Matrix<S> u = khatri_rao_compound(a, b, m, opts.cap);
    const double uscale = std::max(1.0, inf_norm(u.flat()));
    int zero_cols = 0;
    for (int j = 0; j < u.cols(); ++j) {
        bool z = true;
        for (int i = 0; i < u.rows(); ++i)
            if (!scalar_is_zero(u(i, j), opts.tolerance, uscale)) { z = false; break; }
        if (z) ++zero_cols;
    }
    const int rc = rank(c, opts);
    if (zero_cols > opts.wm_max_zero_columns || rc > opts.wm_max_rank_c || R > opts.wm_max_r) {
        v.status = Status::Undetermined;
        v.provenance.push_back("structural analysis gated out: " + std::to_string(zero_cols) +
                               " zero columns (max " + std::to_string(opts.wm_max_zero_columns) +
                               "), rank(C)=" + std::to_string(rc) + " (max " +
                               std::to_string(opts.wm_max_rank_c) + "), R=" + std::to_string(R));
        return v;
    }
    CombinadicTable table(R, m, opts.cap);
    std::map<std::string, int> tally;
    std::vector<std::string> undecided;
    for (int size = m; size <= R; ++size) {
        std::vector<int> P = first_combination(size);
        do {
            auto sa = analyze_support(u, c, m, P, table, opts);
            if (sa.outcome == SupportOutcome::Witness) {
                auto [d, x] = *sa.witness;
                verify_wm_witness(a, b, c, m, d, x, opts);
                v.status = Status::Fails;
                v.witness_d = d;
                v.witness_x = x;
                v.provenance.push_back("support " + subset_str(P) +
                                       " admits d in range(C^T) with U d-hat = 0; witness verified");
                return v;
            }
            if (sa.outcome == SupportOutcome::Undecided)
                undecided.push_back(subset_str(P));
            else
                tally[to_string(sa.outcome)] += 1;
        } while (next_combination(P, R));
    }
    if (undecided.empty()) {
        std::string detail = "all candidate supports refuted:";
        for (const auto& [k, n] : tally) detail += " " + std::to_string(n) + " by " + k + ";";
        v.status = Status::Holds;
        v.provenance.push_back("support enumeration over sizes " + std::to_string(m) + ".." +
                               std::to_string(R));
        v.provenance.push_back(detail);
    } else {
        v.status = Status::Undetermined;
        std::string detail = "undecided supports:";
        for (std::size_t i = 0; i < undecided.size() && i < 6; ++i) detail += " " + undecided[i];
        if (undecided.size() > 6) detail += " ...";
        v.provenance.push_back(detail);
    }
    return v;
}

} // namespace detail
} // namespace cpdcert

#endif
