#ifndef CPDCERT_CONDITIONS_HPP
#define CPDCERT_CONDITIONS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpdcert/compound.hpp"
#include "cpdcert/linalg.hpp"
#include "cpdcert/matrix.hpp"
#include "cpdcert/verdict.hpp"

namespace cpdcert {

namespace detail {

template <class S>
std::string num_str(const S& v) {
    if constexpr (std::is_same_v<S, Rat>) return rational_to_string(v);
    else return std::to_string(v);
}

inline std::string subset_str(const std::vector<int>& s) {
    std::string out = "(";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    out += ")";
    return out;
}

/// Lexicographically first size-m column subset that is linearly
/// dependent, if any.
template <class S>
std::optional<std::vector<int>> first_dependent_subset(const Matrix<S>& m, int size,
                                                       const CheckOptions& opts) {
    const int R = m.cols();
    if (size < 1 || size > R) return std::nullopt;
    binomial_checked(R, size, opts.cap);
    std::vector<int> rows_all(static_cast<std::size_t>(m.rows()));
    for (int i = 0; i < m.rows(); ++i) rows_all[static_cast<std::size_t>(i)] = i + 1;
    std::vector<int> c = first_combination(size);
    while (true) {
        if (rank(m.select(rows_all, c), opts) < size) return c;
        if (!next_combination(c, R)) break;
    }
    return std::nullopt;
}

} // namespace detail

/// m = R - r_C + 2, the compound order tied to the rank deficiency of C.
template <class S>
int m_for_C(int R, const Matrix<S>& c, const NumericOptions& opts = {}) {
    if (c.cols() != R) throw domain_error("m_for_C: C must have R columns");
    return R - rank(c, opts) + 2;
}

/// (Km): r_A + k_B >= R + m and k_A >= m, or the symmetric counterpart.
/// Always decidable from ranks and k-ranks.
template <class S>
ConditionVerdict<S> check_Km(const Matrix<S>& a, const Matrix<S>& b, int m,
                             const CheckOptions& opts = {}) {
    if (a.cols() != b.cols()) throw domain_error("check_Km: column counts differ");
    const int R = a.cols();
    ConditionVerdict<S> v;
    v.condition = Cond::Km;
    v.m = m;
    const int ra = rank(a, opts), rb = rank(b, opts);
    const int ka = k_rank(a, opts), kb = k_rank(b, opts);
    const bool d1 = ra + kb >= R + m && ka >= m;
    const bool d2 = rb + ka >= R + m && kb >= m;
    v.provenance.push_back("r_A=" + std::to_string(ra) + " k_A=" + std::to_string(ka) +
                           " r_B=" + std::to_string(rb) + " k_B=" + std::to_string(kb) +
                           " R=" + std::to_string(R) + " m=" + std::to_string(m));
    v.provenance.push_back(std::string("r_A+k_B>=R+m and k_A>=m: ") + (d1 ? "satisfied" : "violated"));
    v.provenance.push_back(std::string("r_B+k_A>=R+m and k_B>=m: ") + (d2 ? "satisfied" : "violated"));
    v.status = (d1 || d2) ? Status::Holds : Status::Fails;
    return v;
}

/// Exhaustive H profile: H(delta) = min over delta-column subsets of
/// r_Atilde + r_Btilde - delta.
template <class S>
HProfile h_profile(const Matrix<S>& a, const Matrix<S>& b, const CheckOptions& opts = {}) {
    if (a.cols() != b.cols()) throw domain_error("h_profile: column counts differ");
    const int R = a.cols();
    std::vector<int> rows_a(static_cast<std::size_t>(a.rows()));
    for (int i = 0; i < a.rows(); ++i) rows_a[static_cast<std::size_t>(i)] = i + 1;
    std::vector<int> rows_b(static_cast<std::size_t>(b.rows()));
    for (int i = 0; i < b.rows(); ++i) rows_b[static_cast<std::size_t>(i)] = i + 1;
    HProfile profile;
    for (int delta = 1; delta <= R; ++delta) {
        binomial_checked(R, delta, opts.cap);
        int best = 0;
        std::vector<int> best_subset;
        std::vector<int> c = first_combination(delta);
        bool first = true;
        while (true) {
            const int value = rank(a.select(rows_a, c), opts) + rank(b.select(rows_b, c), opts) - delta;
            if (first || value < best) {
                best = value;
                best_subset = c;
                first = false;
            }
            if (!next_combination(c, R)) break;
        }
        profile.values.push_back(best);
        profile.argmin.push_back(best_subset);
    }
    return profile;
}

/// (Hm): H(delta) >= min(delta, m) for every delta = 1..R.
template <class S>
ConditionVerdict<S> check_Hm(const Matrix<S>& a, const Matrix<S>& b, int m,
                             const CheckOptions& opts = {}) {
    ConditionVerdict<S> v;
    v.condition = Cond::Hm;
    v.m = m;
    const HProfile profile = h_profile(a, b, opts);
    const int R = a.cols();
    for (int delta = 1; delta <= R; ++delta) {
        const int h = profile.values[static_cast<std::size_t>(delta - 1)];
        const int need = std::min(delta, m);
        if (h < need) {
            v.status = Status::Fails;
            v.witness_delta = delta;
            v.witness_subset = profile.argmin[static_cast<std::size_t>(delta - 1)];
            v.provenance.push_back("H(" + std::to_string(delta) + ")=" + std::to_string(h) +
                                   " < min(delta,m)=" + std::to_string(need) + " at subset " +
                                   detail::subset_str(*v.witness_subset));
            return v;
        }
    }
    v.status = Status::Holds;
    v.provenance.push_back("H(delta) >= min(delta,m) for all delta=1.." + std::to_string(R));
    return v;
}

/// (Cm): C_m(A) kr C_m(B) has full column rank. Decidable; Fails carries
/// the rank deficit and one kernel vector (in d-hat coordinates).
template <class S>
ConditionVerdict<S> check_Cm(const Matrix<S>& a, const Matrix<S>& b, int m,
                             const CheckOptions& opts = {}) {
    ConditionVerdict<S> v;
    v.condition = Cond::Cm;
    v.m = m;
    const Matrix<S> u = khatri_rao_compound(a, b, m, opts.cap);
    const auto rep = rank_report(u, opts);
    const int full = u.cols();
    v.provenance.push_back("rank(C_" + std::to_string(m) + "(A) kr C_" + std::to_string(m) +
                           "(B)) = " + std::to_string(rep.rank) + " of " + std::to_string(full));
    if (rep.rank == full) {
        v.status = Status::Holds;
    } else {
        v.status = Status::Fails;
        v.provenance.push_back("rank deficit " + std::to_string(full - rep.rank) +
                               "; kernel vector attached (d-hat coordinates)");
        if (!rep.kernel_basis.empty()) v.witness_d = rep.kernel_basis.front();
    }
    return v;
}

} // namespace cpdcert

#include "cpdcert/detail/um_search.hpp"
#include "cpdcert/detail/wm_structural.hpp"

namespace cpdcert {

/// (Um), three-valued. Holds only via a sound rule (Km, Hm or Cm, which
/// all imply Um); Fails only with a re-verified witness d such that
/// [C_m(A) kr C_m(B)] d-hat = 0 and d-hat != 0. The witness comes either
/// from a dependent column set (when min(k_A, k_B) < m) or from the
/// seeded randomized kernel-structure search.
template <class S>
ConditionVerdict<S> check_Um(const Matrix<S>& a, const Matrix<S>& b, int m,
                             const CheckOptions& opts = {},
                             const ConditionVerdict<S>* km_hint = nullptr,
                             const ConditionVerdict<S>* hm_hint = nullptr,
                             const ConditionVerdict<S>* cm_hint = nullptr) {
    if (a.cols() != b.cols()) throw domain_error("check_Um: column counts differ");
    const int R = a.cols();
    if (m < 1 || m > std::min({a.rows(), b.rows(), R}))
        throw domain_error("check_Um: need 1 <= m <= min(I, J, R)");
    ConditionVerdict<S> v;
    v.condition = Cond::Um;
    v.m = m;

    if (m == 1) {
        // (U1) = (C1): A kr B has full column rank.
        const Matrix<S> u = khatri_rao(a, b);
        const auto rep = rank_report(u, opts);
        if (rep.rank == R) {
            v.status = Status::Holds;
            v.provenance.push_back("(U1) = (C1): A kr B has full column rank " + std::to_string(R));
        } else {
            v.status = Status::Fails;
            v.witness_d = rep.kernel_basis.front();
            v.provenance.push_back("(U1) = (C1): rank(A kr B) = " + std::to_string(rep.rank) +
                                   " < " + std::to_string(R) + "; kernel vector is the witness");
            detail::verify_um_witness(a, b, m, *v.witness_d, opts);
        }
        return v;
    }

    const int ka = k_rank(a, opts), kb = k_rank(b, opts);
    if (std::min(ka, kb) < m) {
        // Indicator of a dependent column set: d-hat has exactly one
        // nonzero entry and the matching column of U is zero.
        const auto& low = ka <= kb ? a : b;
        auto dep = detail::first_dependent_subset(low, m, opts);
        if (!dep) throw std::logic_error("check_Um: k-rank < m but no dependent m-subset");
        std::vector<S> d(static_cast<std::size_t>(R), S(0));
        for (int i : *dep) d[static_cast<std::size_t>(i - 1)] = S(1);
        detail::verify_um_witness(a, b, m, d, opts);
        v.status = Status::Fails;
        v.witness_d = d;
        v.witness_subset = *dep;
        v.provenance.push_back("min(k_A,k_B)=" + std::to_string(std::min(ka, kb)) + " < m=" +
                               std::to_string(m) + "; witness is the indicator of dependent columns " +
                               detail::subset_str(*dep));
        return v;
    }

    // Sound sufficient rules, cheapest first.
    const ConditionVerdict<S> km = km_hint ? *km_hint : check_Km(a, b, m, opts);
    if (km.holds()) {
        v.status = Status::Holds;
        v.provenance.push_back("(Km) holds; (Km) implies (Cm) implies (Um)");
        return v;
    }
    const ConditionVerdict<S> hm = hm_hint ? *hm_hint : check_Hm(a, b, m, opts);
    if (hm.holds()) {
        v.status = Status::Holds;
        v.provenance.push_back("(Hm) holds; (Hm) implies (Um)");
        return v;
    }
    const ConditionVerdict<S> cm = cm_hint ? *cm_hint : check_Cm(a, b, m, opts);
    if (cm.holds()) {
        v.status = Status::Holds;
        v.provenance.push_back("(Cm) holds; (Cm) implies (Um)");
        return v;
    }

    if (opts.enable_search) {
        auto found = detail::search_um_witness(a, b, m, opts);
        if (found) {
            detail::verify_um_witness(a, b, m, *found, opts);
            v.status = Status::Fails;
            v.witness_d = *found;
            v.provenance.push_back("randomized kernel-structure search found a verified witness (seed " +
                                   std::to_string(opts.seed) + ")");
            return v;
        }
        v.provenance.push_back("randomized search exhausted without a verified witness");
    }
    v.status = Status::Undetermined;
    v.provenance.push_back("no sound rule fired: (Km) " + std::string(to_string(km.status)) +
                           ", (Hm) " + to_string(hm.status) + ", (Cm) " + to_string(cm.status));
    return v;
}

/// (Wm), three-valued: the (Um) kernel property restricted to
/// d in range(C^T). Holds via (Um) or via the structural support
/// enumeration (each candidate support is refuted by a linear argument);
/// Fails with a witness pair (x, d = C^T x), re-verified.
template <class S>
ConditionVerdict<S> check_Wm(const Matrix<S>& a, const Matrix<S>& b, const Matrix<S>& c, int m,
                             const CheckOptions& opts = {},
                             const ConditionVerdict<S>* um_hint = nullptr) {
    const int R = a.cols();
    if (b.cols() != R || c.cols() != R) throw domain_error("check_Wm: column counts differ");
    if (m < 1 || m > std::min({a.rows(), b.rows(), R}))
        throw domain_error("check_Wm: need 1 <= m <= min(I, J, R)");
    ConditionVerdict<S> v;
    v.condition = Cond::Wm;
    v.m = m;

    const ConditionVerdict<S> um = um_hint ? *um_hint : check_Um(a, b, m, opts);
    if (um.holds()) {
        v.status = Status::Holds;
        v.provenance.push_back("(Um) holds; (Um) implies (Wm) for every C");
        v.provenance.insert(v.provenance.end(), um.provenance.begin(), um.provenance.end());
        return v;
    }
    if (um.fails() && um.witness_d) {
        // The (Um) witness is also a (Wm) witness when it lies in range(C^T).
        auto x = solve_preimage(c, *um.witness_d, opts);
        if (x) {
            v.status = Status::Fails;
            v.witness_d = um.witness_d;
            v.witness_x = *x;
            detail::verify_wm_witness(a, b, c, m, *v.witness_d, *v.witness_x, opts);
            v.provenance.push_back("(Um) witness lies in range(C^T); preimage attached");
            return v;
        }
    }

    return detail::structural_wm(a, b, c, m, opts, v);
}

} // namespace cpdcert

#endif
