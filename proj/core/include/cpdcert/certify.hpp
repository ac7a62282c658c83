#ifndef CPDCERT_CERTIFY_HPP
#define CPDCERT_CERTIFY_HPP

#include <string>
#include <vector>

#include "cpdcert/conditions.hpp"
#include "cpdcert/detail/hash.hpp"
#include "cpdcert/tensor.hpp"
#include "cpdcert/version.hpp"

namespace cpdcert {

enum class Conclusion { OverallUnique, ThirdFactorUnique, NotUnique, Undetermined };

inline const char* to_string(Conclusion c) {
    switch (c) {
        case Conclusion::OverallUnique: return "overall_unique";
        case Conclusion::ThirdFactorUnique: return "third_factor_unique";
        case Conclusion::NotUnique: return "not_unique";
        case Conclusion::Undetermined: return "undetermined";
    }
    return "?";
}

/// One step of the inference chain. `fired` tells whether this step
/// produced the conclusion; non-firing steps are kept so the certificate
/// reads as an audit trail.
struct ChainStep {
    std::string rule;
    std::string detail;
    Status verdict = Status::Undetermined;
    bool fired = false;
};

/// Assembled uniqueness conclusion. The chain replays: re-running the
/// named checkers on the stored inputs with the stored seed reproduces
/// every verdict. NotUnique always rests on a violated necessary
/// condition or an explicit rank-collapse of the decomposition, with the
/// witness attached to the corresponding verdict.
template <class S>
struct UniquenessCertificate {
    Conclusion conclusion = Conclusion::Undetermined;
    int target_mode = 3; // which input factor plays the role of C
    int m_used = 0;
    std::vector<ChainStep> chain;
    std::vector<ConditionVerdict<S>> verdicts;
    std::string reason;

    // Reproducibility block.
    std::string backend;
    double tolerance = 0.0;
    std::uint64_t seed = 0;
    std::int64_t cap = 0;
    std::string version;
    std::string hash_a, hash_b, hash_c;
};

namespace detail {

template <class S>
std::string matrix_digest(const Matrix<S>& m) {
    std::string s = std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ":";
    for (const auto& v : m.flat()) {
        if constexpr (std::is_same_v<S, Rat>) {
            s += rational_to_string(v);
        } else {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            s += buf;
        }
        s += ",";
    }
    return hex64(fnv1a64(s));
}

template <class S>
void stamp(UniquenessCertificate<S>& cert, const Matrix<S>& a, const Matrix<S>& b,
           const Matrix<S>& c, const CheckOptions& opts) {
    cert.backend = std::is_same_v<S, Rat> ? "exact" : "float";
    cert.tolerance = opts.tolerance;
    cert.seed = opts.seed;
    cert.cap = opts.cap;
    cert.version = kVersion;
    cert.hash_a = matrix_digest(a);
    cert.hash_b = matrix_digest(b);
    cert.hash_c = matrix_digest(c);
}

/// r < s (1-based) such that the rank-1 terms r and s are proportional in
/// all three factors; two proportional terms collapse into one, so the
/// declared R overshoots the tensor rank.
template <class S>
std::optional<std::pair<int, int>> proportional_term_pair(const Matrix<S>& a, const Matrix<S>& b,
                                                          const Matrix<S>& c,
                                                          const NumericOptions& opts) {
    const int R = a.cols();
    for (int r = 0; r < R; ++r)
        for (int s = r + 1; s < R; ++s) {
            const auto ra = proportionality_ratio(a.col(r), a.col(s), opts);
            if (!ra) continue;
            const auto rb = proportionality_ratio(b.col(r), b.col(s), opts);
            if (!rb) continue;
            const auto rc = proportionality_ratio(c.col(r), c.col(s), opts);
            if (!rc) continue;
            return std::make_pair(r + 1, s + 1);
        }
    return std::nullopt;
}

} // namespace detail

/// Cyclic relabeling so that factor `target` plays the third role:
/// target=3 keeps (A,B,C); target=1 gives (B,C,A); target=2 gives
/// (C,A,B). The rebuilt tensor is the original with its modes cyclically
/// permuted the same way.
template <class S>
FactorTriple<S> mode_rotate(const FactorTriple<S>& f, int target) {
    switch (target) {
        case 3: return f;
        case 1: return FactorTriple<S>{f.b, f.c, f.a};
        case 2: return FactorTriple<S>{f.c, f.a, f.b};
        default: throw domain_error("mode_rotate: target must be 1, 2 or 3");
    }
}

/// Certify "r_T = R and the third factor matrix is unique" for the PD
/// [A, B, C]_R. Sufficient rules fire cheapest first: the rank/k-rank
/// inequalities (Km), the subset-rank profile (Hm), the compound
/// Khatri-Rao rank (Cm), then the (Um) sound rules, and finally the (Wm)
/// route (k-rank floor + full column rank of A kr B + structural (Wm)).
/// NotUnique is only concluded from an explicit rank collapse of the
/// decomposition (zero column or duplicated rank-1 term, both of which
/// force r_T < R). Everything else is Undetermined with a reason.
template <class S>
UniquenessCertificate<S> certify_third(const Matrix<S>& a, const Matrix<S>& b, const Matrix<S>& c,
                                       const CheckOptions& opts = {}) {
    const int R = a.cols();
    if (b.cols() != R || c.cols() != R)
        throw domain_error("certify_third: factor matrices must share R");
    if (R < 1) throw domain_error("certify_third: R must be at least 1");
    UniquenessCertificate<S> cert;
    detail::stamp(cert, a, b, c, opts);
    cert.target_mode = 3;

    const int ra = rank(a, opts), rb = rank(b, opts), rc = rank(c, opts);
    const int ka = k_rank(a, opts), kb = k_rank(b, opts), kc = k_rank(c, opts);
    const int m = R - rc + 2;
    cert.m_used = m;
    cert.chain.push_back({"spectrum",
                          "R=" + std::to_string(R) + " r_A=" + std::to_string(ra) + " k_A=" +
                              std::to_string(ka) + " r_B=" + std::to_string(rb) + " k_B=" +
                              std::to_string(kb) + " r_C=" + std::to_string(rc) + " k_C=" +
                              std::to_string(kc) + " m=R-r_C+2=" + std::to_string(m),
                          Status::Holds, false});

    if (ka == 0 || kb == 0 || kc == 0) {
        const char* which = ka == 0 ? "A" : (kb == 0 ? "B" : "C");
        cert.conclusion = Conclusion::NotUnique;
        cert.reason = std::string("factor ") + which +
                      " has a zero column: the corresponding rank-1 term vanishes, so r_T < R";
        cert.chain.push_back({"zero_column", cert.reason, Status::Fails, true});
        return cert;
    }
    if (auto pair = detail::proportional_term_pair(a, b, c, opts)) {
        cert.conclusion = Conclusion::NotUnique;
        cert.reason = "rank-1 terms " + std::to_string(pair->first) + " and " +
                      std::to_string(pair->second) + " are proportional, so r_T < R";
        cert.chain.push_back({"proportional_terms", cert.reason, Status::Fails, true});
        return cert;
    }

    const int minIJ = std::min(a.rows(), b.rows());
    const bool compounds_ok = m <= minIJ && m <= R;

    // (Km) route.
    const ConditionVerdict<S> km = check_Km(a, b, m, opts);
    cert.verdicts.push_back(km);
    cert.chain.push_back({"krank_inequalities(K" + std::to_string(m) + ")",
                          km.provenance.empty() ? "" : km.provenance.front(), km.status,
                          km.holds()});
    if (km.holds()) {
        // Internal audit: (Km) implies both (Hm) and (Cm); a Fails from
        // either checker here is an implementation bug, not a data
        // property.
        if (check_Hm(a, b, m, opts).fails())
            throw std::logic_error("implication lattice violated: (Km) holds but (Hm) fails");
        if (compounds_ok) {
            try {
                if (check_Cm(a, b, m, opts).fails())
                    throw std::logic_error("implication lattice violated: (Km) holds but (Cm) fails");
            } catch (const resource_error&) {
                // cross-check skipped when the compound exceeds the cap
            }
        }
        cert.conclusion = Conclusion::ThirdFactorUnique;
        cert.reason = "(K" + std::to_string(m) + ") with k_C >= 1";
        return cert;
    }

    // (Hm) route; decidable for every m, compounds or not.
    const ConditionVerdict<S> hm = check_Hm(a, b, m, opts);
    cert.verdicts.push_back(hm);
    cert.chain.push_back({"subset_rank_profile(H" + std::to_string(m) + ")",
                          hm.provenance.empty() ? "" : hm.provenance.front(), hm.status,
                          hm.holds()});
    if (hm.holds()) {
        cert.conclusion = Conclusion::ThirdFactorUnique;
        cert.reason = "(H" + std::to_string(m) + ") with k_C >= 1";
        return cert;
    }

    if (!compounds_ok) {
        cert.conclusion = Conclusion::Undetermined;
        cert.reason = "m=" + std::to_string(m) + " exceeds min(I,J)=" + std::to_string(minIJ) +
                      (m > R ? " (and R)" : "") + ", so no compound-based rule applies";
        cert.chain.push_back({"compound_rules", cert.reason, Status::Undetermined, false});
        return cert;
    }

    // (Cm) route.
    ConditionVerdict<S> cm;
    bool cm_available = true;
    try {
        cm = check_Cm(a, b, m, opts);
    } catch (const resource_error& e) {
        cm_available = false;
        cert.chain.push_back({"compound_rank(C" + std::to_string(m) + ")",
                              std::string("skipped: ") + e.what(), Status::Undetermined, false});
    }
    if (cm_available) {
        cert.verdicts.push_back(cm);
        cert.chain.push_back({"compound_rank(C" + std::to_string(m) + ")",
                              cm.provenance.empty() ? "" : cm.provenance.front(), cm.status,
                              cm.holds()});
        if (km.holds() && cm.fails())
            throw std::logic_error("implication lattice violated: (Km) holds but (Cm) fails");
        if (cm.holds()) {
            cert.conclusion = Conclusion::ThirdFactorUnique;
            cert.reason = "(C" + std::to_string(m) + ") with k_C >= 1";
            return cert;
        }
    }

    // (Um) sound rules (subsumed by the above but kept in the chain; the
    // checker may also falsify (Um), which informs the (Wm) route).
    const ConditionVerdict<S> um =
        check_Um(a, b, m, opts, &km, &hm, cm_available ? &cm : nullptr);
    cert.verdicts.push_back(um);
    cert.chain.push_back({"structured_kernel(U" + std::to_string(m) + ")",
                          um.provenance.empty() ? "" : um.provenance.front(), um.status,
                          um.holds()});
    if (um.holds()) {
        cert.conclusion = Conclusion::ThirdFactorUnique;
        cert.reason = "(U" + std::to_string(m) + ") with k_C >= 1";
        return cert;
    }

    // (Wm) route: k-rank floor, full column rank of A kr B, then the
    // three-valued (Wm) checker restricted to range(C^T).
    const bool floor_ok = std::min(ka, kb) >= m - 1;
    cert.chain.push_back({"krank_floor",
                          "min(k_A,k_B)=" + std::to_string(std::min(ka, kb)) +
                              (floor_ok ? " >= " : " < ") + "m-1=" + std::to_string(m - 1),
                          floor_ok ? Status::Holds : Status::Fails, false});
    const int r_ab = rank(khatri_rao(a, b), opts);
    const bool ab_full = r_ab == R;
    cert.chain.push_back({"khatri_rao_rank",
                          "rank(A kr B)=" + std::to_string(r_ab) + " of R=" + std::to_string(R),
                          ab_full ? Status::Holds : Status::Fails, false});
    if (floor_ok && ab_full) {
        const ConditionVerdict<S> wm = check_Wm(a, b, c, m, opts, &um);
        cert.verdicts.push_back(wm);
        cert.chain.push_back({"restricted_kernel(W" + std::to_string(m) + ")",
                              wm.provenance.empty() ? "" : wm.provenance.front(), wm.status,
                              wm.holds()});
        if (wm.holds()) {
            cert.conclusion = Conclusion::ThirdFactorUnique;
            cert.reason = "(W" + std::to_string(m) +
                          ") with min(k_A,k_B) >= m-1, A kr B of full column rank and k_C >= 1";
            return cert;
        }
    }

    cert.conclusion = Conclusion::Undetermined;
    cert.reason = "no sufficient rule fired and no refutation found";
    return cert;
}

/// Rotate so `target` plays the third role, then certify_third.
template <class S>
UniquenessCertificate<S> certify_third_mode(const FactorTriple<S>& f, int target,
                                            const CheckOptions& opts = {}) {
    const FactorTriple<S> rot = mode_rotate(f, target);
    UniquenessCertificate<S> cert = certify_third(rot.a, rot.b, rot.c, opts);
    cert.target_mode = target;
    return cert;
}

/// Certify overall CPD uniqueness of [A, B, C]_R. Routes:
///   - single rank-1 term (R = 1) with nonzero factors;
///   - some factor of full column rank R whose complementary pair
///     satisfies (U2) (checked through its sound rules);
///   - the k-rank sum bound k_A + k_B + k_C >= 2R + 2.
/// NotUnique comes from violated necessary conditions: a k-rank below 2,
/// a Khatri-Rao product without full column rank, or a verified (U2)
/// counterexample for one of the three pairs.
template <class S>
UniquenessCertificate<S> certify_overall(const Matrix<S>& a, const Matrix<S>& b,
                                         const Matrix<S>& c, const CheckOptions& opts = {}) {
    const int R = a.cols();
    if (b.cols() != R || c.cols() != R)
        throw domain_error("certify_overall: factor matrices must share R");
    if (R < 1) throw domain_error("certify_overall: R must be at least 1");
    UniquenessCertificate<S> cert;
    detail::stamp(cert, a, b, c, opts);
    cert.target_mode = 3;
    cert.m_used = 2;

    const int ka = k_rank(a, opts), kb = k_rank(b, opts), kc = k_rank(c, opts);

    if (R == 1) {
        if (ka == 0 || kb == 0 || kc == 0) {
            cert.conclusion = Conclusion::NotUnique;
            cert.reason = "a factor of the single rank-1 term is zero, so the term vanishes";
            cert.chain.push_back({"zero_column", cert.reason, Status::Fails, true});
        } else {
            cert.conclusion = Conclusion::OverallUnique;
            cert.reason = "single nonzero rank-1 term: the decomposition is unique up to scaling";
            cert.chain.push_back({"single_term", cert.reason, Status::Holds, true});
        }
        return cert;
    }

    // Necessary conditions for uniqueness (R >= 2): every k-rank >= 2 and
    // every pairwise Khatri-Rao product of full column rank.
    if (std::min({ka, kb, kc}) < 2) {
        const char* which = ka <= kb && ka <= kc ? "A" : (kb <= kc ? "B" : "C");
        const int kmin = std::min({ka, kb, kc});
        cert.conclusion = Conclusion::NotUnique;
        cert.reason = std::string("necessary condition violated: k_") + which + "=" +
                      std::to_string(kmin) + " < 2";
        ConditionVerdict<S> wit;
        wit.condition = Cond::Um;
        wit.m = 2;
        wit.status = Status::Fails;
        const Matrix<S>& low = which[0] == 'A' ? a : (which[0] == 'B' ? b : c);
        wit.witness_subset = detail::first_dependent_subset(low, std::min(kmin + 1, R), opts);
        wit.provenance.push_back(std::string("dependent column set of ") + which +
                                 (wit.witness_subset ? " " + detail::subset_str(*wit.witness_subset)
                                                     : std::string()));
        cert.verdicts.push_back(wit);
        cert.chain.push_back({"krank_floor_necessary",
                              "k_A=" + std::to_string(ka) + " k_B=" + std::to_string(kb) +
                                  " k_C=" + std::to_string(kc) + "; " + cert.reason,
                              Status::Fails, true});
        return cert;
    }
    cert.chain.push_back({"krank_floor_necessary",
                          "k_A=" + std::to_string(ka) + " k_B=" + std::to_string(kb) + " k_C=" +
                              std::to_string(kc) + " all >= 2",
                          Status::Holds, false});

    const char* pair_names[3] = {"(A,B)", "(B,C)", "(C,A)"};
    const Matrix<S>* pairs[3][2] = {{&a, &b}, {&b, &c}, {&c, &a}};
    for (int p = 0; p < 3; ++p) {
        const auto rep = rank_report(khatri_rao(*pairs[p][0], *pairs[p][1]), opts);
        if (rep.rank < R) {
            cert.conclusion = Conclusion::NotUnique;
            cert.reason = std::string("necessary condition violated: ") + pair_names[p] +
                          " Khatri-Rao product has rank " + std::to_string(rep.rank) + " < R";
            ConditionVerdict<S> wit;
            wit.condition = Cond::Cm;
            wit.m = 1;
            wit.status = Status::Fails;
            if (!rep.kernel_basis.empty()) wit.witness_d = rep.kernel_basis.front();
            wit.provenance.push_back(cert.reason);
            cert.verdicts.push_back(wit);
            cert.chain.push_back({"khatri_rao_full_rank_necessary", cert.reason, Status::Fails, true});
            return cert;
        }
    }
    cert.chain.push_back({"khatri_rao_full_rank_necessary",
                          "A kr B, B kr C, C kr A all have full column rank", Status::Holds, false});

    // (U2) for the three pairs: necessity of Fails, and the full-rank-mode
    // sufficiency when it Holds.
    const int rks[3] = {rank(a, opts), rank(b, opts), rank(c, opts)};
    const int kruskal_sum = ka + kb + kc;
    const bool kruskal_ok = kruskal_sum >= 2 * R + 2;

    Status pair_u2[3] = {Status::Undetermined, Status::Undetermined, Status::Undetermined};
    for (int p = 0; p < 3; ++p) {
        const Matrix<S>& x = *pairs[p][0];
        const Matrix<S>& y = *pairs[p][1];
        if (2 > std::min(x.rows(), y.rows())) continue; // (U2) undefined for row-vector factors
        ConditionVerdict<S> u2 = check_Um(x, y, 2, opts);
        u2.provenance.insert(u2.provenance.begin(), std::string("pair ") + pair_names[p]);
        cert.verdicts.push_back(u2);
        pair_u2[p] = u2.status;
        cert.chain.push_back({std::string("structured_kernel(U2)") + pair_names[p],
                              u2.provenance.size() > 1 ? u2.provenance[1] : "", u2.status, false});
        if (u2.fails()) {
            cert.conclusion = Conclusion::NotUnique;
            cert.reason = std::string("(U2) fails for pair ") + pair_names[p] +
                          ", a necessary condition for overall uniqueness";
            cert.chain.back().fired = true;
            return cert;
        }
    }

    // Full-column-rank factor + (U2) on the complementary pair. The pair
    // opposite factor C is (A,B), opposite A is (B,C), opposite B is (C,A).
    const int mode_of_pair[3] = {3, 1, 2};
    for (int p = 0; p < 3; ++p) {
        const int mode = mode_of_pair[p];
        const int r_target = rks[(p + 2) % 3];
        if (r_target != R) continue;
        if (pair_u2[p] == Status::Holds) {
            cert.conclusion = Conclusion::OverallUnique;
            cert.target_mode = mode;
            cert.reason = std::string("factor ") + (mode == 3 ? "C" : (mode == 1 ? "A" : "B")) +
                          " has full column rank and (U2) holds for " + pair_names[p] +
                          "; uniqueness of that factor lifts to the overall CPD";
            cert.chain.push_back({"full_rank_factor_u2", cert.reason, Status::Holds, true});
            if (kruskal_ok)
                cert.chain.push_back({"kruskal_krank_sum",
                                      "k_A+k_B+k_C=" + std::to_string(kruskal_sum) + " >= 2R+2=" +
                                          std::to_string(2 * R + 2) + " (also sufficient, not used)",
                                      Status::Holds, false});
            return cert;
        }
    }

    cert.chain.push_back({"kruskal_krank_sum",
                          "k_A+k_B+k_C=" + std::to_string(kruskal_sum) +
                              (kruskal_ok ? " >= " : " < ") + "2R+2=" + std::to_string(2 * R + 2),
                          kruskal_ok ? Status::Holds : Status::Fails, kruskal_ok});
    if (kruskal_ok) {
        cert.conclusion = Conclusion::OverallUnique;
        cert.reason = "k-rank sum bound k_A+k_B+k_C >= 2R+2";
        return cert;
    }

    cert.conclusion = Conclusion::Undetermined;
    cert.reason = "no sufficient rule fired and no necessary condition was refuted";
    return cert;
}

} // namespace cpdcert

#endif
