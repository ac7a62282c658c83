#ifndef CPDCERT_COMBINATORICS_HPP
#define CPDCERT_COMBINATORICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cpdcert/errors.hpp"

namespace cpdcert {

/// Combinatorial sizes above this are refused (resource_error) instead of
/// being computed. Compound matrices grow as C(n,k)^2, so the refusal has
/// to happen before any allocation.
inline constexpr std::int64_t kDefaultCap = 10'000'000;

/// C(n,k) with overflow protection: throws resource_error as soon as the
/// running value exceeds `cap`.
std::int64_t binomial_checked(int n, int k, std::int64_t cap = kDefaultCap);

/// Strictly increasing k-tuple over {1..n}. All user-facing indices are
/// 1-based, matching the usual multi-index notation for minors.
struct MultiIndex {
    int n = 0;
    int k = 0;
    std::vector<int> entries;

    bool valid() const;
    std::string to_string() const;
};

/// Lexicographic ranking/unranking bijection between {1..C(n,k)} and the
/// k-subsets of {1..n}.
class CombinadicTable {
public:
    CombinadicTable(int n, int k, std::int64_t cap = kDefaultCap);

    int n() const { return n_; }
    int k() const { return k_; }
    std::int64_t count() const { return count_; }

    /// Position (1-based) of `entries` in lexicographic order.
    std::int64_t rank(const std::vector<int>& entries) const;
    std::int64_t rank(const MultiIndex& idx) const;

    /// Inverse of rank; i in 1..count().
    std::vector<int> unrank(std::int64_t i) const;

private:
    int n_;
    int k_;
    std::int64_t cap_;
    std::int64_t count_;
};

/// In-place lexicographic successor of a k-subset of {1..n} (1-based).
/// Returns false when `c` was the last subset.
bool next_combination(std::vector<int>& c, int n);

/// First k-subset (1,2,...,k).
std::vector<int> first_combination(int k);

/// d-hat: all m-fold products d_{i1}...d_{im} over increasing tuples, in
/// lexicographic order. Length C(R,m). For m=1 this is d itself.
template <class S>
std::vector<S> product_vector(const std::vector<S>& d, int m,
                              std::int64_t cap = kDefaultCap) {
    const int R = static_cast<int>(d.size());
    if (m < 1 || m > R) throw domain_error("product_vector: m out of range");
    const std::int64_t len = binomial_checked(R, m, cap);
    std::vector<S> out;
    out.reserve(static_cast<std::size_t>(len));
    std::vector<int> c = first_combination(m);
    while (true) {
        S p = d[static_cast<std::size_t>(c[0] - 1)];
        for (int t = 1; t < m; ++t) p = p * d[static_cast<std::size_t>(c[t] - 1)];
        out.push_back(p);
        if (!next_combination(c, R)) break;
    }
    return out;
}

/// Number of nonzero entries (exact scalars; see linalg.hpp for the
/// tolerance-aware float variant).
template <class S>
int weight(const std::vector<S>& d) {
    int w = 0;
    for (const auto& v : d)
        if (!(v == S(0))) ++w;
    return w;
}

} // namespace cpdcert

#endif
