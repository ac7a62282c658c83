#include "cpdcert/combinatorics.hpp"

#include <sstream>

namespace cpdcert {

std::int64_t binomial_checked(int n, int k, std::int64_t cap) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::int64_t value = 1;
    for (int i = 1; i <= k; ++i) {
        // value * (n-k+i) stays below ~cap * n, which fits comfortably in
        // int64 for any cap <= 2^52 / n; division is exact at each step.
        value = value * (n - k + i) / i;
        if (value > cap)
            throw resource_error("C(" + std::to_string(n) + "," + std::to_string(k) +
                                 ") exceeds combinatorial cap " + std::to_string(cap));
    }
    return value;
}

bool MultiIndex::valid() const {
    if (k != static_cast<int>(entries.size()) || k < 1 || k > n) return false;
    int prev = 0;
    for (int e : entries) {
        if (e <= prev || e > n) return false;
        prev = e;
    }
    return true;
}

std::string MultiIndex::to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i) os << ',';
        os << entries[i];
    }
    os << ')';
    return os.str();
}

CombinadicTable::CombinadicTable(int n, int k, std::int64_t cap)
    : n_(n), k_(k), cap_(cap) {
    if (k < 1 || n < 1 || k > n)
        throw domain_error("CombinadicTable: need 1 <= k <= n, got n=" + std::to_string(n) +
                           " k=" + std::to_string(k));
    count_ = binomial_checked(n, k, cap);
}

std::int64_t CombinadicTable::rank(const std::vector<int>& entries) const {
    MultiIndex idx{n_, static_cast<int>(entries.size()), entries};
    return rank(idx);
}

std::int64_t CombinadicTable::rank(const MultiIndex& idx) const {
    if (idx.n != n_ || idx.k != k_ || !idx.valid())
        throw domain_error("rank: invalid multi-index " + idx.to_string() + " for (n=" +
                           std::to_string(n_) + ",k=" + std::to_string(k_) + ")");
    // Count subsets that are lexicographically smaller.
    std::int64_t before = 0;
    int prev = 0;
    for (int t = 0; t < k_; ++t) {
        for (int j = prev + 1; j < idx.entries[static_cast<std::size_t>(t)]; ++j)
            before += binomial_checked(n_ - j, k_ - t - 1, cap_);
        prev = idx.entries[static_cast<std::size_t>(t)];
    }
    return before + 1;
}

std::vector<int> CombinadicTable::unrank(std::int64_t i) const {
    if (i < 1 || i > count_)
        throw domain_error("unrank: index " + std::to_string(i) + " outside 1.." +
                           std::to_string(count_));
    std::vector<int> out(static_cast<std::size_t>(k_));
    std::int64_t remaining = i - 1;
    int prev = 0;
    for (int t = 0; t < k_; ++t) {
        int j = prev + 1;
        while (true) {
            const std::int64_t block = binomial_checked(n_ - j, k_ - t - 1, cap_);
            if (remaining < block) break;
            remaining -= block;
            ++j;
        }
        out[static_cast<std::size_t>(t)] = j;
        prev = j;
    }
    return out;
}

bool next_combination(std::vector<int>& c, int n) {
    const int k = static_cast<int>(c.size());
    int t = k - 1;
    while (t >= 0 && c[static_cast<std::size_t>(t)] == n - (k - 1 - t)) --t;
    if (t < 0) return false;
    ++c[static_cast<std::size_t>(t)];
    for (int j = t + 1; j < k; ++j)
        c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    return true;
}

std::vector<int> first_combination(int k) {
    std::vector<int> c(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) c[static_cast<std::size_t>(i)] = i + 1;
    return c;
}

} // namespace cpdcert
