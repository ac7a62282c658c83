#include <doctest.h>

#include <random>

#include "cpdcert/combinatorics.hpp"
#include "oracles.hpp"
#include "paper_data.hpp"

using namespace cpdcert;

TEST_CASE("lexicographic rank of 2-subsets of {1..4}") {
    CombinadicTable t(4, 2);
    CHECK(t.count() == 6);
    CHECK(t.rank({1, 2}) == 1);
    CHECK(t.rank({1, 3}) == 2);
    CHECK(t.rank({1, 4}) == 3);
    CHECK(t.rank({2, 3}) == 4);
    CHECK(t.rank({2, 4}) == 5);
    CHECK(t.rank({3, 4}) == 6);
}

TEST_CASE("singletons rank as themselves") {
    for (int R : {1, 3, 7}) {
        CombinadicTable t(R, 1);
        for (int j = 1; j <= R; ++j) {
            CHECK(t.rank({j}) == j);
            CHECK(t.unrank(j) == std::vector<int>{j});
        }
    }
}

TEST_CASE("unrank golden values") {
    CHECK(CombinadicTable(4, 2).unrank(4) == std::vector<int>{2, 3});
    CHECK(CombinadicTable(4, 2).unrank(1) == std::vector<int>{1, 2});
    CHECK(CombinadicTable(7, 5).unrank(1) == std::vector<int>{1, 2, 3, 4, 5});
}

TEST_CASE("rank/unrank is an order-preserving bijection (exhaustive, n <= 8)") {
    for (int n = 1; n <= 8; ++n)
        for (int k = 1; k <= n; ++k) {
            CombinadicTable t(n, k);
            std::vector<int> prev;
            for (std::int64_t i = 1; i <= t.count(); ++i) {
                const auto s = t.unrank(i);
                CHECK(t.rank(s) == i);
                if (!prev.empty()) CHECK(prev < s); // strict lexicographic increase
                prev = s;
            }
            // Exhausts S_n^k: count matches and enumeration agrees.
            std::vector<int> c = first_combination(k);
            std::int64_t i = 1;
            do CHECK(t.unrank(i++) == c);
            while (next_combination(c, n));
            CHECK(i - 1 == t.count());
        }
}

TEST_CASE("invalid multi-indices are rejected") {
    CombinadicTable t(5, 3);
    CHECK_THROWS_AS(t.rank({3, 2, 1}), domain_error);
    CHECK_THROWS_AS(t.rank({1, 2, 6}), domain_error);
    CHECK_THROWS_AS(t.rank({1, 2}), domain_error);
    CHECK_THROWS_AS(t.unrank(0), domain_error);
    CHECK_THROWS_AS(t.unrank(11), domain_error);
}

TEST_CASE("combinatorial cap refuses huge tables") {
    CHECK_THROWS_AS(binomial_checked(64, 32, kDefaultCap), resource_error);
    CHECK_THROWS_AS(CombinadicTable(64, 32), resource_error);
    CHECK(binomial_checked(64, 32, static_cast<std::int64_t>(4) << 60) > 0);
}

TEST_CASE("product vector: pairwise products in lexicographic order") {
    const std::vector<Rat> d = testdata::vec_of({2, 3, 5, 7});
    const auto p = product_vector(d, 2);
    CHECK(p == testdata::vec_of({6, 10, 14, 15, 21, 35}));
}

TEST_CASE("product vector of a range-constrained d") {
    // d = (x2, x2, x1, x2) at (x1, x2) = (3, 5).
    const std::vector<Rat> d = testdata::vec_of({5, 5, 3, 5});
    CHECK(product_vector(d, 2) == testdata::vec_of({25, 15, 25, 15, 25, 15}));
}

TEST_CASE("product vector is d itself for m = 1") {
    std::mt19937_64 rng(7);
    const auto d = oracles::random_int_vector<Rat>(rng, 6);
    CHECK(product_vector(d, 1) == d);
}

TEST_CASE("product vector vanishing matches the support count (all patterns, R = 6)") {
    // omega(d) <= m-1 iff d-hat = 0; omega(d) = m iff exactly one nonzero.
    const int R = 6;
    for (int mask = 0; mask < (1 << R); ++mask) {
        std::vector<Rat> d(R, Rat(0));
        int w = 0;
        for (int i = 0; i < R; ++i)
            if (mask & (1 << i)) {
                d[static_cast<std::size_t>(i)] = Rat(i + 2);
                ++w;
            }
        for (int m = 1; m <= R; ++m) {
            const auto p = product_vector(d, m);
            int nonzero = 0;
            for (const auto& e : p)
                if (!(e == Rat(0))) ++nonzero;
            if (w <= m - 1) CHECK(nonzero == 0);
            else CHECK(nonzero > 0);
            if (w == m) CHECK(nonzero == 1);
        }
    }
}

TEST_CASE("product vector scales homogeneously of degree m") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int R = 5;
        const auto d = oracles::random_int_vector<Rat>(rng, R);
        const Rat lambda(3, 7);
        for (int m = 1; m <= R; ++m) {
            std::vector<Rat> scaled(d);
            for (auto& e : scaled) e *= lambda;
            auto lhs = product_vector(scaled, m);
            auto rhs = product_vector(d, m);
            Rat factor(1);
            for (int t = 0; t < m; ++t) factor *= lambda;
            for (auto& e : rhs) e *= factor;
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("product vector rejects out-of-range m") {
    const std::vector<Rat> d = testdata::vec_of({1, 2, 3});
    CHECK_THROWS_AS(product_vector(d, 0), domain_error);
    CHECK_THROWS_AS(product_vector(d, 4), domain_error);
}
