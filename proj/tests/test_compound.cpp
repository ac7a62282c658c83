#include <doctest.h>

#include <random>

#include "cpdcert/compound.hpp"
#include "oracles.hpp"
#include "paper_data.hpp"

using namespace cpdcert;
using testdata::mat;

TEST_CASE("second compound of the bordered identity, slots at (2,3,5)") {
    const auto c2 = compound(testdata::bordered_identity(2, 3, 5), 2);
    CHECK(c2.data == testdata::bordered_identity_c2(2, 3, 5));
    CHECK(c2.source_rows == 3);
    CHECK(c2.source_cols == 4);
    CHECK(c2.order == 2);
    CHECK(c2.col_label(4) == std::vector<int>{2, 3});
}

TEST_CASE("first compound is the matrix itself") {
    std::mt19937_64 rng(2);
    const auto m = oracles::random_int_matrix<Rat>(rng, 3, 5);
    CHECK(compound(m, 1).data == m);
}

TEST_CASE("top compound of a square matrix is its determinant") {
    std::mt19937_64 rng(4);
    for (int n = 2; n <= 5; ++n) {
        const auto m = oracles::random_int_matrix<Rat>(rng, n, n);
        const auto c = compound(m, n);
        CHECK(c.data.rows() == 1);
        CHECK(c.data.cols() == 1);
        CHECK(c.data(0, 0) == oracles::naive_det(m));
    }
}

TEST_CASE("compound matches the naive minor oracle") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 8; ++trial) {
        const int rows = 3 + static_cast<int>(rng() % 3);
        const int cols = 3 + static_cast<int>(rng() % 3);
        const auto m = oracles::random_int_matrix<Rat>(rng, rows, cols);
        for (int k = 1; k <= std::min(rows, cols); ++k)
            CHECK(compound(m, k).data == oracles::naive_compound(m, k));
    }
    // Including the cited example shape: C_3 of a random 4x4.
    const auto m = oracles::random_int_matrix<Rat>(rng, 4, 4);
    CHECK(compound(m, 3).data == oracles::naive_compound(m, 3));
}

TEST_CASE("compound rejects out-of-range order and huge results") {
    const auto m = mat({{1, 2}, {3, 4}});
    CHECK_THROWS_AS(compound(m, 3), domain_error);
    CHECK_THROWS_AS(compound(m, 0), domain_error);
    Matrix<Rat> big(40, 40);
    for (int i = 0; i < 40; ++i) big(i, i) = Rat(1);
    CHECK_THROWS_AS(compound(big, 20), resource_error);
}

TEST_CASE("diagonal compound is the product vector") {
    SUBCASE("triple products of four slots") {
        const std::vector<Rat> d = testdata::vec_of({2, 3, 5, 7});
        CHECK(compound_diag(d, 3) == testdata::vec_of({30, 42, 70, 105}));
    }
    SUBCASE("all ones") {
        const std::vector<Rat> d(5, Rat(1));
        const auto c = compound_diag(d, 3);
        CHECK(c.size() == 10);
        for (const auto& e : c) CHECK(e == Rat(1));
    }
    SUBCASE("agrees with the full compound of Diag(d)") {
        std::mt19937_64 rng(8);
        const auto d = oracles::random_int_vector<Rat>(rng, 5);
        const auto full = compound(Matrix<Rat>::diagonal(d), 2);
        const auto diag = compound_diag(d, 2);
        for (int i = 0; i < full.data.rows(); ++i)
            for (int j = 0; j < full.data.cols(); ++j)
                CHECK(full.data(i, j) == (i == j ? diag[static_cast<std::size_t>(i)] : Rat(0)));
    }
}

TEST_CASE("compound Khatri-Rao golden values") {
    SUBCASE("the 2x4 example at m = 2 gives a single row") {
        const auto u = khatri_rao_compound(testdata::w2_A(), testdata::w2_B(), 2);
        CHECK(u == mat({{1, 0, 2, 0, 1, 0}}));
    }
    SUBCASE("m = 1 reduces to the plain Khatri-Rao product") {
        std::mt19937_64 rng(10);
        const auto a = oracles::random_int_matrix<Rat>(rng, 3, 4);
        const auto b = oracles::random_int_matrix<Rat>(rng, 2, 4);
        CHECK(khatri_rao_compound(a, b, 1) == khatri_rao(a, b));
    }
    SUBCASE("the 36x21 showcase matrix has rank 19 and two zero columns") {
        const auto u = khatri_rao_compound(testdata::w5_A(), testdata::w5_B(), 5);
        CHECK(u.rows() == 36);
        CHECK(u.cols() == 21);
        CHECK(rank(u) == 19);
        CombinadicTable t(7, 5);
        std::vector<std::vector<int>> zero_cols;
        for (int j = 0; j < u.cols(); ++j) {
            bool zero = true;
            for (int i = 0; i < u.rows(); ++i)
                if (!(u(i, j) == Rat(0))) { zero = false; break; }
            if (zero) zero_cols.push_back(t.unrank(j + 1));
        }
        CHECK(zero_cols == std::vector<std::vector<int>>{{1, 2, 3, 4, 5}, {1, 4, 5, 6, 7}});
    }
}

TEST_CASE("phi map: the 6x4 expansion pattern") {
    const auto p = phi_map(testdata::vec_of({1, 2, 3, 4}), 2);
    CHECK(p == mat({{2, -1, 0, 0},
                    {3, 0, -1, 0},
                    {4, 0, 0, -1},
                    {0, 3, -2, 0},
                    {0, 4, 0, -2},
                    {0, 0, 4, -3}}));
}

TEST_CASE("phi map at m = I is the alternating row vector") {
    const auto p = phi_map(testdata::vec_of({7, 11, 13}), 3);
    CHECK(p == mat({{13, -11, 7}}));
}

TEST_CASE("phi map satisfies the bordered-compound identity") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const int I = 5, m = 3;
        const auto a = oracles::random_int_matrix<Rat>(rng, I, m - 1);
        const auto x = oracles::random_int_vector<Rat>(rng, I);
        Matrix<Rat> ax(I, m);
        for (int i = 0; i < I; ++i) {
            for (int j = 0; j < m - 1; ++j) ax(i, j) = a(i, j);
            ax(i, m - 1) = x[static_cast<std::size_t>(i)];
        }
        CHECK(compound(ax, m).data == phi_map(x, m) * compound(a, m - 1).data);
    }
}

TEST_CASE("phi map is linear in its vector argument") {
    std::mt19937_64 rng(14);
    const int I = 5, m = 3;
    const auto x = oracles::random_int_vector<Rat>(rng, I);
    const auto y = oracles::random_int_vector<Rat>(rng, I);
    const Rat alpha(3), beta(-2);
    std::vector<Rat> z(static_cast<std::size_t>(I));
    for (int i = 0; i < I; ++i)
        z[static_cast<std::size_t>(i)] =
            alpha * x[static_cast<std::size_t>(i)] + beta * y[static_cast<std::size_t>(i)];
    CHECK(phi_map(z, m) == phi_map(x, m).scaled(alpha) + phi_map(y, m).scaled(beta));
}

TEST_CASE("vectorized compound identity holds") {
    std::mt19937_64 rng(16);
    SUBCASE("random instances") {
        for (int trial = 0; trial < 10; ++trial) {
            const auto a = oracles::random_int_matrix<Rat>(rng, 3, 4);
            const auto b = oracles::random_int_matrix<Rat>(rng, 3, 4);
            const auto d = oracles::random_int_vector<Rat>(rng, 4);
            CHECK(vec_compound_identity_check(a, b, d, 2));
        }
    }
    SUBCASE("zero weight vector") {
        const auto a = oracles::random_int_matrix<Rat>(rng, 3, 4);
        const auto b = oracles::random_int_matrix<Rat>(rng, 3, 4);
        CHECK(vec_compound_identity_check(a, b, std::vector<Rat>(4, Rat(0)), 2));
    }
    SUBCASE("k = 1 is the basic vectorization identity") {
        const auto a = oracles::random_int_matrix<Rat>(rng, 3, 4);
        const auto b = oracles::random_int_matrix<Rat>(rng, 2, 4);
        const auto d = oracles::random_int_vector<Rat>(rng, 4);
        CHECK(vec_compound_identity_check(a, b, d, 1));
    }
}

TEST_CASE("compound algebra on random instances") {
    std::mt19937_64 rng(18);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 2);
        const auto a = oracles::random_int_matrix<Rat>(rng, n, n, -4, 4);
        const auto b = oracles::random_int_matrix<Rat>(rng, n, n, -4, 4);
        for (int k = 1; k <= n; ++k) {
            // Product rule.
            CHECK(compound(a * b, k).data == compound(a, k).data * compound(b, k).data);
            // Transpose rule.
            CHECK(compound(a.transpose(), k).data == compound(a, k).data.transpose());
            // Identity rule.
            const auto ci = compound(Matrix<Rat>::identity(n), k);
            CHECK(ci.data == Matrix<Rat>::identity(ci.data.rows()));
        }
    }
}

TEST_CASE("compound of an inverse inverts the compound") {
    std::mt19937_64 rng(20);
    int done = 0;
    while (done < 5) {
        const int n = 4;
        const auto a = oracles::random_int_matrix<Rat>(rng, n, n, -3, 3);
        if (oracles::naive_det(a) == Rat(0)) continue;
        ++done;
        // Inverse via the compound product rule: C_k(A) C_k(A^{-1}) = I.
        const auto inv = [&]() {
            Matrix<Rat> aug(n, n), id = Matrix<Rat>::identity(n);
            Matrix<Rat> result(n, n);
            for (int col = 0; col < n; ++col) {
                const auto x = solve_consistent(a, id.col(col));
                REQUIRE(x.has_value());
                for (int i = 0; i < n; ++i) result(i, col) = (*x)[static_cast<std::size_t>(i)];
            }
            return result;
        }();
        for (int k = 1; k <= n; ++k) {
            const auto prod = compound(a, k).data * compound(inv, k).data;
            CHECK(prod == Matrix<Rat>::identity(prod.rows()));
        }
    }
}

TEST_CASE("determinant of a compound follows the power law") {
    std::mt19937_64 rng(22);
    for (int n = 2; n <= 5; ++n) {
        const auto a = oracles::random_int_matrix<Rat>(rng, n, n, -3, 3);
        const Rat det = oracles::naive_det(a);
        for (int k = 1; k <= n; ++k) {
            const Rat cd = oracles::naive_det(compound(a, k).data);
            Rat expect(1);
            const auto e = binomial_checked(n - 1, k - 1);
            for (int t = 0; t < e; ++t) expect *= det;
            CHECK(cd == expect);
        }
    }
}

TEST_CASE("zero columns and zero compounds mirror k-rank and rank") {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 12; ++trial) {
        const int rows = 3 + static_cast<int>(rng() % 2);
        const int cols = 3 + static_cast<int>(rng() % 3);
        auto m = oracles::random_int_matrix<Rat>(rng, rows, cols, -2, 2);
        const int kr = k_rank(m), r = rank(m);
        for (int k = 1; k <= std::min(rows, cols); ++k) {
            const auto c = compound(m, k);
            bool has_zero_col = false;
            for (int j = 0; j < c.data.cols() && !has_zero_col; ++j) {
                bool zero = true;
                for (int i = 0; i < c.data.rows(); ++i)
                    if (!(c.data(i, j) == Rat(0))) { zero = false; break; }
                has_zero_col = zero;
            }
            CHECK(has_zero_col == (k > kr));
            CHECK(c.data.is_zero() == (k > r));
        }
    }
}
