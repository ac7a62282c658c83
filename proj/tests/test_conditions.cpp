#include <doctest.h>

#include <random>

#include "cpdcert/conditions.hpp"
#include "oracles.hpp"
#include "paper_data.hpp"

using namespace cpdcert;
using testdata::mat;

namespace {

// Independent H(delta) via the nonzero-minor rank oracle.
int oracle_h(const Matrix<Rat>& a, const Matrix<Rat>& b, int delta) {
    int best = 1 << 20;
    std::vector<int> c = first_combination(delta);
    std::vector<int> rows_a(static_cast<std::size_t>(a.rows()));
    for (int i = 0; i < a.rows(); ++i) rows_a[static_cast<std::size_t>(i)] = i + 1;
    std::vector<int> rows_b(static_cast<std::size_t>(b.rows()));
    for (int i = 0; i < b.rows(); ++i) rows_b[static_cast<std::size_t>(i)] = i + 1;
    do {
        const int v = oracles::brute_rank(a.select(rows_a, c)) +
                      oracles::brute_rank(b.select(rows_b, c)) - delta;
        best = std::min(best, v);
    } while (next_combination(c, a.cols()));
    return best;
}

// Recheck a (Um)/(Wm) Fails witness directly against U and d-hat.
void recheck_um_witness(const Matrix<Rat>& a, const Matrix<Rat>& b, int m,
                        const std::vector<Rat>& d) {
    const auto u = khatri_rao_compound(a, b, m);
    const auto dhat = product_vector(d, m);
    bool nonzero = false;
    for (const auto& e : dhat)
        if (!(e == Rat(0))) nonzero = true;
    CHECK(nonzero);
    for (const auto& e : u * dhat) CHECK(e == Rat(0));
}

} // namespace

TEST_CASE("(Km) on the showcase example fails at m = 5") {
    const auto v = check_Km(testdata::w5_A(), testdata::w5_B(), 5);
    CHECK(v.status == Status::Fails);
}

TEST_CASE("(Km) holds for identity factors when R >= m") {
    for (int R : {2, 3, 5}) {
        const auto id = Matrix<Rat>::identity(R);
        CHECK(check_Km(id, id, 2).status == Status::Holds);
    }
}

TEST_CASE("(Km) holds for generic full-k-rank factors") {
    std::mt19937_64 rng(41);
    int done = 0;
    while (done < 5) {
        const auto a = oracles::random_int_matrix<Rat>(rng, 6, 5);
        const auto b = oracles::random_int_matrix<Rat>(rng, 6, 5);
        if (oracles::brute_krank(a) != 5 || oracles::brute_krank(b) != 5) continue;
        ++done;
        CHECK(check_Km(a, b, 3).status == Status::Holds);
    }
}

TEST_CASE("H profile of identity factors is the diagonal") {
    const auto id = Matrix<Rat>::identity(4);
    const auto p = h_profile(id, id);
    CHECK(p.values == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("H(1) = 0 when A has a zero column against a nonzero column of B") {
    const auto a = mat({{0, 1}, {0, 0}});
    const auto b = mat({{1, 1}, {1, 0}});
    CHECK(h_profile(a, b).values.front() == 0);
}

TEST_CASE("H profile of the showcase pair matches the enumeration oracle") {
    const auto a = testdata::w5_A(), b = testdata::w5_B();
    const auto p = h_profile(a, b);
    REQUIRE(p.values.size() == 7);
    for (int delta = 1; delta <= 7; ++delta)
        CHECK(p.values[static_cast<std::size_t>(delta - 1)] == oracle_h(a, b, delta));
}

TEST_CASE("(Hm) holds whenever (Km) holds (random sample)") {
    std::mt19937_64 rng(43);
    int tested = 0;
    while (tested < 10) {
        const int R = 3 + static_cast<int>(rng() % 3);
        const auto a = oracles::random_int_matrix<Rat>(rng, 3 + static_cast<int>(rng() % 3), R);
        const auto b = oracles::random_int_matrix<Rat>(rng, 3 + static_cast<int>(rng() % 3), R);
        const int m = 1 + static_cast<int>(rng() % 3);
        if (check_Km(a, b, m).status != Status::Holds) continue;
        ++tested;
        CHECK(check_Hm(a, b, m).status == Status::Holds);
    }
}

TEST_CASE("(H2) fails on a proportional column pair") {
    // Columns 1 and 2 of A proportional; B generic of rank 2 on that pair.
    const auto a = mat({{1, 2, 0}, {2, 4, 1}, {0, 0, 1}});
    const auto b = mat({{1, 0, 1}, {0, 1, 1}, {1, 1, 0}});
    const auto v = check_Hm(a, b, 2);
    CHECK(v.status == Status::Fails);
    REQUIRE(v.witness_delta.has_value());
    CHECK(*v.witness_delta == 2);
    REQUIRE(v.witness_subset.has_value());
    CHECK(*v.witness_subset == std::vector<int>{1, 2});
}

TEST_CASE("(Cm) verdicts") {
    SUBCASE("showcase at m = 5: rank 19 of 21") {
        const auto v = check_Cm(testdata::w5_A(), testdata::w5_B(), 5);
        CHECK(v.status == Status::Fails);
        REQUIRE(v.witness_d.has_value());
        // The kernel witness really annihilates U.
        const auto u = khatri_rao_compound(testdata::w5_A(), testdata::w5_B(), 5);
        for (const auto& e : u * *v.witness_d) CHECK(e == Rat(0));
    }
    SUBCASE("1x6 row cannot have full column rank") {
        CHECK(check_Cm(testdata::w2_A(), testdata::w2_B(), 2).status == Status::Fails);
    }
    SUBCASE("identity factors at m = 1") {
        const auto id = Matrix<Rat>::identity(3);
        CHECK(check_Cm(id, id, 1).status == Status::Holds);
    }
}

TEST_CASE("(Um) fails via a dependent column set when min k-rank < m") {
    const auto a = testdata::w5_A(), b = testdata::w5_B();
    const auto v = check_Um(a, b, 5);
    CHECK(v.status == Status::Fails);
    REQUIRE(v.witness_d.has_value());
    REQUIRE(v.witness_subset.has_value());
    CHECK(*v.witness_subset == std::vector<int>{1, 2, 3, 4, 5});
    recheck_um_witness(a, b, 5, *v.witness_d);
}

TEST_CASE("(U1) is decided by the rank of A kr B") {
    const auto id = Matrix<Rat>::identity(3);
    CHECK(check_Um(id, id, 1).status == Status::Holds);
    const auto v = check_Um(testdata::w2_A(), testdata::w2_B(), 1);
    CHECK(v.status == Status::Fails);
    REQUIRE(v.witness_d.has_value());
    recheck_um_witness(testdata::w2_A(), testdata::w2_B(), 1, *v.witness_d);
}

TEST_CASE("(U2) counterexample found by the randomized search") {
    // 2x3 factors with k_A = k_B = 2 = m, so the dependent-set shortcut
    // cannot apply; the kernel of the 1x3 compound row contains the
    // product vector of d = (3, 3, -1).
    const auto a = mat({{1, 0, 1}, {0, 1, 1}});
    const auto b = mat({{1, 0, 1}, {0, 1, 2}});
    CheckOptions opts;
    opts.seed = 1;
    const auto v = check_Um(a, b, 2, opts);
    CHECK(v.status == Status::Fails);
    REQUIRE(v.witness_d.has_value());
    recheck_um_witness(a, b, 2, *v.witness_d);

    CheckOptions no_search = opts;
    no_search.enable_search = false;
    CHECK(check_Um(a, b, 2, no_search).status == Status::Undetermined);
}

TEST_CASE("(Wm) on the showcase example") {
    const auto a = testdata::w5_A(), b = testdata::w5_B(), c = testdata::w5_C();
    SUBCASE("(W5) holds via support enumeration") {
        const auto v = check_Wm(a, b, c, 5);
        CHECK(v.status == Status::Holds);
    }
    SUBCASE("(W1) holds because A kr B has full column rank") {
        const auto v = check_Wm(a, b, c, 1);
        CHECK(v.status == Status::Holds);
    }
}

TEST_CASE("(Wm) on the 2x4 example") {
    const auto a = testdata::w2_A(), b = testdata::w2_B(), c = testdata::w2_C();
    SUBCASE("(W2) holds via the decidable path") {
        const auto v = check_Wm(a, b, c, 2);
        CHECK(v.status == Status::Holds);
    }
    SUBCASE("(W1) fails with witness e_3") {
        const auto v = check_Wm(a, b, c, 1);
        CHECK(v.status == Status::Fails);
        REQUIRE(v.witness_d.has_value());
        CHECK(*v.witness_d == testdata::vec_of({0, 0, 1, 0}));
        REQUIRE(v.witness_x.has_value());
        CHECK(c.transpose() * *v.witness_x == *v.witness_d);
        // omega(e_3) = 1 > 0 and (A kr B) e_3 = 0.
        const auto u = khatri_rao(a, b);
        for (const auto& e : u * *v.witness_d) CHECK(e == Rat(0));
    }
}

TEST_CASE("(Wm) with identity C coincides with (Um)") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 6; ++trial) {
        const int R = 3 + static_cast<int>(rng() % 2);
        const auto a = oracles::random_int_matrix<Rat>(rng, 3, R, -2, 2);
        const auto b = oracles::random_int_matrix<Rat>(rng, 3, R, -2, 2);
        const auto id = Matrix<Rat>::identity(R);
        const int m = 2;
        if (m > std::min({a.rows(), b.rows(), R})) continue;
        CheckOptions opts;
        opts.seed = trial;
        const auto um = check_Um(a, b, m, opts);
        const auto wm = check_Wm(a, b, id, m, opts);
        if (um.status == Status::Holds) CHECK(wm.status == Status::Holds);
        if (um.status == Status::Fails) CHECK(wm.status == Status::Fails);
        if (wm.status == Status::Fails) CHECK(um.status != Status::Holds);
    }
}

TEST_CASE("(Wm) structural gate defers to Undetermined") {
    const auto a = testdata::w2_A(), b = testdata::w2_B(), c = testdata::w2_C();
    CheckOptions opts;
    opts.wm_max_rank_c = 0; // force the gate shut
    opts.enable_search = false;
    const auto v = check_Wm(a, b, c, 2, opts);
    CHECK(v.status == Status::Undetermined);
}

TEST_CASE("m_for_C") {
    CHECK(m_for_C(7, testdata::w5_C()) == 5);
    CHECK(m_for_C(3, Matrix<Rat>::identity(3)) == 2);
    CHECK(m_for_C(4, testdata::w2_C()) == 4);
}

TEST_CASE("condition checkers validate shapes") {
    const auto a = mat({{1, 0}, {0, 1}});
    const auto b3 = mat({{1, 0, 0}, {0, 1, 0}});
    CHECK_THROWS_AS(check_Km(a, b3, 1), domain_error);
    CHECK_THROWS_AS(check_Um(a, a, 3), domain_error);
    CHECK_THROWS_AS(check_Wm(a, a, b3, 1), domain_error);
}

TEST_CASE("implication lattice on a small random ensemble") {
    std::mt19937_64 rng(53);
    CheckOptions opts;
    opts.enable_search = false;
    int instances = 0;
    while (instances < 25) {
        const int R = 3 + static_cast<int>(rng() % 3); // 3..5
        const int I = 2 + static_cast<int>(rng() % 4);
        const int J = 2 + static_cast<int>(rng() % 4);
        auto a = oracles::random_int_matrix<Rat>(rng, I, R, -2, 2);
        auto b = oracles::random_int_matrix<Rat>(rng, J, R, -2, 2);
        if (rng() % 4 == 0) { // engineered low k-rank: duplicate a column
            const int src = static_cast<int>(rng() % static_cast<unsigned>(R));
            const int dst = (src + 1) % R;
            for (int i = 0; i < a.rows(); ++i) a(i, dst) = a(i, src) * Rat(2);
        }
        ++instances;
        const int mmax = std::min({I, J, R, 3});
        std::vector<Status> km, hm, cm;
        for (int m = 1; m <= mmax; ++m) {
            km.push_back(check_Km(a, b, m, opts).status);
            hm.push_back(check_Hm(a, b, m, opts).status);
            cm.push_back(check_Cm(a, b, m, opts).status);
        }
        for (int m = 2; m <= mmax; ++m) {
            // Chains downward.
            if (km[static_cast<std::size_t>(m - 1)] == Status::Holds)
                CHECK(km[static_cast<std::size_t>(m - 2)] == Status::Holds);
            if (hm[static_cast<std::size_t>(m - 1)] == Status::Holds)
                CHECK(hm[static_cast<std::size_t>(m - 2)] == Status::Holds);
            if (cm[static_cast<std::size_t>(m - 1)] == Status::Holds)
                CHECK(cm[static_cast<std::size_t>(m - 2)] == Status::Holds);
        }
        for (int m = 1; m <= mmax; ++m) {
            if (km[static_cast<std::size_t>(m - 1)] == Status::Holds) {
                CHECK(cm[static_cast<std::size_t>(m - 1)] == Status::Holds);
                CHECK(hm[static_cast<std::size_t>(m - 1)] == Status::Holds);
            }
            // Sound rules: (Cm) or (Hm) holds => check_Um must not fail.
            if (cm[static_cast<std::size_t>(m - 1)] == Status::Holds ||
                hm[static_cast<std::size_t>(m - 1)] == Status::Holds)
                CHECK(check_Um(a, b, m, opts).status != Status::Fails);
        }
    }
}
