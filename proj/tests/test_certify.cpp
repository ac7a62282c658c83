#include <doctest.h>

#include <random>

#include "cpdcert/certify.hpp"
#include "oracles.hpp"
#include "paper_data.hpp"

using namespace cpdcert;
using testdata::mat;

namespace {

const ChainStep* fired_step(const UniquenessCertificate<Rat>& cert) {
    for (const auto& s : cert.chain)
        if (s.fired) return &s;
    return nullptr;
}

} // namespace

TEST_CASE("showcase triple: third factor unique via the (W5) route") {
    const auto cert = certify_third(testdata::w5_A(), testdata::w5_B(), testdata::w5_C());
    CHECK(cert.conclusion == Conclusion::ThirdFactorUnique);
    CHECK(cert.m_used == 5);
    const auto* step = fired_step(cert);
    REQUIRE(step != nullptr);
    CHECK(step->rule == "restricted_kernel(W5)");
}

TEST_CASE("showcase triple: overall CPD is not unique (k_C = 1)") {
    const auto cert = certify_overall(testdata::w5_A(), testdata::w5_B(), testdata::w5_C());
    CHECK(cert.conclusion == Conclusion::NotUnique);
    const auto* step = fired_step(cert);
    REQUIRE(step != nullptr);
    CHECK(step->rule == "krank_floor_necessary");
}

TEST_CASE("identity triple at R = 2") {
    const auto id = Matrix<Rat>::identity(2);
    SUBCASE("third factor unique via (K2)") {
        const auto cert = certify_third(id, id, id);
        CHECK(cert.conclusion == Conclusion::ThirdFactorUnique);
        CHECK(cert.m_used == 2);
        const auto* step = fired_step(cert);
        REQUIRE(step != nullptr);
        CHECK(step->rule == "krank_inequalities(K2)");
    }
    SUBCASE("overall unique, with the k-rank sum at its boundary") {
        const auto cert = certify_overall(id, id, id);
        CHECK(cert.conclusion == Conclusion::OverallUnique);
    }
}

TEST_CASE("generic triple with a full-column-rank factor is overall unique") {
    std::mt19937_64 rng(7);
    int done = 0;
    while (done < 5) {
        const auto a = oracles::random_int_matrix<Rat>(rng, 5, 4);
        const auto b = oracles::random_int_matrix<Rat>(rng, 5, 4);
        const auto c = oracles::random_int_matrix<Rat>(rng, 4, 4);
        if (oracles::brute_krank(a) != 4 || oracles::brute_krank(b) != 4 ||
            oracles::brute_krank(c) != 4)
            continue;
        ++done;
        CHECK(check_Km(a, b, 2).status == Status::Holds); // (K2) should back the route
        const auto cert = certify_overall(a, b, c);
        CHECK(cert.conclusion == Conclusion::OverallUnique);
        const auto* step = fired_step(cert);
        REQUIRE(step != nullptr);
        CHECK(step->rule == "full_rank_factor_u2");
    }
}

TEST_CASE("single rank-1 term") {
    const auto one = mat({{2}, {1}});
    CHECK(certify_overall(one, one, one).conclusion == Conclusion::OverallUnique);
    const auto zero = mat({{0}, {0}});
    CHECK(certify_overall(one, one, zero).conclusion == Conclusion::NotUnique);
}

TEST_CASE("zero column refutes both certificates") {
    const auto a = mat({{1, 0}, {0, 0}});
    const auto b = Matrix<Rat>::identity(2);
    CHECK(certify_third(a, b, b).conclusion == Conclusion::NotUnique);
    CHECK(certify_overall(a, b, b).conclusion == Conclusion::NotUnique);
}

TEST_CASE("duplicated rank-1 term refutes third-factor uniqueness") {
    // Terms 1 and 3 proportional in all three factors.
    const auto a = mat({{1, 0, 2}, {1, 1, 2}});
    const auto b = mat({{1, 1, 3}, {0, 1, 0}});
    const auto c = mat({{1, 0, 1}, {1, 1, 1}});
    const auto cert = certify_third(a, b, c);
    CHECK(cert.conclusion == Conclusion::NotUnique);
    const auto* step = fired_step(cert);
    REQUIRE(step != nullptr);
    CHECK(step->rule == "proportional_terms");
}

TEST_CASE("rank-one C handled through the subset-rank route, beyond min(I,J)") {
    // R = 2, C = [c, 2c]: m = 3 > min(I,J) = 2, but H(delta) = delta.
    const auto id = Matrix<Rat>::identity(2);
    const auto c = mat({{1, 2}, {2, 4}});
    const auto cert = certify_third(id, id, c);
    CHECK(cert.m_used == 3);
    CHECK(cert.conclusion == Conclusion::ThirdFactorUnique);
    const auto* step = fired_step(cert);
    REQUIRE(step != nullptr);
    CHECK(step->rule == "subset_rank_profile(H3)");
}

TEST_CASE("mode rotation") {
    std::mt19937_64 rng(11);
    FactorTriple<Rat> f{oracles::random_int_matrix<Rat>(rng, 2, 3),
                        oracles::random_int_matrix<Rat>(rng, 3, 3),
                        oracles::random_int_matrix<Rat>(rng, 4, 3)};
    SUBCASE("target 3 is the identity") {
        const auto g = mode_rotate(f, 3);
        CHECK(g.a == f.a);
        CHECK(g.b == f.b);
        CHECK(g.c == f.c);
    }
    SUBCASE("target 1 cycles to (B, C, A)") {
        const auto g = mode_rotate(f, 1);
        CHECK(g.a == f.b);
        CHECK(g.b == f.c);
        CHECK(g.c == f.a);
    }
    SUBCASE("rotation composes like the 3-cycle") {
        const auto g = mode_rotate(mode_rotate(f, 1), 1);
        const auto h = mode_rotate(f, 2);
        CHECK(g.a == h.a);
        CHECK(g.b == h.b);
        CHECK(g.c == h.c);
    }
    SUBCASE("rebuilt tensor is the mode-permuted tensor") {
        const auto t = build_tensor(f);
        const auto g = mode_rotate(f, 1);
        const auto u = build_tensor(g); // u_{jki} = t_{ijk}
        for (int i = 0; i < t.I; ++i)
            for (int j = 0; j < t.J; ++j)
                for (int k = 0; k < t.K; ++k) CHECK(u.at(j, k, i) == t.at(i, j, k));
    }
}

TEST_CASE("certificates are invariant under trivial column rescalings") {
    std::mt19937_64 rng(13);
    auto a = testdata::w5_A();
    auto b = testdata::w5_B();
    const auto c = testdata::w5_C();
    const auto before_third = certify_third(a, b, c).conclusion;
    const auto before_overall = certify_overall(a, b, c).conclusion;
    // Scale column r of A by lambda and of B by 1/lambda.
    const int r = 3;
    const Rat lambda(5, 3);
    for (int i = 0; i < a.rows(); ++i) a(i, r) *= lambda;
    for (int i = 0; i < b.rows(); ++i) b(i, r) /= lambda;
    CHECK(certify_third(a, b, c).conclusion == before_third);
    CHECK(certify_overall(a, b, c).conclusion == before_overall);
}

TEST_CASE("overall uniqueness never contradicts per-mode third-factor refutation") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 15; ++trial) {
        const int R = 2 + static_cast<int>(rng() % 3);
        FactorTriple<Rat> f{oracles::random_int_matrix<Rat>(rng, 2 + static_cast<int>(rng() % 3), R, -2, 2),
                            oracles::random_int_matrix<Rat>(rng, 2 + static_cast<int>(rng() % 3), R, -2, 2),
                            oracles::random_int_matrix<Rat>(rng, 2 + static_cast<int>(rng() % 3), R, -2, 2)};
        CheckOptions opts;
        opts.enable_search = false;
        const auto overall = certify_overall(f.a, f.b, f.c, opts);
        if (overall.conclusion != Conclusion::OverallUnique) continue;
        for (int target = 1; target <= 3; ++target)
            CHECK(certify_third_mode(f, target, opts).conclusion != Conclusion::NotUnique);
    }
}

TEST_CASE("certificates replay deterministically") {
    CheckOptions opts;
    opts.seed = 42;
    const auto c1 = certify_third(testdata::w5_A(), testdata::w5_B(), testdata::w5_C(), opts);
    const auto c2 = certify_third(testdata::w5_A(), testdata::w5_B(), testdata::w5_C(), opts);
    CHECK(c1.conclusion == c2.conclusion);
    REQUIRE(c1.chain.size() == c2.chain.size());
    for (std::size_t i = 0; i < c1.chain.size(); ++i) {
        CHECK(c1.chain[i].rule == c2.chain[i].rule);
        CHECK(c1.chain[i].verdict == c2.chain[i].verdict);
        CHECK(c1.chain[i].detail == c2.chain[i].detail);
    }
    CHECK(c1.hash_a == c2.hash_a);
}

TEST_CASE("certificate records the reproducibility block") {
    CheckOptions opts;
    opts.seed = 9;
    const auto cert = certify_overall(Matrix<Rat>::identity(2), Matrix<Rat>::identity(2),
                                      Matrix<Rat>::identity(2), opts);
    CHECK(cert.backend == "exact");
    CHECK(cert.seed == 9);
    CHECK(cert.version == std::string(kVersion));
    CHECK(cert.hash_a == cert.hash_b);
    CHECK(cert.hash_a.size() == 16);
}
