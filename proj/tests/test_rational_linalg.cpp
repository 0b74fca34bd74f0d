#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "fjcalc/errors.hpp"
#include "fjcalc/rational_linalg.hpp"
#include "support.hpp"

using namespace fjc;
using fjt::Rng;

namespace {

// Oracle: rank as the size of the largest nonvanishing minor (Laplace expansion).
Rational det(const RationalMatrix& a) {
    const std::size_t n = a.rows();
    if (n == 0) return 1;
    Rational acc = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (a(0, j) == 0) continue;
        RationalMatrix minor(n - 1, n - 1);
        for (std::size_t r = 1; r < n; ++r)
            for (std::size_t c = 0, cc = 0; c < n; ++c)
                if (c != j) minor(r - 1, cc++) = a(r, c);
        acc += (j % 2 == 0 ? 1 : -1) * a(0, j) * det(minor);
    }
    return acc;
}

std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<bool> mask(n);
    std::fill(mask.begin(), mask.begin() + static_cast<long>(k), true);
    do {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < n; ++i)
            if (mask[i]) s.push_back(i);
        out.push_back(s);
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return out;
}

std::size_t minor_rank(const RationalMatrix& a) {
    for (std::size_t k = std::min(a.rows(), a.cols()); k > 0; --k)
        for (const auto& rs : subsets(a.rows(), k))
            for (const auto& cs : subsets(a.cols(), k)) {
                RationalMatrix m(k, k);
                for (std::size_t i = 0; i < k; ++i)
                    for (std::size_t j = 0; j < k; ++j) m(i, j) = a(rs[i], cs[j]);
                if (det(m) != 0) return k;
            }
    return 0;
}

}  // namespace

TEST_SUITE("rational_linalg") {
    TEST_CASE("rank of small fixed matrices") {
        CHECK(rank(RationalMatrix(2, 2)) == 0);
        CHECK(rank(RationalMatrix::identity(3)) == 3);
        auto a = RationalMatrix::from_ints({{1, 2}, {2, 4}});
        CHECK(minor_rank(a) == 1);
        CHECK(rank(a) == 1);
    }

    TEST_CASE("kernel basis examples") {
        CHECK(kernel_basis(RationalMatrix::identity(2)).empty());
        auto k = kernel_basis(RationalMatrix::from_ints({{1, 1}}));
        REQUIRE(k.size() == 1);
        CHECK(k[0][0] == -k[0][1]);
        CHECK(k[0][0] != 0);
        CHECK(kernel_basis(RationalMatrix(1, 2)).size() == 2);
    }

    TEST_CASE("solve examples") {
        auto x = solve(RationalMatrix::identity(2), {Rational(3), Rational(5)});
        REQUIRE(x);
        CHECK((*x)[0] == 3);
        CHECK((*x)[1] == 5);
        auto a = RationalMatrix::from_ints({{1, 1}});
        auto y = solve(a, {Rational(0)});
        REQUIRE(y);
        CHECK(fjc::apply(a, *y)[0] == 0);
        CHECK_FALSE(solve(RationalMatrix::from_ints({{1}, {2}}), {Rational(1), Rational(1)}));
        CHECK_THROWS_AS(solve(RationalMatrix::identity(2), {Rational(1)}), DimensionMismatch);
    }

    TEST_CASE("rationals print in lowest terms") {
        CHECK(to_string(Rational(6, 4)) == "3/2");
        CHECK(to_string(Rational(-4, 2)) == "-2");
        CHECK(parse_rational("-3/6") == Rational(-1, 2));
        CHECK_THROWS_AS(parse_rational("1/x"), ParseError);
        CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
    }

    TEST_CASE("matrix json round trip uses strings") {
        auto a = RationalMatrix::from_rows({{Rational(1, 2), Rational(-3)}, {Rational(0), Rational(7, 5)}});
        auto j = to_json(a);
        CHECK(j.dump() == R"([["1/2","-3"],["0","7/5"]])");
        CHECK(matrix_from_json(j, 2, 2) == a);
    }

    TEST_CASE("property: rank agrees with the minor oracle and rank-nullity holds") {
        Rng rng(101);
        for (int t = 0; t < 150; ++t) {
            auto r = static_cast<std::size_t>(fjt::uniform_int(rng, 0, 4));
            auto c = static_cast<std::size_t>(fjt::uniform_int(rng, 0, 4));
            auto a = fjt::random_low_rank(rng, r, c);
            CHECK(rank(a) == minor_rank(a));
            CHECK(rank(a) + kernel_basis(a).size() == c);
            for (const auto& k : kernel_basis(a))
                for (const auto& x : fjc::apply(a, k)) CHECK(x == 0);
        }
    }

    TEST_CASE("property: solve is exact when it answers") {
        Rng rng(202);
        for (int t = 0; t < 150; ++t) {
            auto r = static_cast<std::size_t>(fjt::uniform_int(rng, 1, 4));
            auto c = static_cast<std::size_t>(fjt::uniform_int(rng, 1, 4));
            auto a = fjt::random_low_rank(rng, r, c);
            Column b(r);
            for (auto& x : b) x = fjt::random_rational(rng);
            auto x = solve(a, b);
            // Consistency oracle: b lies in the column space iff appending it keeps the rank.
            bool consistent = rank(hstack(a, RationalMatrix::from_columns(r, {b}))) == rank(a);
            CHECK(x.has_value() == consistent);
            if (x) CHECK(fjc::apply(a, *x) == b);
        }
    }

    TEST_CASE("property: rank is invariant under row and column permutations") {
        Rng rng(303);
        for (int t = 0; t < 100; ++t) {
            auto a = fjt::random_low_rank(rng, 3, 4);
            std::vector<std::size_t> rp(3), cp(4);
            std::iota(rp.begin(), rp.end(), 0);
            std::iota(cp.begin(), cp.end(), 0);
            std::shuffle(rp.begin(), rp.end(), rng);
            std::shuffle(cp.begin(), cp.end(), rng);
            RationalMatrix b(3, 4);
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 4; ++j) b(i, j) = a(rp[i], cp[j]);
            CHECK(rank(a) == rank(b));
        }
    }

    TEST_CASE("inverse, image and cokernel") {
        Rng rng(404);
        for (int t = 0; t < 60; ++t) {
            auto a = fjt::random_matrix(rng, 3, 3);
            auto inv = inverse(a);
            CHECK(inv.has_value() == (det(a) != 0));
            if (inv) CHECK((a * *inv).is_identity());
            auto m = fjt::random_low_rank(rng, 4, 3);
            auto p = cokernel_projection(m);
            CHECK((p * m).is_zero());
            CHECK(p.rows() == 4 - rank(m));
            CHECK(same_column_space(image_basis(m), m));
        }
    }

    TEST_CASE("block system solves a commuting-square equation") {
        // X * A = A * X for A = diag(1, 2): solutions are diagonal.
        auto a = RationalMatrix::from_ints({{1, 0}, {0, 2}});
        BlockSystem sys;
        auto x = sys.add_block(2, 2);
        sys.add_equation({{RationalMatrix::identity(2), x, a}, {Rational(-1) * a, x, RationalMatrix::identity(2)}});
        auto sol = sys.solution_basis();
        CHECK(sol.size() == 2);
        for (const auto& s : sol) CHECK(s[0] * a == a * s[0]);
    }
}
