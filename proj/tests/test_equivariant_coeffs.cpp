#include <doctest.h>

#include <map>

#include "fjcalc/equivariant_coeffs.hpp"
#include "fjcalc/errors.hpp"

using namespace fjc;

namespace {

// Oracle: GL_2 characters as Laurent polynomials in the two diagonal entries.
using Character = std::map<std::pair<int, int>, int>;

Character character(const GL2Rep& r) {
    Character c;
    for (const auto& [ab, m] : r.irreps)
        for (int i = 0; i <= ab.first; ++i) c[{i + ab.second, ab.first - i + ab.second}] += m;
    return c;
}

Character multiply(const Character& x, const Character& y) {
    Character out;
    for (const auto& [e1, m1] : x)
        for (const auto& [e2, m2] : y) out[{e1.first + e2.first, e1.second + e2.second}] += m1 * m2;
    return out;
}

Character invert(const Character& x) {
    Character out;
    for (const auto& [e, m] : x) out[{-e.first, -e.second}] = m;
    return out;
}

// Oracle: Laurent monomials z^e on the two charts; H0 counts e in [0, k], H1 counts e in [k+1, -1].
std::pair<int, int> monomial_count(int k) {
    int h0 = 0, h1 = 0;
    for (int e = -20; e <= 20; ++e) {
        if (e >= 0 && e <= k) ++h0;
        if (e > k && e < 0) ++h1;
    }
    return {h0, h1};
}

long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Oracle: weight-0 count in Lambda^i tensor omega by subset sizes (a from V+, b from R+).
long weight_zero_count(const BoundaryDatum& d, int i) {
    long total = 0;
    Weight om = d.omega_weight();
    for (int a = 0; a <= d.v; ++a) {
        int b = i - a;
        if (b < 0 || b > d.n0) continue;
        if (a + b + om[0] == 0 && -b + om[1] == 0) total += binom(d.v, a) * binom(d.n0, b);
    }
    return total;
}

}  // namespace

TEST_SUITE("equivariant_coeffs") {
    TEST_CASE("tensor with the unit") {
        auto x = GL2Rep::irreducible(3, -1, 2);
        CHECK(std::get<GL2Rep>(tensor(GL2Rep::trivial(), x)) == x);
        auto t = TorusRep::line({2, -1});
        CHECK(std::get<TorusRep>(tensor(TorusRep::trivial(2), t)) == t);
        CHECK_THROWS_AS(tensor(t, x), ShapeMismatch);
        CHECK_THROWS_AS(tensor(TorusRep::trivial(1), t), ShapeMismatch);
    }

    TEST_CASE("clebsch-gordan matches the character ring") {
        auto s1 = GL2Rep::irreducible(1, 0);
        auto prod = std::get<GL2Rep>(tensor(s1, s1));
        GL2Rep expect;
        expect.irreps = {{{2, 0}, 1}, {{0, 1}, 1}};
        CHECK(prod == expect);
        for (int a = 0; a <= 6; ++a)
            for (int b = 0; b <= 6; ++b)
                for (int t = -1; t <= 1; ++t) {
                    auto x = GL2Rep::irreducible(a, t);
                    auto y = GL2Rep::irreducible(b, 0);
                    auto p = std::get<GL2Rep>(tensor(x, y));
                    CHECK(character(p) == multiply(character(x), character(y)));
                    CHECK(p.dimension() == (a + 1) * (b + 1));
                }
    }

    TEST_CASE("dual inverts characters") {
        for (int a = 0; a <= 5; ++a)
            for (int b = -3; b <= 3; ++b) {
                auto x = GL2Rep::irreducible(a, b);
                auto d = std::get<GL2Rep>(dual(x));
                CHECK(d == GL2Rep::irreducible(a, -a - b));
                CHECK(character(d) == invert(character(x)));
            }
        auto t = std::get<TorusRep>(dual(TorusRep::line({1, -2})));
        CHECK(t == TorusRep::line({-1, 2}));
    }

    TEST_CASE("direct sums add multiplicities") {
        auto s = std::get<GL2Rep>(direct_sum(GL2Rep::irreducible(1, 0), GL2Rep::irreducible(1, 0)));
        CHECK(s == GL2Rep::irreducible(1, 0, 2));
        CHECK(dimension(s) == 4);
    }

    TEST_CASE("invariant multiplicities") {
        CHECK(invariant_multiplicity(GL2Rep::trivial()) == 1);
        CHECK(invariant_multiplicity(GL2Rep::irreducible(2, 0)) == 0);
        CHECK(invariant_multiplicity(TorusRep::line({-1, -1})) == 0);
        CHECK(invariant_multiplicity(TorusRep::trivial(3)) == 1);
        CHECK_THROWS_AS(invariant_multiplicity(FlagLine{1, 0}), UnsupportedCoefficient);
    }

    TEST_CASE("restriction along group morphisms") {
        auto x = GL2Rep::irreducible(2, 0);
        CHECK(std::get<GL2Rep>(restrict_along({}, x)) == x);
        GroupMorphism diag{GroupMorphism::Kind::gl2_to_diag_torus, {}};
        auto det = std::get<TorusRep>(restrict_along(diag, GL2Rep::irreducible(0, 1)));
        CHECK(det == TorusRep::line({1}));
        auto s2 = std::get<TorusRep>(restrict_along(diag, x));
        CHECK(s2.weights == std::map<Weight, int>{{{0}, 1}, {{1}, 1}, {{2}, 1}});
        CHECK_THROWS_AS(restrict_along(diag, TorusRep::trivial(1)), UnsupportedMorphism);
        GroupMorphism first{GroupMorphism::Kind::torus_embedding, {{1}, {0}}};
        auto r = std::get<TorusRep>(restrict_along(first, TorusRep::line({3, 5})));
        CHECK(r == TorusRep::line({3}));
    }

    TEST_CASE("property: restriction preserves dimension") {
        GroupMorphism diag{GroupMorphism::Kind::gl2_to_diag_torus, {}};
        GroupMorphism anti{GroupMorphism::Kind::torus_embedding, {{1}, {-1}}};
        for (int a = 0; a <= 6; ++a)
            for (int b = -2; b <= 2; ++b) {
                auto x = GL2Rep::irreducible(a, b, 1 + (a % 2));
                CHECK(dimension(restrict_along(diag, x)) == x.dimension());
                TorusRep t;
                t.rank = 2;
                t.weights = {{{a, b}, 2}, {{b, a + 10}, 1}};
                CHECK(dimension(restrict_along(anti, t)) == 3);
            }
    }

    TEST_CASE("flag cohomology matches the monomial count") {
        CHECK(bwb_p1(0).h0 == GL2Rep::trivial());
        CHECK(bwb_p1(0).h1.dimension() == 0);
        CHECK(bwb_p1(-1).h0.dimension() == 0);
        CHECK(bwb_p1(-1).h1.dimension() == 0);
        for (int k = -8; k <= 6; ++k) {
            auto c = bwb_p1(k);
            auto [h0, h1] = monomial_count(k);
            CHECK(c.h0.dimension() == h0);
            CHECK(c.h1.dimension() == h1);
            CHECK(c.h1.dimension() == bwb_p1(-2 - k).h0.dimension());
        }
        auto cot = cotangent_line();
        auto c = bwb_p1(cot.k, cot.twist);
        CHECK(c.h0.dimension() == 0);
        CHECK(c.h1 == GL2Rep::trivial());
    }

    TEST_CASE("unipotent cohomology") {
        BoundaryDatum d{2, 3, 1};
        auto w = d.quasi_parabolic_weights();
        CHECK(unipotent_cohomology(2, w, 0) == TorusRep::trivial(2));
        CHECK(unipotent_cohomology(2, w, 6).dimension() == 0);
        auto top = unipotent_cohomology(2, w, 5);
        CHECK(top == TorusRep::line({5, -2}));
        for (int i = 0; i <= 5; ++i) CHECK(unipotent_cohomology(2, w, i).dimension() == binom(5, i));
    }

    TEST_CASE("quasi-parabolic cohomology examples") {
        BoundaryDatum point{0, 0, 0};
        CHECK(quasi_parabolic_cohomology(point, TorusRep::trivial(2), 0) == 1);
        BoundaryDatum cusp{0, 0, 1};
        for (int i = 0; i <= 3; ++i) CHECK(quasi_parabolic_cohomology(cusp, TorusRep::line({-1, -1}), i) == 0);
        CHECK_THROWS_AS(quasi_parabolic_cohomology(cusp, GL2Rep::trivial(), 0), UnsupportedCoefficient);
        TorusRep two;
        two.rank = 2;
        two.weights = {{{0, 0}, 2}};
        CHECK_THROWS_AS(quasi_parabolic_cohomology(cusp, two, 0), UnsupportedCoefficient);
    }

    TEST_CASE("boundary vanishing examples") {
        auto r = boundary_vanishing_check({0, 0, 1});
        CHECK(r.applicable);
        CHECK(r.vanishes_all);
        CHECK(r.claim_holds);
        CHECK(r.claim_from == 0);
        auto s = boundary_vanishing_check({1, 1, 1});
        CHECK(s.claim_from == 2);
        CHECK(s.claim_holds);
        CHECK(s.multiplicities.size() == 3);
        CHECK(s.product_weight == Weight{-1, -1});
        CHECK_FALSE(boundary_vanishing_check({1, 1, 0}).applicable);
        CHECK(to_json(s)["assumption_s_in_k"] == true);
        CHECK(to_json(boundary_vanishing_check({1, 1, 0}))["verdict"] == "not applicable");
    }

    TEST_CASE("property: weight-zero multiplicity vanishes across the sweep") {
        for (int n0 = 0; n0 <= 4; ++n0)
            for (int v = 0; v <= 4; ++v)
                for (int u = 1; u <= 4; ++u) {
                    BoundaryDatum d{n0, v, u};
                    auto r = boundary_vanishing_check(d);
                    REQUIRE(static_cast<int>(r.multiplicities.size()) == n0 + v + 1);
                    for (int i = 0; i <= n0 + v; ++i) {
                        CHECK(r.multiplicities[static_cast<std::size_t>(i)] == weight_zero_count(d, i));
                        CHECK(r.multiplicities[static_cast<std::size_t>(i)] == 0);
                    }
                    CHECK(r.top_weight == Weight{v + n0, -n0});
                    CHECK(r.product_weight == Weight{-u, -u});
                    CHECK(r.vanishes_all);
                }
    }

    TEST_CASE("stack cohomology dispatch") {
        auto gl2 = GroupDatum::gl2();
        CHECK(stack_cohomology(gl2, cotangent_line(), 1) == 1);
        CHECK(stack_cohomology(gl2, cotangent_line(), 0) == 0);
        CHECK(stack_cohomology(gl2, FlagLine{0, 0}, 0) == 1);
        CHECK(stack_cohomology(GroupDatum::torus(2), TorusRep::trivial(2), 0) == 1);
        CHECK(stack_cohomology(GroupDatum::torus(2), TorusRep::trivial(2), 1) == 0);
        auto cusp = GroupDatum::boundary_group({0, 0, 1});
        CHECK(cusp.violations().empty());
        CHECK(stack_cohomology(cusp, omega_coeff(cusp), 0) == 0);
        CHECK_THROWS_AS(stack_cohomology(GroupDatum::torus(1), FlagLine{0, 0}, 0), NotComputable);
    }

    TEST_CASE("json round trip") {
        std::vector<CoeffObject> xs{TorusRep::line({1, -2}), GL2Rep::irreducible(2, -1, 3), FlagLine{-2, 1}};
        for (const auto& x : xs) CHECK(coeff_from_json(to_json(x)) == x);
        auto g = GroupDatum::boundary_group({1, 2, 1});
        CHECK(to_json(group_datum_from_json(to_json(g))) == to_json(g));
        CHECK_THROWS_AS(coeff_from_json(nlohmann::json{{"kind", "nonsense"}}), ParseError);
    }
}
