#include <doctest.h>

#include "fjcalc/chern_hmp.hpp"
#include "fjcalc/errors.hpp"
#include "support.hpp"

using namespace fjc;
using fjt::Rng;

namespace {

// Oracle: on O(k) a Laurent monomial z^e is a coboundary unless k < e < 0.
bool gap_exponent(int k, int e) { return e > k && e < 0; }

bool coboundary_oracle(const LaurentCocycle& c) {
    for (const auto& [e, x] : c.coeffs)
        if (gap_exponent(c.twist, e)) return false;
    return true;
}

// Oracle: residue of dlog(z^k) is k.
Rational dlog_residue(int k) { return Rational(k); }

}  // namespace

TEST_SUITE("chern_hmp") {
    TEST_CASE("cech examples") {
        CHECK(cech_p1(0, 0).dimension == 1);
        auto h = cech_p1(-2, 1);
        REQUIRE(h.dimension == 1);
        CHECK(h.representatives.front().coeffs == std::map<int, Rational>{{-1, Rational(1)}});
        CHECK(cech_p1(-1, 0).dimension == 0);
        CHECK(cech_p1(-1, 1).dimension == 0);
        CHECK_THROWS_AS(cech_p1(0, 2), DegreeOutOfRange);
        CHECK_THROWS_AS(cech_p1(0, -1), DegreeOutOfRange);
    }

    TEST_CASE("cech dimensions agree with the flag cohomology and serre symmetry") {
        for (int k = -8; k <= 6; ++k) {
            auto b = bwb_p1(k);
            CHECK(cech_p1(k, 0).dimension == b.h0.dimension());
            CHECK(cech_p1(k, 1).dimension == b.h1.dimension());
            CHECK(cech_p1(k, 1).dimension == cech_p1(-2 - k, 0).dimension);
        }
    }

    TEST_CASE("representatives are not coboundaries and sections are regular") {
        for (int k = -6; k <= 4; ++k) {
            for (const auto& r : cech_p1(k, 1).representatives) {
                CHECK_FALSE(is_coboundary(r));
                CHECK_FALSE(coboundary_oracle(r));
            }
            for (const auto& s : cech_p1(k, 0).representatives)
                for (const auto& [e, x] : s.coeffs) CHECK((e >= 0 && e <= k));
        }
    }

    TEST_CASE("property: coboundary test matches the exponent gap oracle") {
        Rng rng(55);
        for (int t = 0; t < 300; ++t) {
            LaurentCocycle c{fjt::uniform_int(rng, -6, 4), {}};
            int terms = fjt::uniform_int(rng, 0, 3);
            for (int i = 0; i < terms; ++i) {
                Rational x = fjt::random_rational(rng);
                if (x != 0) c.coeffs[fjt::uniform_int(rng, -9, 7)] = x;
            }
            CHECK(is_coboundary(c) == coboundary_oracle(c));
        }
    }

    TEST_CASE("atiyah class") {
        CHECK(atiyah_c1(0) == 0);
        CHECK(atiyah_c1(1) == 1);
        for (int k = -5; k <= 5; ++k) {
            CHECK(atiyah_c1(k) == k);
            CHECK(atiyah_c1(k) == dlog_residue(k) / dlog_residue(1));
            CHECK(atiyah_c1(-k) == -atiyah_c1(k));
            auto a = atiyah_cocycle(transition(k));
            CHECK(a.twist == -2);
            CHECK(h1_coordinate(a) == k);
        }
        for (int a = -3; a <= 3; ++a)
            for (int b = -3; b <= 3; ++b) {
                auto prod = multiply(transition(a), transition(b));
                CHECK(prod == transition(a + b));
                CHECK(atiyah_cocycle(prod) == atiyah_cocycle(transition(a + b)));
                CHECK(atiyah_c1(a + b) == atiyah_c1(a) + atiyah_c1(b));
            }
        CHECK_THROWS_AS(h1_coordinate(transition(1)), DimensionMismatch);
    }

    TEST_CASE("h1 coordinate ignores coboundaries") {
        LaurentCocycle c{-2, {{-1, Rational(3)}, {0, Rational(5)}, {-4, Rational(-1)}}};
        CHECK(h1_coordinate(c) == 3);
    }

    TEST_CASE("universal class") {
        auto m = modular_model();
        auto trivial = universal_class(m, 0);
        CHECK(trivial.status == "split");
        CHECK(trivial.sequence_split);
        CHECK(trivial.mvee_coordinate == 0);
        std::optional<Rational> ratio;
        for (int k = -5; k <= 5; ++k) {
            auto u = universal_class(m, k);
            CHECK(u.sequence_exact);
            CHECK(u.mvee_coordinate == k);
            CHECK(u.ext_lo == 1);
            CHECK(u.ext_hi == 1);
            REQUIRE(u.fj_coordinate);
            if (k == 0) continue;
            CHECK(u.status == "defined");
            REQUIRE(u.ratio);
            if (!ratio) ratio = u.ratio;
            CHECK(*u.ratio == *ratio);
        }
        CHECK(universal_class(compact_p1_model(), 2).status == "defined");
        CHECK_THROWS_AS(universal_class(snc_corner_model(), 1), NotComputable);
        CHECK(to_json(trivial)["ratio"].is_null());
    }

    TEST_CASE("hmp pipeline") {
        auto r = hmp_check(modular_model());
        CHECK(r.dim == 1);
        CHECK(r.exact());
        CHECK_FALSE(r.shortcut);
        REQUIRE(r.mvee_chern);
        CHECK(*r.mvee_chern == -2);
        CHECK(r.boundary.at("cusp").vanishes_all);
        CHECK(r.boundary_ext.at("cusp") == std::vector<int>{0, 0});
        CHECK(r.degrees_checked > 0);
        CHECK(r.universal_status == "defined");

        auto c = hmp_check(compact_p1_model());
        CHECK(c.shortcut);
        CHECK(c.dim == 1);
        CHECK(c.exact());

        auto s = hmp_check(snc_corner_model());
        CHECK(s.exact());
        // The open torus has no H^2 with trivial coefficients.
        CHECK(s.dim == 0);

        CHECK_THROWS_AS(hmp_check(jacobi_model()), HypothesisViolated);
        auto j = to_json(r);
        CHECK(j["dim_ext_n"] == 1);
        CHECK(j["bounds"] == nlohmann::json::array({1, 1}));
        CHECK_FALSE(j["audit"].empty());
    }

    TEST_CASE("non-reductive open group is refused") {
        auto j = to_json(*modular_model());
        auto boundary = to_json(GroupDatum::boundary_group({0, 1, 1}));
        j["groups"]["M"] = boundary;
        auto m = model_from_json(j);
        CHECK_FALSE(m->group("M").reductive());
        CHECK_THROWS_AS(hmp_check(m), HypothesisViolated);
        CHECK_THROWS_AS(universal_class(m, 1), HypothesisViolated);
    }
}
