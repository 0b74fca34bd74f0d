#include <doctest.h>

#include <climits>

#include "fjcalc/errors.hpp"
#include "fjcalc/grid_module.hpp"
#include "grid_oracle.hpp"
#include "support.hpp"

using namespace fjc;
using fjt::Rng;

namespace {

using fjt::brute_tensor_span;
using fjt::pmax;
using fjt::spans_equal;

GridModule skyscraper(int dim, const Point& at) { return box_module(dim, at, at); }

}  // namespace

TEST_SUITE("multigraded_core") {
    TEST_CASE("Kan semantics below and beyond the window") {
        auto m = step_module(2, {1, 0});
        CHECK(m.dim({0, 5}) == 0);
        CHECK(m.dim({7, 9}) == 2);
        CHECK(m.eval_map({1, 0}, {8, 8}).is_identity());
        CHECK(m.eval_map(m.hi(), {m.hi()[0] + 3, m.hi()[1] + 1}).is_identity());
        CHECK_THROWS_AS(m.eval_map({2, 0}, {1, 5}), NotComparable);
    }

    TEST_CASE("eval_map is path independent on random 2x2 windows") {
        Rng rng(11);
        for (int t = 0; t < 40; ++t) {
            auto m = fjt::random_module(rng, 2, 3, 3, false);
            m.require_valid();
            for (const auto& v : box_points(m.lo(), m.hi())) {
                auto right_up = m.step({v[0] + 1, v[1]}, 1) * m.step(v, 0);
                auto up_right = m.step({v[0], v[1] + 1}, 0) * m.step(v, 1);
                CHECK(right_up == up_right);
                CHECK(m.eval_map(v, {v[0] + 1, v[1] + 1}) == right_up);
            }
        }
    }

    TEST_CASE("shift morphism has zero kernel and a skyscraper cokernel") {
        auto o = canonical_extension(1, 1);
        auto shifted = step_module(1, {1});
        auto f = GridMorphism::zero(shifted, o);
        for (int v = 1; v <= 1; ++v) f.set_component({v}, RationalMatrix::identity(1));
        REQUIRE(f.is_natural());
        auto ker = sub_quotient(f, SubQuotientKind::kernel).module;
        auto cok = sub_quotient(f, SubQuotientKind::cokernel).module;
        CHECK(ker.is_zero());
        for (int v = -2; v <= 4; ++v) CHECK(cok.dim({v}) == (v == 0 ? 1 : 0));
    }

    TEST_CASE("kernel of the identity is zero; cokernel of the zero map is the target") {
        Rng rng(12);
        for (int t = 0; t < 10; ++t) {
            auto m = fjt::random_module(rng, 2, 3, 3, false);
            CHECK(sub_quotient(GridMorphism::identity(m), SubQuotientKind::kernel).module.is_zero());
            auto zero_in = GridMorphism::zero(GridModule::zero(2), m);
            auto c = sub_quotient(zero_in, SubQuotientKind::cokernel).module;
            CHECK(iso_test(c, m) != IsoVerdict::not_iso);
            for (const auto& v : box_points(m.lo(), m.hi())) CHECK(c.dim(v) == m.dim(v));
        }
    }

    TEST_CASE("tensor examples") {
        auto o = canonical_extension(1, 1);
        auto m = step_module(2, {1});
        auto t = tensor(o, m);
        for (int v = -1; v <= 4; ++v) CHECK(t.dim({v}) == m.dim({v}));
        auto s = tensor(step_module(1, {2}), step_module(1, {-1}));
        for (int v = -3; v <= 5; ++v) {
            CHECK(s.dim({v}) == (v >= 1 ? 1 : 0));
            CHECK(static_cast<std::size_t>(s.dim({v})) == rank(brute_tensor_span(step_module(1, {2}), step_module(1, {-1}), {v})));
        }
        CHECK_THROWS_AS(tensor(skyscraper(1, {0}), o), NotTorsionFree);
    }

    TEST_CASE("property: tensor agrees with the subspace-sum oracle and is unital and associative") {
        Rng rng(13);
        for (int t = 0; t < 40; ++t) {
            int r = fjt::uniform_int(rng, 1, 2);
            auto a = fjt::random_module(rng, r, 3, 2, true);
            auto b = fjt::random_module(rng, r, 3, 2, true);
            auto c = fjt::random_module(rng, r, 2, 2, true);
            auto ab = tensor(a, b);
            Point lo = ab.lo(), hi = ab.hi();
            for (auto& x : lo) --x;
            for (auto& x : hi) ++x;
            for (const auto& v : box_points(lo, hi)) {
                auto brute = brute_tensor_span(a, b, v);
                CHECK(static_cast<std::size_t>(ab.dim(v)) == rank(brute));
                if (ab.dim(v) > 0) CHECK(spans_equal(tensor_span(a, b, v), brute));
            }
            auto unit = tensor(canonical_extension(1, r), a);
            for (const auto& v : box_points(lo, hi)) CHECK(unit.dim(v) == a.dim(v));
            // Associativity inside lim a (x) lim b (x) lim c.
            auto left = tensor(ab, c);
            auto bc = tensor(b, c);
            auto right = tensor(a, bc);
            auto lim_ab = tensor_span(a, b, ab.hi());
            auto lim_bc = tensor_span(b, c, bc.hi());
            auto dc = static_cast<std::size_t>(c.dim(c.hi()));
            auto da = static_cast<std::size_t>(a.dim(a.hi()));
            Point lo3 = left.lo(), hi3 = pmax(left.hi(), right.hi());
            for (auto& x : lo3) --x;
            for (const auto& v : box_points(lo3, hi3)) {
                CHECK(left.dim(v) == right.dim(v));
                if (left.dim(v) == 0 || lim_ab.cols() == 0 || lim_bc.cols() == 0) continue;
                auto l = kron(lim_ab, RationalMatrix::identity(dc)) * tensor_span(ab, c, pmax(v, left.lo()));
                auto rr = kron(RationalMatrix::identity(da), lim_bc) * tensor_span(a, bc, pmax(v, right.lo()));
                CHECK(same_column_space(l, rr));
            }
        }
    }

    TEST_CASE("lim_along examples and functoriality") {
        Rng rng(14);
        for (int t = 0; t < 15; ++t) {
            auto m = fjt::random_module(rng, 2, 3, 3, false);
            auto same = lim_along(m, identity_injection(2));
            for (const auto& v : box_points({-2, -2}, {3, 3})) CHECK(same.dim(v) == m.dim(v));
        }
        CHECK(lim_along(canonical_extension(3, 2), {}).dim({}) == 3);
        CHECK(lim_along(skyscraper(2, {0, 0}), {}).dim({}) == 0);
        CHECK(lim_along(skyscraper(2, {0, 1}), {1}).is_zero());
        for (int t = 0; t < 20; ++t) {
            auto m = fjt::random_module(rng, 3, 2, 2, false);
            Injection beta = {2, 0};  // [2] -> [3]
            Injection gamma = {1};    // [1] -> [2]
            auto lhs = lim_along(m, compose_injections(beta, gamma));
            auto rhs = lim_along(lim_along(m, beta), gamma);
            for (int v = -2; v <= 3; ++v) {
                CHECK(lhs.dim({v}) == rhs.dim({v}));
                CHECK(lhs.step({v}, 0) == rhs.step({v}, 0));
            }
        }
    }

    TEST_CASE("stabilization maps") {
        auto o = canonical_extension(2, 2);
        for (const auto& v : box_points({0, 0}, {2, 2})) CHECK(stabilization_map(o, {0}, v).is_identity());
        auto sky = skyscraper(1, {0, 0});
        for (const auto& v : box_points({-1, -1}, {1, 1})) CHECK(stabilization_map(sky, {1}, v).is_zero());
        Rng rng(15);
        for (int t = 0; t < 20; ++t) {
            auto m = fjt::random_module(rng, 2, 2, 2, false);
            auto lim = lim_along(m, {0});
            for (const auto& v : box_points({-1, -1}, {2, 2})) {
                Point w = {v[0] + 1, v[1]};
                auto lhs = stabilization_map(m, {0}, w) * m.step(v, 0);
                auto rhs = lim.step({v[0]}, 0) * stabilization_map(m, {0}, v);
                CHECK(lhs == rhs);
                Point u = {v[0], v[1] + 1};
                CHECK(stabilization_map(m, {0}, u) * m.step(v, 1) == stabilization_map(m, {0}, v));
            }
        }
    }

    TEST_CASE("canonical extension examples") {
        CHECK(canonical_extension(0, 2).is_zero());
        CHECK(canonical_extension(4, 0).dim({}) == 4);
        auto cusp = canonical_extension(1, 1);
        for (int v = -2; v <= 2; ++v) CHECK(cusp.dim({v}) == (v >= 0 ? 1 : 0));
    }

    TEST_CASE("predicates examples") {
        auto p = predicates(canonical_extension(3, 2));
        CHECK(p.bounded_below);
        CHECK(p.coherent);
        CHECK(p.torsion_free);
        CHECK(p.locally_free);
        CHECK_FALSE(predicates(skyscraper(1, {0})).torsion_free);
        auto jac = box_module(1, {2}, {2});
        CHECK_FALSE(predicates(jac).torsion_free);
        // The maximal ideal at the corner: torsion-free but not Cartesian.
        GridModule m({0, 0}, {1, 1});
        m.set_dim({0, 0}, 0);
        m.set_dim({1, 0}, 1);
        m.set_dim({0, 1}, 1);
        m.set_dim({1, 1}, 1);
        m.set_map({1, 0}, 1, RationalMatrix::identity(1));
        m.set_map({0, 1}, 0, RationalMatrix::identity(1));
        m.set_map({0, 0}, 0, RationalMatrix(1, 0));
        m.set_map({0, 0}, 1, RationalMatrix(1, 0));
        REQUIRE(m.violations().empty());
        auto q = predicates(m);
        CHECK(q.torsion_free);
        CHECK_FALSE(q.locally_free);
    }

    TEST_CASE("iso_test examples") {
        Rng rng(16);
        auto m = fjt::random_module(rng, 2, 3, 3, false);
        CHECK(iso_test(m, m) == IsoVerdict::iso);
        CHECK(iso_test(skyscraper(1, {0}), canonical_extension(1, 1)) == IsoVerdict::not_iso);
        CHECK_THROWS_AS(iso_test(canonical_extension(1, 1), canonical_extension(1, 2)), RankMismatch);
        // Barcode {[0, inf), [2, 3]} built two ways.
        auto a = direct_sum(canonical_extension(1, 1), box_module(1, {2}, {3}));
        GridModule b({0}, {4});
        for (int v = 0; v <= 4; ++v) b.set_dim({v}, (v >= 2 && v <= 3) ? 2 : 1);
        b.set_map({0}, 0, RationalMatrix::identity(1));
        b.set_map({1}, 0, RationalMatrix::from_ints({{1}, {1}}));
        b.set_map({2}, 0, RationalMatrix::identity(2));
        b.set_map({3}, 0, RationalMatrix::from_ints({{1, 0}}));
        REQUIRE(b.violations().empty());
        auto bars = barcode(b);
        CHECK(bars == barcode(a));
        CHECK(bars.size() == 2);
        CHECK(iso_test(a, b) == IsoVerdict::iso);
        CHECK(iso_test(a, direct_sum(canonical_extension(1, 1), box_module(1, {2}, {4}))) == IsoVerdict::not_iso);
    }

    TEST_CASE("barcode of a canonical extension is one infinite bar") {
        auto bars = barcode(canonical_extension(2, 1));
        REQUIRE(bars.size() == 1);
        CHECK(bars[0].first == std::make_pair(0, INT_MAX));
        CHECK(bars[0].second == 2);
    }

    TEST_CASE("property: image equals kernel of cokernel and coimage equals image degreewise") {
        Rng rng(17);
        for (int t = 0; t < 60; ++t) {
            int r = fjt::uniform_int(rng, 1, 2);
            auto m = fjt::random_module(rng, r, 3, 3, false);
            auto n = t % 3 == 0 ? m : fjt::random_module(rng, r, 3, 3, false);
            auto f = fjt::random_morphism(rng, m, n);
            auto im = sub_quotient(f, SubQuotientKind::image);
            auto coim = sub_quotient(f, SubQuotientKind::coimage);
            auto cok = sub_quotient(f, SubQuotientKind::cokernel);
            auto kc = sub_quotient(cok.canonical, SubQuotientKind::kernel);
            CHECK(im.module.violations().empty());
            CHECK(kc.module.violations().empty());
            for (const auto& v : box_points(f.lo, f.hi)) {
                auto rk = static_cast<int>(rank(f.component(v)));
                CHECK(im.module.dim(v) == rk);
                CHECK(coim.module.dim(v) == rk);
                CHECK(kc.module.dim(v) == rk);
                if (rk > 0) CHECK(same_column_space(im.canonical.component(v), kc.canonical.component(v)));
            }
        }
    }

    TEST_CASE("property: kernels of maps between torsion-free modules are torsion-free") {
        Rng rng(18);
        for (int t = 0; t < 30; ++t) {
            auto m = fjt::random_module(rng, 2, 3, 3, true);
            auto n = fjt::random_module(rng, 2, 3, 3, true);
            auto f = fjt::random_morphism(rng, m, n);
            CHECK(predicates(sub_quotient(f, SubQuotientKind::kernel).module).torsion_free);
        }
    }

    TEST_CASE("property: evaluation is exact on kernel-source-image sequences") {
        Rng rng(19);
        for (int t = 0; t < 30; ++t) {
            auto m = fjt::random_module(rng, 2, 3, 3, false);
            auto n = fjt::random_module(rng, 2, 3, 3, false);
            auto f = fjt::random_morphism(rng, m, n);
            auto k = sub_quotient(f, SubQuotientKind::kernel);
            auto c = sub_quotient(f, SubQuotientKind::coimage);
            for (const auto& v : box_points(f.lo, f.hi)) {
                auto i = k.canonical.component(v);
                auto p = c.canonical.component(v);
                CHECK((p * i).is_zero());
                CHECK(rank(i) == i.cols());
                CHECK(rank(p) == p.rows());
                CHECK(rank(i) + rank(p) == static_cast<std::size_t>(m.dim(v)));
            }
        }
    }

    TEST_CASE("property: Hom out of the canonical extension is the value at 0") {
        Rng rng(20);
        for (int t = 0; t < 30; ++t) {
            int r = fjt::uniform_int(rng, 1, 2);
            auto m = fjt::random_module(rng, r, 3, 3, false);
            CHECK(hom_space(canonical_extension(1, r), m).size() == static_cast<std::size_t>(m.dim(Point(static_cast<std::size_t>(r), 0))));
        }
    }

    TEST_CASE("json round trip and kan_normalize") {
        Rng rng(21);
        for (int t = 0; t < 20; ++t) {
            auto m = fjt::random_module(rng, 2, 3, 3, false);
            auto back = grid_module_from_json(nlohmann::json::parse(to_json(m).dump()));
            auto norm = kan_normalize(m);
            for (const auto& v : box_points({-2, -2}, {4, 4})) {
                CHECK(back.dim(v) == m.dim(v));
                CHECK(norm.dim(v) == m.dim(v));
                for (int i = 0; i < 2; ++i) {
                    CHECK(back.step(v, i) == m.step(v, i));
                    CHECK(norm.step(v, i) == m.step(v, i));
                }
            }
        }
        auto j = to_json(step_module(1, {0, 1}));
        CHECK(j["rank"] == 2);
        CHECK(j["values"].contains("0,1"));
    }

    TEST_CASE("truncation below a bound") {
        auto m = canonical_extension(1, 1);
        auto t = truncate_below(m, 2);
        for (int v = -1; v <= 4; ++v) CHECK(t.dim({v}) == (v >= 2 ? 1 : 0));
        CHECK(hom_dim_bounded(m, t, 2) == 1);
    }
}
