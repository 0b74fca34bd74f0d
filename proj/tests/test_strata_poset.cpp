#include <doctest.h>

#include <algorithm>

#include "fjcalc/errors.hpp"
#include "fjcalc/strata_poset.hpp"

using namespace fjc;

namespace {

bool has_kind(const PosetReport& r, const std::string& kind) {
    for (const auto& v : r.violations)
        if (v.kind == kind) return true;
    return false;
}

// Chain B <= A <= M with the relation B <= M missing.
StrataPoset gapped_chain() {
    StrataPoset p;
    p.add_stratum("M", 0);
    p.add_stratum("A", 1);
    p.add_stratum("B", 2);
    p.set_relation("A", "M", {});
    p.set_relation("B", "A", {0});
    return p;
}

}  // namespace

TEST_SUITE("strata_poset") {
    TEST_CASE("built-in posets validate") {
        CHECK(modular_poset().validate().ok());
        CHECK(single_stratum_poset().validate().ok());
        CHECK(snc_corner_poset().validate().ok());
        auto p = modular_poset();
        CHECK(p.open_stratum() == "M");
        CHECK(p.leq("cusp", "M"));
        CHECK_FALSE(p.leq("M", "cusp"));
        CHECK(p.beta("cusp", "M").empty());
        CHECK(p.beta("cusp", "cusp") == Injection{0});
    }

    TEST_CASE("composition failure is reported") {
        StrataPoset p;
        p.add_stratum("M", 0);
        p.add_stratum("A", 1);
        p.add_stratum("B", 2);
        p.add_stratum("C", 2);
        p.set_relation("A", "M", {});
        p.set_relation("B", "M", {});
        p.set_relation("C", "M", {});
        p.set_relation("B", "A", {0});
        p.set_relation("C", "A", {1});
        p.set_relation("C", "B", {0, 1});
        auto r = p.validate();
        CHECK_FALSE(r.ok());
        CHECK(has_kind(r, "composition"));
        bool triple = false;
        for (const auto& v : r.violations)
            if (v.kind == "composition" && v.strata == std::vector<std::string>{"C", "B", "A"}) triple = true;
        CHECK(triple);
    }

    TEST_CASE("other structural violations") {
        StrataPoset p;
        p.add_stratum("M", 0);
        p.add_stratum("A", 1);
        p.set_relation("A", "M", {});
        p.set_relation("M", "A", {});
        CHECK(has_kind(p.validate(), "antisymmetry"));

        StrataPoset q;
        q.add_stratum("M", 0);
        q.add_stratum("A", 1);
        q.set_relation("A", "M", {});
        q.set_relation("M", "A", {0});
        CHECK(has_kind(q.validate(), "injection"));

        StrataPoset two;
        two.add_stratum("M", 0);
        two.add_stratum("N", 0);
        CHECK(has_kind(two.validate(), "maximal_stratum"));

        CHECK(has_kind(gapped_chain().validate(), "transitivity"));
    }

    TEST_CASE("complement uses increasing missing indices") {
        CHECK(complement_of({0, 1}, 2).empty());
        CHECK(complement_of({1}, 2) == Injection{0});
        CHECK(complement_of({1}, 3) == Injection{0, 2});
        auto p = snc_corner_poset();
        CHECK(p.complement("C", "D1") == Injection{1});
        CHECK(p.complement("C", "M") == Injection{0, 1});
        CHECK_THROWS_AS(p.complement("D1", "D2"), NotComparable);
        CHECK_THROWS_AS(p.codim("nowhere"), UnknownStratum);
    }

    TEST_CASE("restrict_to_closure examples") {
        auto p = modular_poset();
        auto whole = p.restrict_to_closure("M");
        CHECK(whole.to_json() == p.to_json());
        auto point = p.restrict_to_closure("cusp");
        REQUIRE(point.strata().size() == 1);
        CHECK(point.codim("cusp") == 0);
        CHECK(point.validate().ok());

        auto d1 = snc_corner_poset().restrict_to_closure("D1");
        CHECK(d1.validate().ok());
        CHECK(d1.strata().size() == 2);
        CHECK(d1.of_codim(1) == std::vector<std::string>{"C"});
        CHECK(d1.beta("C", "D1").empty());
        CHECK_THROWS_AS(p.restrict_to_closure("nowhere"), UnknownStratum);
    }

    TEST_CASE("property: closures of valid posets are valid") {
        for (const auto& p : {modular_poset(), single_stratum_poset(), snc_corner_poset()})
            for (const auto& s : p.strata()) CHECK(p.restrict_to_closure(s.label).validate().ok());
    }

    TEST_CASE("property: restriction square commutes on every chain") {
        auto p = snc_corner_poset();
        for (const auto& w : p.strata())
            for (const auto& z : p.strata())
                for (const auto& y : p.strata()) {
                    if (!p.leq(w.label, z.label) || !p.leq(z.label, y.label)) continue;
                    const auto& bwz = p.beta(w.label, z.label);
                    auto perp_wy = p.complement(w.label, y.label);
                    CHECK(compose_injections(bwz, p.beta(z.label, y.label)) == p.beta(w.label, y.label));
                    for (int k : p.complement(z.label, y.label)) {
                        int x = bwz[static_cast<std::size_t>(k)];
                        CHECK(std::find(perp_wy.begin(), perp_wy.end(), x) != perp_wy.end());
                    }
                }
    }

    TEST_CASE("json round trip") {
        for (const auto& p : {modular_poset(), snc_corner_poset()}) {
            auto j = p.to_json();
            CHECK(StrataPoset::from_json(j).to_json() == j);
        }
        auto j = snc_corner_poset().to_json();
        CHECK(j["relations"].size() == 5);
    }
}
