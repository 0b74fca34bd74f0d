#include "fjcalc/equivariant_coeffs.hpp"

#include <algorithm>

#include "fjcalc/errors.hpp"

namespace fjc {

TorusRep TorusRep::trivial(int rank) { return line(Weight(static_cast<std::size_t>(rank), 0)); }

TorusRep TorusRep::line(const Weight& w) {
    TorusRep t;
    t.rank = static_cast<int>(w.size());
    t.weights[w] = 1;
    return t;
}

int TorusRep::dimension() const {
    int d = 0;
    for (const auto& [w, m] : weights) d += m;
    return d;
}

GL2Rep GL2Rep::trivial() { return irreducible(0, 0); }

GL2Rep GL2Rep::irreducible(int a, int b, int mult) {
    if (a < 0) throw ShapeMismatch("Sym^a needs a >= 0");
    GL2Rep r;
    if (mult > 0) r.irreps[{a, b}] = mult;
    return r;
}

int GL2Rep::dimension() const {
    int d = 0;
    for (const auto& [ab, m] : irreps) d += m * (ab.first + 1);
    return d;
}

std::string kind_name(const CoeffObject& x) {
    switch (x.index()) {
        case 0: return "torus";
        case 1: return "gl2";
        default: return "flag_line";
    }
}

int dimension(const CoeffObject& x) {
    if (auto t = std::get_if<TorusRep>(&x)) return t->dimension();
    if (auto g = std::get_if<GL2Rep>(&x)) return g->dimension();
    return 1;
}

namespace {

void same_kind(const CoeffObject& x, const CoeffObject& y) {
    if (x.index() != y.index()) throw ShapeMismatch(kind_name(x) + " vs " + kind_name(y));
    if (auto t = std::get_if<TorusRep>(&x))
        if (t->rank != std::get<TorusRep>(y).rank) throw ShapeMismatch("torus ranks differ");
}

Weight add_weights(const Weight& a, const Weight& b) {
    Weight c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
    return c;
}

}  // namespace

CoeffObject rep_ops(const CoeffObject& x, const CoeffObject& y, RepOp op) {
    if (op != RepOp::dual) same_kind(x, y);
    if (auto t = std::get_if<TorusRep>(&x)) {
        TorusRep r;
        r.rank = t->rank;
        if (op == RepOp::dual) {
            for (const auto& [w, m] : t->weights) {
                Weight n = w;
                for (auto& c : n) c = -c;
                r.weights[n] += m;
            }
        } else if (op == RepOp::direct_sum) {
            r = *t;
            for (const auto& [w, m] : std::get<TorusRep>(y).weights) r.weights[w] += m;
        } else {
            for (const auto& [w1, m1] : t->weights)
                for (const auto& [w2, m2] : std::get<TorusRep>(y).weights) r.weights[add_weights(w1, w2)] += m1 * m2;
        }
        return r;
    }
    if (auto g = std::get_if<GL2Rep>(&x)) {
        GL2Rep r;
        if (op == RepOp::dual) {
            for (const auto& [ab, m] : g->irreps) r.irreps[{ab.first, -ab.first - ab.second}] += m;
        } else if (op == RepOp::direct_sum) {
            r = *g;
            for (const auto& [ab, m] : std::get<GL2Rep>(y).irreps) r.irreps[ab] += m;
        } else {
            for (const auto& [ab, m1] : g->irreps)
                for (const auto& [cd, m2] : std::get<GL2Rep>(y).irreps)
                    for (int i = 0; i <= std::min(ab.first, cd.first); ++i)
                        r.irreps[{ab.first + cd.first - 2 * i, ab.second + cd.second + i}] += m1 * m2;
        }
        return r;
    }
    const auto& l = std::get<FlagLine>(x);
    if (op == RepOp::dual) return FlagLine{-l.k, -l.twist};
    if (op == RepOp::direct_sum) throw ShapeMismatch("direct sums of flag lines are not lines");
    const auto& m = std::get<FlagLine>(y);
    return FlagLine{l.k + m.k, l.twist + m.twist};
}

CoeffObject tensor(const CoeffObject& x, const CoeffObject& y) { return rep_ops(x, y, RepOp::tensor); }
CoeffObject dual(const CoeffObject& x) { return rep_ops(x, x, RepOp::dual); }
CoeffObject direct_sum(const CoeffObject& x, const CoeffObject& y) { return rep_ops(x, y, RepOp::direct_sum); }

int invariant_multiplicity(const CoeffObject& x) {
    if (auto t = std::get_if<TorusRep>(&x)) {
        auto it = t->weights.find(Weight(static_cast<std::size_t>(t->rank), 0));
        return it == t->weights.end() ? 0 : it->second;
    }
    if (auto g = std::get_if<GL2Rep>(&x)) {
        auto it = g->irreps.find({0, 0});
        return it == g->irreps.end() ? 0 : it->second;
    }
    throw UnsupportedCoefficient("invariants of a flag line are taken through its cohomology");
}

CoeffObject restrict_along(const GroupMorphism& alpha, const CoeffObject& x) {
    using K = GroupMorphism::Kind;
    if (alpha.kind == K::identity) return x;
    if (alpha.kind == K::gl2_to_diag_torus) {
        auto g = std::get_if<GL2Rep>(&x);
        if (!g) throw UnsupportedMorphism("diag(t,1) restriction expects a GL_2 representation");
        TorusRep r;
        r.rank = 1;
        for (const auto& [ab, m] : g->irreps)
            for (int j = 0; j <= ab.first; ++j) r.weights[{ab.second + j}] += m;
        return r;
    }
    auto t = std::get_if<TorusRep>(&x);
    if (!t) throw UnsupportedMorphism("torus embedding expects a torus representation");
    const auto& e = alpha.embedding;
    if (static_cast<int>(e.size()) != t->rank) throw UnsupportedMorphism("embedding matrix has wrong row count");
    std::size_t sub = e.empty() ? 0 : e.front().size();
    TorusRep r;
    r.rank = static_cast<int>(sub);
    for (const auto& [w, m] : t->weights) {
        Weight out(sub, 0);
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i].size() != sub) throw UnsupportedMorphism("ragged embedding matrix");
            for (std::size_t j = 0; j < sub; ++j) out[j] += e[i][j] * w[i];
        }
        r.weights[out] += m;
    }
    return r;
}

FlagCohomology bwb_p1(int k, int twist) {
    FlagCohomology c;
    if (k >= 0) c.h0 = GL2Rep::irreducible(k, twist);
    if (k <= -2) c.h1 = GL2Rep::irreducible(-2 - k, twist + k + 1);
    return c;
}

FlagLine cotangent_line() { return FlagLine{-2, 1}; }

TorusRep unipotent_cohomology(int rank, const std::vector<Weight>& weights, int i) {
    TorusRep r;
    r.rank = rank;
    int n = static_cast<int>(weights.size());
    if (i < 0 || i > n) return r;
    std::vector<bool> pick(static_cast<std::size_t>(n), false);
    std::fill(pick.begin(), pick.begin() + i, true);
    do {
        Weight sum(static_cast<std::size_t>(rank), 0);
        for (int k = 0; k < n; ++k)
            if (pick[static_cast<std::size_t>(k)])
                for (int c = 0; c < rank; ++c) sum[static_cast<std::size_t>(c)] -= weights[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
        r.weights[sum] += 1;
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return r;
}

Weight s_weight(LiePiece p) {
    switch (p) {
        case LiePiece::U: return {-1, -1};
        case LiePiece::V_plus: return {-1, 0};
        case LiePiece::V_minus: return {0, -1};
        case LiePiece::R_plus: return {-1, 1};
        case LiePiece::K: return {0, 0};
        case LiePiece::R_minus: return {1, -1};
    }
    return {0, 0};
}

std::string to_string(LiePiece p) {
    switch (p) {
        case LiePiece::U: return "U";
        case LiePiece::V_plus: return "V+";
        case LiePiece::V_minus: return "V-";
        case LiePiece::R_plus: return "R+";
        case LiePiece::K: return "K";
        case LiePiece::R_minus: return "R-";
    }
    return "?";
}

std::vector<Weight> BoundaryDatum::quasi_parabolic_weights() const {
    std::vector<Weight> w(static_cast<std::size_t>(v), s_weight(LiePiece::V_plus));
    w.insert(w.end(), static_cast<std::size_t>(n0), s_weight(LiePiece::R_plus));
    return w;
}

Weight BoundaryDatum::omega_weight() const { return {-u - v - n0, n0 - u}; }

int quasi_parabolic_cohomology(const BoundaryDatum& d, const CoeffObject& coeff, int i) {
    auto t = std::get_if<TorusRep>(&coeff);
    if (!t || t->rank != 2 || t->dimension() != 1)
        throw UnsupportedCoefficient("expected a 1-dimensional rank-2 torus line, got " + kind_name(coeff));
    TorusRep ext = unipotent_cohomology(2, d.quasi_parabolic_weights(), i);
    return invariant_multiplicity(tensor(ext, *t));
}

BoundaryVanishingReport boundary_vanishing_check(const BoundaryDatum& d) {
    BoundaryVanishingReport r;
    r.datum = d;
    r.applicable = d.u != 0;
    r.claim_from = d.n() - d.u;
    CoeffObject omega = TorusRep::line(d.omega_weight());
    for (int i = 0; i <= d.n0 + d.v; ++i) {
        int m = quasi_parabolic_cohomology(d, omega, i);
        r.multiplicities.push_back(m);
        if (m != 0) {
            r.vanishes_all = false;
            if (i >= r.claim_from) r.claim_holds = false;
        }
    }
    auto top = unipotent_cohomology(2, d.quasi_parabolic_weights(), d.n0 + d.v);
    r.top_weight = top.weights.begin()->first;
    r.product_weight = add_weights(r.top_weight, d.omega_weight());
    return r;
}

std::vector<std::string> GroupDatum::violations() const {
    std::vector<std::string> out;
    for (const auto& l : u_lines)
        if (std::find(unipotent_weights.begin(), unipotent_weights.end(), l) == unipotent_weights.end())
            out.push_back("u-line weight is not a unipotent weight");
    if (shape != Shape::semidirect && !unipotent_weights.empty()) out.push_back("unipotent weights on a reductive shape");
    for (const auto& w : unipotent_weights)
        if (static_cast<int>(w.size()) != torus_rank) out.push_back("unipotent weight of wrong length");
    return out;
}

GroupDatum GroupDatum::torus(int r) {
    GroupDatum g;
    g.torus_rank = r;
    return g;
}

GroupDatum GroupDatum::gl2() {
    GroupDatum g;
    g.shape = Shape::gl2;
    g.reductive_part = "gl2";
    return g;
}

GroupDatum GroupDatum::boundary_group(const BoundaryDatum& d) {
    GroupDatum g;
    g.shape = Shape::semidirect;
    g.torus_rank = 2;
    g.reductive_part = "K";
    g.unipotent_weights.assign(static_cast<std::size_t>(d.u), s_weight(LiePiece::U));
    auto qp = d.quasi_parabolic_weights();
    g.unipotent_weights.insert(g.unipotent_weights.end(), qp.begin(), qp.end());
    if (d.u > 0) g.u_lines.push_back(s_weight(LiePiece::U));
    g.boundary = d;
    return g;
}

CoeffObject unit_coeff(const GroupDatum& g) {
    if (g.shape == GroupDatum::Shape::gl2) return FlagLine{0, 0};
    return TorusRep::trivial(g.torus_rank);
}

CoeffObject omega_coeff(const GroupDatum& g) {
    if (g.shape == GroupDatum::Shape::gl2) return cotangent_line();
    if (g.boundary) return TorusRep::line(g.boundary->omega_weight());
    return TorusRep::trivial(g.torus_rank);
}

int stack_cohomology(const GroupDatum& g, const CoeffObject& coeff, int i) {
    if (i < 0) return 0;
    if (g.shape == GroupDatum::Shape::gl2) {
        if (auto l = std::get_if<FlagLine>(&coeff)) {
            auto c = bwb_p1(l->k, l->twist);
            if (i == 0) return invariant_multiplicity(c.h0);
            if (i == 1) return invariant_multiplicity(c.h1);
            return 0;
        }
        if (std::holds_alternative<GL2Rep>(coeff)) return i == 0 ? invariant_multiplicity(coeff) : 0;
        throw NotComputable("gl2 stratum with " + kind_name(coeff) + " coefficient");
    }
    if (g.shape == GroupDatum::Shape::torus) {
        if (!std::holds_alternative<TorusRep>(coeff)) throw NotComputable("torus stratum with " + kind_name(coeff) + " coefficient");
        return i == 0 ? invariant_multiplicity(coeff) : 0;
    }
    if (g.boundary) return quasi_parabolic_cohomology(*g.boundary, coeff, i);
    throw NotComputable("semidirect group without boundary datum");
}

nlohmann::json to_json(const CoeffObject& x) {
    nlohmann::json j;
    j["kind"] = kind_name(x);
    if (auto t = std::get_if<TorusRep>(&x)) {
        j["rank"] = t->rank;
        j["weights"] = nlohmann::json::array();
        for (const auto& [w, m] : t->weights) j["weights"].push_back({{"weight", w}, {"mult", m}});
    } else if (auto g = std::get_if<GL2Rep>(&x)) {
        j["irreps"] = nlohmann::json::array();
        for (const auto& [ab, m] : g->irreps) j["irreps"].push_back({{"a", ab.first}, {"b", ab.second}, {"mult", m}});
    } else {
        const auto& l = std::get<FlagLine>(x);
        j["k"] = l.k;
        j["twist"] = l.twist;
    }
    return j;
}

CoeffObject coeff_from_json(const nlohmann::json& j) {
    try {
        auto kind = j.at("kind").get<std::string>();
        if (kind == "torus") {
            TorusRep t;
            t.rank = j.at("rank").get<int>();
            for (const auto& e : j.at("weights")) {
                auto w = e.at("weight").get<Weight>();
                if (static_cast<int>(w.size()) != t.rank) throw ParseError("weight of wrong length");
                int m = e.value("mult", 1);
                if (m <= 0) throw ParseError("multiplicity must be positive");
                t.weights[w] += m;
            }
            return t;
        }
        if (kind == "gl2") {
            GL2Rep g;
            for (const auto& e : j.at("irreps")) {
                int a = e.at("a").get<int>(), m = e.value("mult", 1);
                if (a < 0 || m <= 0) throw ParseError("bad GL_2 irreducible");
                g.irreps[{a, e.at("b").get<int>()}] += m;
            }
            return g;
        }
        if (kind == "flag_line") return FlagLine{j.at("k").get<int>(), j.value("twist", 0)};
        throw ParseError("unknown coefficient kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("coefficient: ") + e.what());
    }
}

nlohmann::json to_json(const GroupDatum& g) {
    nlohmann::json j;
    switch (g.shape) {
        case GroupDatum::Shape::torus: j["shape"] = "torus"; break;
        case GroupDatum::Shape::gl2: j["shape"] = "gl2"; break;
        case GroupDatum::Shape::semidirect: j["shape"] = "semidirect"; break;
    }
    j["torus_rank"] = g.torus_rank;
    if (!g.reductive_part.empty()) j["reductive_part"] = g.reductive_part;
    j["unipotent_weights"] = g.unipotent_weights;
    j["u_lines"] = g.u_lines;
    if (g.boundary) j["boundary"] = {{"n0", g.boundary->n0}, {"v", g.boundary->v}, {"u", g.boundary->u}};
    j["reductive"] = g.reductive();
    return j;
}

GroupDatum group_datum_from_json(const nlohmann::json& j) {
    try {
        if (j.contains("boundary")) {
            const auto& b = j.at("boundary");
            return GroupDatum::boundary_group({b.at("n0").get<int>(), b.at("v").get<int>(), b.at("u").get<int>()});
        }
        auto shape = j.at("shape").get<std::string>();
        GroupDatum g;
        if (shape == "torus") {
            g = GroupDatum::torus(j.value("torus_rank", 0));
        } else if (shape == "gl2") {
            g = GroupDatum::gl2();
        } else if (shape == "semidirect") {
            g.shape = GroupDatum::Shape::semidirect;
            g.torus_rank = j.value("torus_rank", 2);
            g.reductive_part = j.value("reductive_part", std::string("gl2"));
            g.unipotent_weights = j.value("unipotent_weights", std::vector<Weight>{});
            g.u_lines = j.value("u_lines", std::vector<Weight>{});
        } else {
            throw ParseError("unknown group shape '" + shape + "'");
        }
        auto v = g.violations();
        if (!v.empty()) throw ParseError("group datum: " + v.front());
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("group datum: ") + e.what());
    }
}

nlohmann::json to_json(const BoundaryVanishingReport& r) {
    return {{"n0", r.datum.n0},
            {"v", r.datum.v},
            {"u", r.datum.u},
            {"applicable", r.applicable},
            {"verdict", r.applicable ? (r.claim_holds ? "holds" : "fails") : "not applicable"},
            {"multiplicities", r.multiplicities},
            {"claim_from_degree", r.claim_from},
            {"vanishes_all", r.vanishes_all},
            {"top_weight", r.top_weight},
            {"product_weight", r.product_weight},
            {"assumption_s_in_k", r.assumes_s_in_k}};
}

}  // namespace fjc
