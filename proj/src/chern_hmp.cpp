#include "fjcalc/chern_hmp.hpp"

#include <algorithm>

#include "fjcalc/errors.hpp"

namespace fjc {

namespace {

struct CechWindow {
    int lo = 0, hi = 0;  // Laurent exponents kept in C^1
    int twist = 0;
    RationalMatrix d;  // C^0 -> C^1, columns: f0 exponents 0..hi, then f1 exponents lo..twist
    int f0_count = 0;

    std::size_t row(int e) const { return static_cast<std::size_t>(e - lo); }
};

// Exponents outside [min(k,0)-1, max(k,0)+1] are all coboundaries, so the window is exact.
CechWindow cech_window(int k, int lo, int hi) {
    CechWindow w;
    w.twist = k;
    w.lo = std::min(lo, std::min(k, 0) - 1);
    w.hi = std::max(hi, std::max(k, 0) + 1);
    auto len = static_cast<std::size_t>(w.hi - w.lo + 1);
    std::vector<Column> cols;
    for (int e = 0; e <= w.hi; ++e) {
        Column c(len);
        c[w.row(e)] = -1;
        cols.push_back(c);
    }
    w.f0_count = static_cast<int>(cols.size());
    for (int e = w.lo; e <= k; ++e) {
        Column c(len);
        c[w.row(e)] = 1;
        cols.push_back(c);
    }
    w.d = RationalMatrix::from_columns(len, cols);
    return w;
}

Column as_column(const CechWindow& w, const LaurentCocycle& c) {
    Column v(static_cast<std::size_t>(w.hi - w.lo + 1));
    for (const auto& [e, x] : c.coeffs) v[w.row(e)] = x;
    return v;
}

std::pair<int, int> exponent_range(const LaurentCocycle& c) {
    if (c.coeffs.empty()) return {0, 0};
    return {c.coeffs.begin()->first, c.coeffs.rbegin()->first};
}

void put(LaurentCocycle& c, int e, const Rational& x) {
    Rational s = c.coeffs[e] + x;
    if (s == 0)
        c.coeffs.erase(e);
    else
        c.coeffs[e] = s;
}

}  // namespace

bool is_coboundary(const LaurentCocycle& c) {
    auto [lo, hi] = exponent_range(c);
    auto w = cech_window(c.twist, lo, hi);
    return solve(w.d, as_column(w, c)).has_value();
}

CechCohomology cech_p1(int k, int i) {
    if (i < 0 || i > 1) throw DegreeOutOfRange("the two-chart cover has no H^" + std::to_string(i));
    auto w = cech_window(k, 0, 0);
    CechCohomology out;
    if (i == 0) {
        for (const auto& v : kernel_basis(w.d)) {
            LaurentCocycle s{k, {}};
            for (int e = 0; e < w.f0_count; ++e)
                if (v[static_cast<std::size_t>(e)] != 0) s.coeffs[e] = v[static_cast<std::size_t>(e)];
            out.representatives.push_back(s);
        }
    } else {
        RationalMatrix span = w.d;
        auto len = static_cast<std::size_t>(w.hi - w.lo + 1);
        for (int e = w.hi; e >= w.lo; --e) {
            Column c(len);
            c[w.row(e)] = 1;
            if (solve(span, c)) continue;
            span = hstack(span, RationalMatrix::from_columns(len, {c}));
            out.representatives.push_back({k, {{e, Rational(1)}}});
        }
    }
    out.dimension = static_cast<int>(out.representatives.size());
    return out;
}

LaurentCocycle transition(int k) { return {k, {{k, Rational(1)}}}; }

LaurentCocycle multiply(const LaurentCocycle& a, const LaurentCocycle& b) {
    LaurentCocycle c{a.twist + b.twist, {}};
    for (const auto& [ea, xa] : a.coeffs)
        for (const auto& [eb, xb] : b.coeffs) put(c, ea + eb, xa * xb);
    return c;
}

LaurentCocycle atiyah_cocycle(const LaurentCocycle& g) {
    if (g.coeffs.size() != 1) throw DimensionMismatch("transition function is not a unit of the Laurent ring");
    const auto& [m, lead] = *g.coeffs.begin();
    LaurentCocycle out{-2, {}};
    for (const auto& [e, x] : g.coeffs)
        if (e != 0) put(out, e - 1 - m, Rational(e) * x / lead);
    return out;
}

Rational h1_coordinate(const LaurentCocycle& c) {
    if (c.twist != -2) throw DimensionMismatch("expected a cocycle of O(-2)");
    auto [lo, hi] = exponent_range(c);
    auto w = cech_window(-2, lo, hi);
    auto reps = cech_p1(-2, 1).representatives;
    auto len = static_cast<std::size_t>(w.hi - w.lo + 1);
    std::vector<Column> rc;
    for (const auto& r : reps) rc.push_back(as_column(w, r));
    auto x = solve(hstack(w.d, RationalMatrix::from_columns(len, rc)), as_column(w, c));
    if (!x) throw DimensionMismatch("cocycle outside the truncated window");
    return x->back();
}

Rational atiyah_c1(int k) {
    auto residue = [](const LaurentCocycle& c) {
        auto it = c.coeffs.find(-1);
        return it == c.coeffs.end() ? Rational(0) : it->second;
    };
    return residue(atiyah_cocycle(transition(k))) / residue(atiyah_cocycle(transition(1)));
}

namespace {

const GroupDatum& open_group(const FJModel& m) { return m.group(m.poset.open_stratum()); }

void require_reductive(const FJModel& m) {
    if (!open_group(m).reductive())
        throw HypothesisViolated("open stratum group of '" + m.name + "' is not reductive");
}

ExtResult top_ext(const ModelPtr& model, int n, bool& shortcut) {
    shortcut = model->poset.strata().size() == 1;
    if (!shortcut) return ext_dim(omega_object(model), n);
    const auto& g = open_group(*model);
    ExtResult e;
    e.lo = e.hi = stack_cohomology(g, omega_coeff(g), n);
    e.audit.push_back("H^" + std::to_string(n) + " of omega on the compact dual, invariants = " + std::to_string(e.lo) +
                      " (single stratum)");
    return e;
}

}  // namespace

UniversalClass universal_class(const ModelPtr& model, int k) {
    if (model->tangent_dim != 1) throw NotComputable("universal class is only evaluated in dimension one");
    require_reductive(*model);
    UniversalClass u;
    auto js = jet_sequence(model, 1);
    u.sequence_exact = js.exact;
    u.sequence_split = js.split;
    u.mvee_coordinate = atiyah_c1(k);
    if (!js.exact) {
        u.status = "not computable";
        u.audit.push_back("jet sequence is not exact");
        return u;
    }
    ExtResult e;
    bool shortcut = false;
    try {
        e = top_ext(model, 1, shortcut);
    } catch (const NotComputable& err) {
        u.status = "not computable";
        u.audit.push_back(err.what());
        return u;
    }
    u.ext_lo = e.lo;
    u.ext_hi = e.hi;
    u.audit = e.audit;
    if (!(e.lo == 1 && e.hi == 1)) {
        u.status = "not computable";
        u.audit.push_back("Ext^1(O, omega) is not known to be one-dimensional");
        return u;
    }
    auto cocycle = atiyah_cocycle(transition(k));
    u.fj_coordinate = h1_coordinate(cocycle);
    u.audit.push_back("jet class of O(" + std::to_string(k) + ") has coordinate " + to_string(*u.fj_coordinate) +
                      " on the generator of Ext^1(O, omega)");
    if (*u.fj_coordinate != 0 && u.mvee_coordinate != 0) u.ratio = *u.fj_coordinate / u.mvee_coordinate;
    u.status = (*u.fj_coordinate == 0 && u.mvee_coordinate == 0) ? "split" : "defined";
    return u;
}

ChernReport hmp_check(const ModelPtr& model) {
    require_reductive(*model);
    ChernReport r;
    r.model = model->name;
    r.open_reductive = true;
    r.degree = model->tangent_dim;
    const int n = r.degree;
    const auto& g = open_group(*model);
    if (g.shape == GroupDatum::Shape::gl2) r.mvee_chern = atiyah_c1(cotangent_line().k);
    if (model->poset.strata().size() > 1) {
        auto rr = residue_resolution(model);
        r.degrees_checked = rr.degrees_checked;
        r.audit.push_back("residue resolution certified exact on " + std::to_string(rr.degrees_checked) + " degrees");
        for (const auto& s : model->poset.strata()) {
            if (s.codim == 0) continue;
            const auto& gy = model->group(s.label);
            if (gy.boundary) r.boundary.emplace(s.label, boundary_vanishing_check(*gy.boundary));
            auto ob = omega_bar(model, s.label);
            std::vector<int> dims;
            for (int i = 0; i <= n; ++i) dims.push_back(ext_dim(ob, i).lo);
            r.boundary_ext[s.label] = dims;
        }
    }
    auto e = top_ext(model, n, r.shortcut);
    r.lo = e.lo;
    r.hi = e.hi;
    r.dim = e.lo;
    r.audit.insert(r.audit.end(), e.audit.begin(), e.audit.end());
    if (n == 1) {
        try {
            r.universal_status = universal_class(model, 1).status;
        } catch (const Error& err) {
            r.universal_status = std::string("not computable: ") + err.what();
        }
    } else {
        r.universal_status = "not evaluated (dimension " + std::to_string(n) + ")";
    }
    return r;
}

nlohmann::json to_json(const LaurentCocycle& c) {
    nlohmann::json terms = nlohmann::json::object();
    for (const auto& [e, x] : c.coeffs) terms[std::to_string(e)] = to_string(x);
    return {{"twist", c.twist}, {"terms", terms}};
}

nlohmann::json to_json(const UniversalClass& u) {
    nlohmann::json j{{"status", u.status},
                     {"sequence_exact", u.sequence_exact},
                     {"sequence_split", u.sequence_split},
                     {"ext_bounds", {u.ext_lo, u.ext_hi}},
                     {"mvee_coordinate", to_string(u.mvee_coordinate)},
                     {"audit", u.audit}};
    j["fj_coordinate"] = u.fj_coordinate ? nlohmann::json(to_string(*u.fj_coordinate)) : nlohmann::json();
    j["ratio"] = u.ratio ? nlohmann::json(to_string(*u.ratio)) : nlohmann::json();
    return j;
}

nlohmann::json to_json(const ChernReport& r) {
    nlohmann::json j{{"model", r.model},
                     {"open_group_reductive", r.open_reductive},
                     {"shortcut", r.shortcut},
                     {"n", r.degree},
                     {"dim_ext_n", r.dim},
                     {"bounds", {r.lo, r.hi}},
                     {"universal_class", r.universal_status},
                     {"degrees_checked", r.degrees_checked},
                     {"audit", r.audit}};
    j["mvee_chern_c1"] = r.mvee_chern ? nlohmann::json(to_string(*r.mvee_chern)) : nlohmann::json();
    j["chern_ring_degrees"] = {{"c1", 1}};
    j["boundary"] = nlohmann::json::object();
    for (const auto& [y, b] : r.boundary) j["boundary"][y] = to_json(b);
    j["boundary_ext"] = r.boundary_ext;
    return j;
}

}  // namespace fjc
