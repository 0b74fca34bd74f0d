#include "fjcalc/scenario.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fjcalc/chern_hmp.hpp"
#include "fjcalc/errors.hpp"
#include "fjcalc/fj_category.hpp"
#include "fjcalc/toml_json.hpp"

namespace fjc {

namespace {

using nlohmann::json;

struct Builtin {
    const char* name;
    const char* description;
    const char* body;
};

// clang-format off
const Builtin kBuiltins[] = {
    {"modular_curve",
     "Modular curve with one cusp: weight-12 cusp-form object, residue resolution and Ext^1(O, omega) = 1",
     R"({
  "model": "modular_curve",
  "objects": {
    "cusp_form": {"kind": "modular_form", "k": 12, "cusp_bound": 1},
    "omega_cusp": {"kind": "omega_bar", "stratum": "cusp"}
  },
  "checks": [
    {"check": "validate", "object": "cusp_form"},
    {"check": "validate", "object": "omega"},
    {"check": "ext", "object": "omega", "degree": 1, "expect": 1},
    {"check": "ext", "object": "omega_cusp", "degree": 0, "expect": 0},
    {"check": "ext", "object": "omega_cusp", "degree": 1, "expect": 0},
    {"check": "ext", "object": "omega_mvee", "degree": 1, "expect": 1},
    {"check": "expansion", "object": "cusp_form", "stratum": "cusp", "expect_sections": 0},
    {"check": "hmp", "expect": 1}
  ]
})"},
    {"jacobi",
     "Weight-k index-i Jacobi-form toy: one nonzero boundary degree, not torsion-free, non-reductive open group",
     R"({
  "model": "jacobi",
  "objects": {
    "jacobi_form": {"kind": "jacobi", "k": 10, "index": 2}
  },
  "checks": [
    {"check": "validate", "object": "jacobi_form"},
    {"check": "predicates", "object": "jacobi_form", "stratum": "Y",
     "expect": {"torsion_free": false, "locally_free": false, "coherent": true}},
    {"check": "expansion", "object": "jacobi_form", "stratum": "Y", "expect_components": 1, "expect_at": [[2]]},
    {"check": "tensor", "left": "jacobi_form", "right": "jacobi_form", "expect_error": "NotTorsionFree"},
    {"check": "hmp", "expect_error": "HypothesisViolated"}
  ]
})"},
    {"compact_p1",
     "Compact GL_2 flag line with no boundary: omega equals its compact-dual model and Ext^1 is one-dimensional",
     R"({
  "model": "compact_p1",
  "objects": {
    "line": {"kind": "coextend", "stratum": "M", "degree": [], "coeff": {"kind": "flag_line", "k": 3, "twist": 0}}
  },
  "checks": [
    {"check": "validate", "object": "omega"},
    {"check": "tensor", "left": "line", "right": "O"},
    {"check": "ext", "object": "omega", "degree": 1, "expect": 1},
    {"check": "hmp", "expect": 1}
  ]
})"},
    {"boundary_vanishing_sweep",
     "Weight arithmetic of the boundary vanishing condition over (n0, v, u) in [0,4] x [0,4] x [1,4]",
     R"({
  "model": "modular_curve",
  "checks": [
    {"check": "vanishing", "n0": [0, 4], "v": [0, 4], "u": [1, 4]}
  ]
})"},
    {"snc_corner_toy",
     "Two boundary divisors meeting in a corner: Omega' filtration and residue resolution in rank 2",
     R"({
  "model": "snc_corner_toy",
  "checks": [
    {"check": "validate", "object": "omega_prime"},
    {"check": "predicates", "object": "omega_prime", "expect": {"torsion_free": true}},
    {"check": "tensor", "left": "omega_prime", "right": "omega_log_prime"},
    {"check": "validate", "object": "omega"},
    {"check": "ext", "object": "omega", "degree": 2},
    {"check": "hmp"}
  ]
})"},
};
// clang-format on

const std::set<std::string> kPredefined = {"O", "omega", "omega_mvee", "omega_prime", "omega_log_prime"};
const std::set<std::string> kObjectKinds = {"canonical", "zero",    "modular_form", "jacobi",   "coextend",
                                            "omega_bar", "omega",   "omega_mvee",   "omega_prime",
                                            "omega_log_prime", "jet", "jet1", "truncate",   "tensor",   "direct_sum"};

ModelPtr resolve_model(const json& m) {
    if (m.is_string()) {
        auto tag = m.get<std::string>();
        if (tag == "modular_curve") return modular_model();
        if (tag == "compact_p1") return compact_p1_model();
        if (tag == "jacobi") return jacobi_model();
        if (tag == "snc_corner_toy") return snc_corner_model();
        throw ParseError("unknown built-in model '" + tag + "'");
    }
    if (m.is_object()) return model_from_json(m);
    throw ParseError("model must be a built-in tag or a model description");
}

std::string error_kind(const std::exception& e) {
    std::string w = e.what();
    auto colon = w.find(':');
    return colon == std::string::npos ? w : w.substr(0, colon);
}

template <typename T>
T field(const json& j, const char* key, const T& fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError(std::string("field '") + key + "' has the wrong type");
    }
}

template <typename T>
T required(const json& j, const char* key) {
    if (!j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    return field<T>(j, key, T{});
}

class Context {
public:
    explicit Context(const Scenario& s) : model_(resolve_model(s.model)), defs_(s.objects) {}

    const ModelPtr& model() const { return model_; }

    ObjectPtr object(const std::string& name) {
        auto it = cache_.find(name);
        if (it != cache_.end()) return it->second;
        if (!building_.insert(name).second) throw ParseError("object '" + name + "' is defined in terms of itself");
        ObjectPtr f = defs_.contains(name) ? build(defs_.at(name)) : build(json{{"kind", name}});
        building_.erase(name);
        cache_[name] = f;
        return f;
    }

private:
    ObjectPtr build(const json& d) {
        auto kind = required<std::string>(d, "kind");
        if (kind == "canonical" || kind == "O") return canonical_object(model_, field<int>(d, "dim", 1));
        if (kind == "zero") return fj_zero_object(model_);
        if (kind == "modular_form")
            return modular_form_object(model_, required<int>(d, "k"), field<int>(d, "cusp_bound", 1));
        if (kind == "jacobi") return jacobi_object(model_, required<int>(d, "k"), required<int>(d, "index"));
        if (kind == "coextend")
            return coextend(model_, required<std::string>(d, "stratum"), field<Point>(d, "degree", {}),
                            coeff_from_json(d.at("coeff")), field<int>(d, "bound", 0));
        if (kind == "omega_bar") return omega_bar(model_, required<std::string>(d, "stratum"));
        if (kind == "omega") return omega_object(model_);
        if (kind == "omega_mvee") return omega_mvee(model_);
        if (kind == "omega_prime") return omega_prime(model_);
        if (kind == "omega_log_prime") return omega_log_prime(model_);
        if (kind == "jet" || kind == "jet1") return jet_object(model_, field<int>(d, "rank", 1), field<int>(d, "order", 1));
        if (kind == "truncate") return truncate(object(required<std::string>(d, "of")), required<int>(d, "bound"));
        if (kind == "tensor")
            return tensor_fj(object(required<std::string>(d, "left")), object(required<std::string>(d, "right")));
        if (kind == "direct_sum") {
            std::vector<ObjectPtr> parts;
            for (const auto& n : required<std::vector<std::string>>(d, "of")) parts.push_back(object(n));
            return fj_direct_sum(parts, "sum");
        }
        throw ParseError("unknown object kind '" + kind + "'");
    }

    ModelPtr model_;
    json defs_;
    std::map<std::string, ObjectPtr> cache_;
    std::set<std::string> building_;
};

void require_stratum(const ModelPtr& m, const json& j, const char* key) {
    if (!j.contains(key)) return;
    auto y = field<std::string>(j, key, "");
    if (!m->poset.has(y)) throw ParseError("unknown stratum '" + y + "'");
}

void require_object(const Scenario& s, const json& j, const char* key) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    std::vector<std::string> names;
    if (v.is_array())
        names = field<std::vector<std::string>>(j, key, {});
    else
        names.push_back(field<std::string>(j, key, ""));
    for (const auto& n : names)
        if (!s.objects.contains(n) && !kPredefined.count(n)) throw ParseError("unknown object '" + n + "'");
}

json points_json(const std::vector<Point>& pts) {
    json a = json::array();
    for (const auto& p : pts) a.push_back(p);
    return a;
}

// ------------------------------------------------------------------ checks

bool check_validate(Context& ctx, const json& c, json& out) {
    auto f = ctx.object(required<std::string>(c, "object"));
    auto v = validate(*f);
    out["object"] = f->label;
    out["valid"] = v.empty();
    json list = json::array();
    for (const auto& x : v) list.push_back(x.kind + ": " + x.detail);
    out["violations"] = list;
    return v.empty() == field<bool>(c, "expect", true);
}

bool check_predicates(Context& ctx, const json& c, json& out) {
    auto f = ctx.object(required<std::string>(c, "object"));
    auto only = field<std::string>(c, "stratum", "");
    json expect = c.value("expect", json::object());
    bool pass = true;
    out["object"] = f->label;
    for (const auto& s : ctx.model()->poset.strata()) {
        if (!only.empty() && s.label != only) continue;
        auto p = predicates(f->at(s.label));
        json pj{{"bounded_below", p.bounded_below},
                {"coherent", p.coherent},
                {"torsion_free", p.torsion_free},
                {"locally_free", p.locally_free}};
        for (const auto& [k, v] : expect.items()) {
            if (!pj.contains(k)) throw ParseError("unknown predicate '" + k + "'");
            if (pj[k] != v) pass = false;
        }
        out["strata"][s.label] = pj;
    }
    return pass;
}

bool check_tensor(Context& ctx, const json& c, json& out) {
    auto f = ctx.object(required<std::string>(c, "left"));
    auto g = ctx.object(required<std::string>(c, "right"));
    auto t = tensor_fj(f, g);
    out["object"] = t->label;
    out["valid"] = validate(*t).empty();
    for (const auto& s : ctx.model()->poset.strata()) {
        const auto& m = t->at(s.label);
        out["strata"][s.label] = {{"lo", m.lo()}, {"hi", m.hi()}, {"stable_dim", m.dim(m.hi())}};
    }
    return out["valid"].get<bool>() && !c.contains("expect_error");
}

bool check_expansion(Context& ctx, const json& c, json& out) {
    auto f = ctx.object(required<std::string>(c, "object"));
    auto y = required<std::string>(c, "stratum");
    auto r = fj_expansion(f, y);
    out = to_json(r);
    out["object"] = f->label;
    bool pass = r.injective || r.sections == 0;
    if (c.contains("expect_components") && r.support.size() != c["expect_components"].get<std::size_t>()) pass = false;
    if (c.contains("expect_at") && points_json(r.support) != c["expect_at"]) pass = false;
    if (c.contains("expect_sections") && r.sections != c["expect_sections"].get<std::size_t>()) pass = false;
    return pass;
}

bool check_vanishing(const json& c, json& out) {
    auto range = [&](const char* key, std::pair<int, int> fallback) {
        auto v = field<std::vector<int>>(c, key, {fallback.first, fallback.second});
        if (v.size() != 2 || v[0] > v[1]) throw ParseError(std::string("bad range for '") + key + "'");
        return std::make_pair(v[0], v[1]);
    };
    auto n0r = range("n0", {0, 4}), vr = range("v", {0, 4}), ur = range("u", {1, 4});
    json cases = json::array(), failures = json::array();
    bool claim_all = true, vanish_all = true;
    for (int n0 = n0r.first; n0 <= n0r.second; ++n0)
        for (int v = vr.first; v <= vr.second; ++v)
            for (int u = ur.first; u <= ur.second; ++u) {
                auto r = boundary_vanishing_check({n0, v, u});
                bool weights_ok = !r.applicable || (r.top_weight == Weight{v + n0, -n0} && r.product_weight == Weight{-u, -u});
                claim_all = claim_all && r.claim_holds;
                vanish_all = vanish_all && r.vanishes_all;
                json one{{"n0", n0}, {"v", v}, {"u", u}, {"top_weight", r.top_weight},
                         {"product_weight", r.product_weight}, {"vanishes_all", r.vanishes_all}};
                if (!weights_ok || !r.claim_holds || !r.vanishes_all) failures.push_back(one);
                cases.push_back(one);
            }
    out = {{"checked", cases.size()},
           {"claim_holds_all", claim_all},
           {"vanishes_all", vanish_all},
           {"failures", failures},
           {"cases", cases}};
    return failures.empty();
}

bool check_ext(Context& ctx, const json& c, json& out) {
    auto f = ctx.object(required<std::string>(c, "object"));
    int i = required<int>(c, "degree");
    auto e = ext_dim(f, i);
    out = {{"object", f->label}, {"degree", i}, {"lo", e.lo}, {"hi", e.hi}, {"exact", e.exact()}, {"audit", e.audit}};
    if (!e.exact()) return false;
    return !c.contains("expect") || c["expect"].get<int>() == e.lo;
}

bool check_hmp(Context& ctx, const json& c, json& out) {
    auto r = hmp_check(ctx.model());
    out = to_json(r);
    if (c.contains("expect_error")) return false;
    if (!r.exact() || r.dim < 0 || r.dim > 1) return false;
    return !c.contains("expect") || c["expect"].get<int>() == r.dim;
}

}  // namespace

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names = {"validate", "predicates", "tensor", "expansion", "vanishing", "ext", "hmp"};
    return names;
}

Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("scenario must be an object");
    Scenario s;
    s.name = field<std::string>(j, "name", "unnamed");
    s.description = field<std::string>(j, "description", "");
    if (!j.contains("model")) throw ParseError("missing field 'model'");
    s.model = j.at("model");
    s.objects = j.value("objects", json::object());
    s.checks = j.value("checks", json::array());
    if (!s.objects.is_object()) throw ParseError("'objects' must be a table");
    if (!s.checks.is_array()) throw ParseError("'checks' must be an array");
    auto model = resolve_model(s.model);
    for (const auto& [name, def] : s.objects.items()) {
        auto kind = required<std::string>(def, "kind");
        if (!kObjectKinds.count(kind)) throw ParseError("object '" + name + "' has unknown kind '" + kind + "'");
        require_stratum(model, def, "stratum");
        for (const char* key : {"of", "left", "right"}) require_object(s, def, key);
        if (def.contains("coeff")) coeff_from_json(def["coeff"]);
    }
    const auto& names = check_names();
    for (const auto& c : s.checks) {
        auto name = required<std::string>(c, "check");
        if (std::find(names.begin(), names.end(), name) == names.end()) throw ParseError("unknown check '" + name + "'");
        require_stratum(model, c, "stratum");
        for (const char* key : {"object", "left", "right"}) require_object(s, c, key);
    }
    return s;
}

Scenario parse_scenario(const std::string& text, bool toml) {
    json j;
    if (toml) {
        j = toml_to_json(text);
    } else {
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("JSON: ") + e.what());
        }
    }
    return scenario_from_json(j);
}

Scenario load_scenario(const std::string& path_or_name) {
    for (const auto& b : kBuiltins)
        if (path_or_name == b.name) return builtin_scenario(path_or_name);
    std::ifstream in(path_or_name);
    if (!in) throw ParseError("cannot open '" + path_or_name + "' and no built-in scenario has that name");
    std::stringstream buf;
    buf << in.rdbuf();
    auto ends_with = [&](const std::string& suffix) {
        return path_or_name.size() >= suffix.size() &&
               path_or_name.compare(path_or_name.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    return parse_scenario(buf.str(), ends_with(".toml"));
}

json to_json(const Scenario& s) {
    return {{"name", s.name}, {"description", s.description}, {"model", s.model}, {"objects", s.objects}, {"checks", s.checks}};
}

std::vector<std::pair<std::string, std::string>> list_scenarios() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& b : kBuiltins) out.emplace_back(b.name, b.description);
    return out;
}

Scenario builtin_scenario(const std::string& name) {
    for (const auto& b : kBuiltins)
        if (name == b.name) {
            auto j = json::parse(b.body);
            j["name"] = b.name;
            j["description"] = b.description;
            return scenario_from_json(j);
        }
    throw ParseError("no built-in scenario named '" + name + "'");
}

bool ScenarioReport::pass() const { return first_failure().empty(); }

std::string ScenarioReport::first_failure() const {
    for (std::size_t i = 0; i < checks.size(); ++i)
        if (!checks[i].pass) return std::to_string(i) + ":" + checks[i].check;
    return "";
}

json ScenarioReport::verdicts() const {
    json list = json::array();
    for (const auto& c : checks) list.push_back({{"check", c.check}, {"verdict", c.pass ? "pass" : "fail"}, {"detail", c.detail}});
    return {{"scenario", scenario}, {"verdict", pass() ? "pass" : "fail"}, {"checks", list}};
}

json ScenarioReport::timing() const {
    json per = json::array();
    double total = 0;
    for (const auto& c : checks) {
        per.push_back(c.millis);
        total += c.millis;
    }
    return {{"checks_ms", per}, {"total_ms", total}};
}

ScenarioReport run_scenario(const Scenario& s) {
    ScenarioReport rep;
    rep.scenario = s.name;
    Context ctx(s);
    for (const auto& c : s.checks) {
        CheckOutcome out;
        out.check = c.at("check").get<std::string>();
        out.detail = json::object();
        auto start = std::chrono::steady_clock::now();
        try {
            if (out.check == "validate") out.pass = check_validate(ctx, c, out.detail);
            else if (out.check == "predicates") out.pass = check_predicates(ctx, c, out.detail);
            else if (out.check == "tensor") out.pass = check_tensor(ctx, c, out.detail);
            else if (out.check == "expansion") out.pass = check_expansion(ctx, c, out.detail);
            else if (out.check == "vanishing") out.pass = check_vanishing(c, out.detail);
            else if (out.check == "ext") out.pass = check_ext(ctx, c, out.detail);
            else if (out.check == "hmp") out.pass = check_hmp(ctx, c, out.detail);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            out.detail = {{"error", e.what()}};
            auto expected = field<std::string>(c, "expect_error", "");
            out.pass = !expected.empty() && expected == error_kind(e);
        }
        out.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        rep.checks.push_back(std::move(out));
    }
    return rep;
}

int exit_code(const ScenarioReport& r) { return r.pass() ? 0 : 1; }

}  // namespace fjc
