#include "fjcalc/strata_poset.hpp"

#include <algorithm>
#include <set>

#include "fjcalc/errors.hpp"

namespace fjc {

namespace {

std::string show(const Injection& b) {
    std::string s = "[";
    for (std::size_t i = 0; i < b.size(); ++i) s += (i ? "," : "") + std::to_string(b[i]);
    return s + "]";
}

bool is_injection_into(const Injection& b, int n) {
    std::set<int> seen;
    for (int x : b)
        if (x < 0 || x >= n || !seen.insert(x).second) return false;
    return true;
}

}  // namespace

Injection complement_of(const Injection& beta, int n) {
    std::vector<bool> hit(static_cast<std::size_t>(n), false);
    for (int x : beta)
        if (x >= 0 && x < n) hit[static_cast<std::size_t>(x)] = true;
    Injection c;
    for (int i = 0; i < n; ++i)
        if (!hit[static_cast<std::size_t>(i)]) c.push_back(i);
    return c;
}

void StrataPoset::add_stratum(const std::string& label, int codim) {
    if (has(label)) throw ParseError("duplicate stratum '" + label + "'");
    if (codim < 0) throw ParseError("negative codimension for '" + label + "'");
    strata_.push_back({label, codim});
    beta_[{label, label}] = identity_injection(codim);
}

void StrataPoset::set_relation(const std::string& lower, const std::string& upper, Injection beta) {
    require(lower);
    require(upper);
    beta_[{lower, upper}] = std::move(beta);
}

bool StrataPoset::has(const std::string& label) const {
    return std::any_of(strata_.begin(), strata_.end(), [&](const Stratum& s) { return s.label == label; });
}

void StrataPoset::require(const std::string& label) const {
    if (!has(label)) throw UnknownStratum("'" + label + "'");
}

int StrataPoset::codim(const std::string& label) const {
    for (const auto& s : strata_)
        if (s.label == label) return s.codim;
    throw UnknownStratum("'" + label + "'");
}

bool StrataPoset::leq(const std::string& z, const std::string& y) const {
    require(z);
    require(y);
    return beta_.count({z, y}) > 0;
}

const Injection& StrataPoset::beta(const std::string& z, const std::string& y) const {
    require(z);
    require(y);
    auto it = beta_.find({z, y});
    if (it == beta_.end()) throw NotComparable("'" + z + "' is not below '" + y + "'");
    return it->second;
}

Injection StrataPoset::complement(const std::string& z, const std::string& y) const {
    return complement_of(beta(z, y), codim(z));
}

std::vector<std::string> StrataPoset::below(const std::string& y) const {
    require(y);
    std::vector<std::string> out;
    for (const auto& s : strata_)
        if (beta_.count({s.label, y})) out.push_back(s.label);
    return out;
}

std::vector<std::string> StrataPoset::of_codim(int c) const {
    std::vector<std::string> out;
    for (const auto& s : strata_)
        if (s.codim == c) out.push_back(s.label);
    return out;
}

std::string StrataPoset::open_stratum() const {
    auto open = of_codim(0);
    if (open.size() != 1) throw UnknownStratum("no unique open stratum");
    return open.front();
}

PosetReport StrataPoset::validate() const {
    PosetReport r;
    auto add = [&](std::string kind, std::vector<std::string> who, std::string detail) {
        r.violations.push_back({std::move(kind), std::move(who), std::move(detail)});
    };
    auto open = of_codim(0);
    if (open.size() != 1) {
        add("maximal_stratum", open, "expected exactly one stratum of codimension 0");
    } else {
        for (const auto& s : strata_)
            if (!beta_.count({s.label, open.front()}))
                add("maximal_stratum", {s.label, open.front()}, "stratum is not below the open stratum");
    }
    bool maps_ok = true;
    for (const auto& [key, b] : beta_) {
        const auto& [z, y] = key;
        int nz = codim(z), ny = codim(y);
        if (static_cast<int>(b.size()) != ny || !is_injection_into(b, nz)) {
            add("injection", {z, y}, "beta " + show(b) + " is not an injection [" + std::to_string(ny) + "] -> [" +
                                         std::to_string(nz) + "]");
            maps_ok = false;
        }
        if (z == y && b != identity_injection(nz)) add("identity", {z}, "beta of a stratum with itself is not the identity");
        if (z != y && beta_.count({y, z})) add("antisymmetry", {z, y}, "distinct strata below each other");
        if (nz < ny) add("codim_monotone", {z, y}, "lower stratum has smaller codimension");
        Injection c = complement_of(b, nz);
        std::vector<int> all(b.begin(), b.end());
        all.insert(all.end(), c.begin(), c.end());
        std::sort(all.begin(), all.end());
        if (maps_ok && all != identity_injection(nz)) add("complement", {z, y}, "complement does not fill [n_Z]");
    }
    if (!maps_ok) return r;
    for (const auto& [k1, b_wz] : beta_)
        for (const auto& [k2, b_zy] : beta_) {
            const auto& [w, z] = k1;
            if (k2.first != z) continue;
            const std::string& y = k2.second;
            auto it = beta_.find({w, y});
            if (it == beta_.end()) {
                add("transitivity", {w, z, y}, "W <= Z <= Y but W is not below Y");
                continue;
            }
            if (compose_injections(b_wz, b_zy) != it->second) {
                add("composition", {w, z, y},
                    "beta_WZ o beta_ZY = " + show(compose_injections(b_wz, b_zy)) + " but beta_WY = " + show(it->second));
                continue;
            }
            Injection perp_wy = complement_of(it->second, codim(w));
            for (int k : complement_of(b_zy, codim(z))) {
                int x = b_wz[static_cast<std::size_t>(k)];
                if (std::find(perp_wy.begin(), perp_wy.end(), x) == perp_wy.end())
                    add("restriction_square", {w, z, y}, "complement index " + std::to_string(k) + " leaves im(beta_WY perp)");
            }
        }
    return r;
}

StrataPoset StrataPoset::restrict_to_closure(const std::string& y) const {
    require(y);
    int ny = codim(y);
    StrataPoset out;
    auto members = below(y);
    for (const auto& z : members) out.add_stratum(z, codim(z) - ny);
    for (const auto& w : members)
        for (const auto& z : members) {
            if (w == z || !beta_.count({w, z})) continue;
            Injection perp_wy = complement(w, y), perp_zy = complement(z, y);
            const Injection& b_wz = beta(w, z);
            Injection restricted;
            for (int k : perp_zy) {
                int x = b_wz[static_cast<std::size_t>(k)];
                auto it = std::find(perp_wy.begin(), perp_wy.end(), x);
                restricted.push_back(it == perp_wy.end() ? -1 : static_cast<int>(it - perp_wy.begin()));
            }
            out.set_relation(w, z, restricted);
        }
    return out;
}

nlohmann::json StrataPoset::to_json() const {
    nlohmann::json j;
    j["strata"] = nlohmann::json::array();
    for (const auto& s : strata_) j["strata"].push_back({{"label", s.label}, {"codim", s.codim}});
    j["relations"] = nlohmann::json::array();
    for (const auto& [key, b] : beta_) {
        if (key.first == key.second) continue;
        Injection one_based = b;
        for (auto& x : one_based) ++x;
        j["relations"].push_back({{"lower", key.first}, {"upper", key.second}, {"beta", one_based}});
    }
    return j;
}

StrataPoset StrataPoset::from_json(const nlohmann::json& j) {
    try {
        StrataPoset p;
        for (const auto& s : j.at("strata")) p.add_stratum(s.at("label").get<std::string>(), s.at("codim").get<int>());
        if (j.contains("relations"))
            for (const auto& rel : j.at("relations")) {
                Injection b = rel.at("beta").get<Injection>();
                for (auto& x : b) --x;
                auto lower = rel.at("lower").get<std::string>(), upper = rel.at("upper").get<std::string>();
                if (!p.has(lower) || !p.has(upper)) throw ParseError("relation names an unknown stratum");
                p.set_relation(lower, upper, b);
            }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("poset: ") + e.what());
    }
}

StrataPoset modular_poset() {
    StrataPoset p;
    p.add_stratum("M", 0);
    p.add_stratum("cusp", 1);
    p.set_relation("cusp", "M", {});
    return p;
}

StrataPoset single_stratum_poset() {
    StrataPoset p;
    p.add_stratum("M", 0);
    return p;
}

StrataPoset snc_corner_poset() {
    StrataPoset p;
    p.add_stratum("M", 0);
    p.add_stratum("D1", 1);
    p.add_stratum("D2", 1);
    p.add_stratum("C", 2);
    p.set_relation("D1", "M", {});
    p.set_relation("D2", "M", {});
    p.set_relation("C", "M", {});
    p.set_relation("C", "D1", {0});
    p.set_relation("C", "D2", {1});
    return p;
}

}  // namespace fjc
