#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fjcalc/grid_module.hpp"

namespace fjc {

struct Stratum {
    std::string label;
    int codim = 0;
};

struct PosetViolation {
    std::string kind;
    std::vector<std::string> strata;
    std::string detail;
};

struct PosetReport {
    std::vector<PosetViolation> violations;
    bool ok() const { return violations.empty(); }
};

/// Strata with codimensions and the injections between comparable pairs.
///
/// `set_relation(Z, Y, beta)` declares Z <= Y with beta: [n_Y] -> [n_Z].
/// Identity relations are added automatically.
class StrataPoset {
public:
    void add_stratum(const std::string& label, int codim);
    void set_relation(const std::string& lower, const std::string& upper, Injection beta);

    const std::vector<Stratum>& strata() const { return strata_; }
    bool has(const std::string& label) const;
    int codim(const std::string& label) const;  // throws UnknownStratum
    bool leq(const std::string& z, const std::string& y) const;
    /// beta_{ZY}; throws NotComparable.
    const Injection& beta(const std::string& z, const std::string& y) const;
    /// Missing indices of beta_{ZY} in increasing order.
    Injection complement(const std::string& z, const std::string& y) const;
    /// Strata Z with Z <= Y, in declaration order.
    std::vector<std::string> below(const std::string& y) const;
    std::vector<std::string> of_codim(int c) const;
    /// The unique maximal stratum (codim 0); throws UnknownStratum if absent.
    std::string open_stratum() const;

    PosetReport validate() const;
    StrataPoset restrict_to_closure(const std::string& y) const;

    nlohmann::json to_json() const;
    static StrataPoset from_json(const nlohmann::json& j);

private:
    std::vector<Stratum> strata_;
    std::map<std::pair<std::string, std::string>, Injection> beta_;
    void require(const std::string& label) const;
};

/// Missing indices of `beta` in [n], increasing.
Injection complement_of(const Injection& beta, int n);

StrataPoset modular_poset();
StrataPoset single_stratum_poset();
/// M, two divisors D1 and D2, and their corner C.
StrataPoset snc_corner_poset();

}  // namespace fjc
