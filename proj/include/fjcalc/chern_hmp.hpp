#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fjcalc/fj_category.hpp"

namespace fjc {

/// Cech cochain on the two-chart cover of the projective line, written in the
/// trivialization of the first chart: a Laurent polynomial in z.
struct LaurentCocycle {
    int twist = 0;  // degree of the line bundle
    std::map<int, Rational> coeffs;  // exponent -> coefficient, no zero entries

    bool is_zero() const { return coeffs.empty(); }
    bool operator==(const LaurentCocycle&) const = default;
};

/// Whether c is f1 - f0 with f0 regular on the first chart and f1 regular on the second.
bool is_coboundary(const LaurentCocycle& c);

struct CechCohomology {
    int dimension = 0;
    std::vector<LaurentCocycle> representatives;  // H^0: global sections, H^1: class representatives
};

/// Cech cohomology of O(k) on the two-chart cover, by exact linear algebra on a
/// truncated Laurent window. Throws DegreeOutOfRange for i outside {0, 1}.
CechCohomology cech_p1(int k, int i);

/// Transition function z^k of O(k) and its logarithmic derivative, as a cocycle of O(-2).
LaurentCocycle transition(int k);
LaurentCocycle multiply(const LaurentCocycle& a, const LaurentCocycle& b);
LaurentCocycle atiyah_cocycle(const LaurentCocycle& transition_fn);
/// Coordinate of an H^1(O(-2)) cocycle in the basis returned by cech_p1(-2, 1).
Rational h1_coordinate(const LaurentCocycle& c);
/// First Chern class by the residue pairing, normalized so that O(1) gives 1.
Rational atiyah_c1(int k);

struct UniversalClass {
    std::string status;  // "split", "defined", "not computable"
    bool sequence_exact = false;
    bool sequence_split = false;
    int ext_lo = 0, ext_hi = 0;
    Rational mvee_coordinate;
    std::optional<Rational> fj_coordinate;
    std::optional<Rational> ratio;  // fj / mvee when both are nonzero
    std::vector<std::string> audit;
};
/// Class of the jet sequence of the twist-k line object. Requires tangent_dim == 1.
/// Throws HypothesisViolated for a non-reductive open group.
UniversalClass universal_class(const ModelPtr& model, int k);

struct ChernReport {
    std::string model;
    bool open_reductive = true;
    bool shortcut = false;
    int degree = 0;  // n
    int dim = 0;
    int lo = 0, hi = 0;
    std::optional<Rational> mvee_chern;  // c_1 of omega on the compact dual
    std::string universal_status;
    std::map<std::string, BoundaryVanishingReport> boundary;
    std::map<std::string, std::vector<int>> boundary_ext;  // stratum -> dims of Ext^i(O, omega_bar), i = 0..n
    std::size_t degrees_checked = 0;
    std::vector<std::string> audit;

    bool exact() const { return lo == hi; }
};
/// One-dimensionality check for Ext^n(O, omega). Throws HypothesisViolated, NotExact.
ChernReport hmp_check(const ModelPtr& model);

nlohmann::json to_json(const LaurentCocycle& c);
nlohmann::json to_json(const UniversalClass& u);
nlohmann::json to_json(const ChernReport& r);

}  // namespace fjc
