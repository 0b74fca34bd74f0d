#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fjcalc/equivariant_coeffs.hpp"
#include "fjcalc/grid_module.hpp"
#include "fjcalc/strata_poset.hpp"

namespace fjc {

/// Poset plus the per-stratum data the structural objects need.
struct FJModel {
    std::string name;
    StrataPoset poset;
    std::map<std::string, GroupDatum> groups;
    int tangent_dim = 0;  // dimension of the compact dual
    /// Per stratum, the tangent direction attached to each boundary coordinate.
    std::map<std::string, std::vector<int>> branch_direction;

    std::vector<std::string> violations() const;
    const GroupDatum& group(const std::string& y) const;
};
using ModelPtr = std::shared_ptr<const FJModel>;

ModelPtr modular_model();
ModelPtr compact_p1_model();
ModelPtr jacobi_model();
ModelPtr snc_corner_model();
nlohmann::json to_json(const FJModel& m);
ModelPtr model_from_json(const nlohmann::json& j);

struct FJObject;
using ObjectPtr = std::shared_ptr<const FJObject>;

/// How an object was built, as far as the Ext engine needs to know.
struct Recipe {
    enum class Kind { coextend, kernel, direct_sum } kind = Kind::coextend;
    // coextend
    std::string stratum;
    Point degree;
    CoeffObject coeff;
    int bound = 0;
    // kernel: {middle, quotient} of 0 -> this -> middle -> quotient -> 0; direct_sum: summands
    std::vector<ObjectPtr> parts;
};

struct FJObject {
    ModelPtr model;
    std::string label;
    std::map<std::string, GridModule> parts;
    /// mu[{Z, Y}] : F_Y -> lim along beta_{ZY} of F_Z, for Z < Y.
    std::map<std::pair<std::string, std::string>, GridMorphism> mu;
    /// Optional value descriptor per stratum (the stabilized value).
    std::map<std::string, CoeffObject> coeffs;
    /// Optional ambient-subspace presentation: per stratum, a basis per window point.
    std::map<std::string, int> ambient_dim;
    std::map<std::string, std::vector<RationalMatrix>> ambient_basis;
    std::shared_ptr<const Recipe> recipe;

    const GridModule& at(const std::string& y) const;
    bool has_ambient() const { return !ambient_basis.empty(); }
    /// Basis of F_Y(v) inside the ambient space (Kan semantics applied).
    RationalMatrix basis_at(const std::string& y, const Point& v) const;
    bool is_zero() const;
};

struct FJViolation {
    std::string kind;  // "kan" or "gluing"
    std::string detail;
};

std::vector<FJViolation> validate(const FJObject& f);
/// Throws KanViolation or GluingMismatch on the first violation.
void require_valid(const FJObject& f);

struct FJMorphism {
    ObjectPtr source, target;
    std::map<std::string, GridMorphism> parts;

    std::vector<std::string> violations() const;
    bool is_iso() const;
};

FJMorphism fj_identity(const ObjectPtr& f);
FJMorphism fj_zero(const ObjectPtr& f, const ObjectPtr& g);
FJMorphism fj_compose(const FJMorphism& g, const FJMorphism& f);
/// Morphism given degreewise by a matrix function on every stratum.
FJMorphism fj_matrix_morphism(const ObjectPtr& f, const ObjectPtr& g,
                              const std::function<RationalMatrix(const std::string&, const Point&)>& comp);
/// Morphism induced by linear maps between the ambient spaces, one per stratum.
FJMorphism fj_ambient_morphism(const ObjectPtr& f, const ObjectPtr& g, const std::map<std::string, RationalMatrix>& maps);
bool fj_equal(const FJMorphism& a, const FJMorphism& b);

std::vector<FJMorphism> hom_fj(const ObjectPtr& f, const ObjectPtr& g);

struct FJSubQuotient {
    ObjectPtr object;
    FJMorphism canonical;
};
FJSubQuotient fj_sub_quotient(const FJMorphism& phi, SubQuotientKind kind);

/// Object given by subspaces of a fixed ambient space on each stratum; mu is solved between bases.
using BasisFn = std::function<RationalMatrix(const std::string&, const Point&)>;
ObjectPtr from_subspaces(const ModelPtr& model, const std::string& label, const std::map<std::string, int>& ambient,
                         const std::map<std::string, std::pair<Point, Point>>& windows, const BasisFn& basis);

ObjectPtr fj_zero_object(const ModelPtr& model);
ObjectPtr canonical_object(const ModelPtr& model, int dim = 1);
/// Modular weight-k object: value on the open stratum, step at `cusp_bound` on every codim-1 stratum.
ObjectPtr modular_form_object(const ModelPtr& model, int k, int cusp_bound);
/// The value-at-a-single-degree object of the Jacobi model.
ObjectPtr jacobi_object(const ModelPtr& model, int k, int index);

CoeffObject restrict_at_coeff(const FJObject& f, const std::string& y);
int restrict_at(const FJObject& f, const std::string& y, const Point& v);
/// V on degrees N <= w <= v of Y, pulled back to the strata below Y; zero elsewhere.
ObjectPtr coextend(const ModelPtr& model, const std::string& y, const Point& v, const CoeffObject& coeff, int bound);

/// Clips every stratum to degrees >= bound (the composite of the truncation and its extension by zero).
ObjectPtr truncate(const ObjectPtr& f, int bound);
/// The counit: inclusion of the truncation into f.
FJMorphism truncation_counit(const ObjectPtr& f, int bound);
/// The unit f -> coextend(Y, v, F_Y(v)) of the restriction/coextension pair.
FJMorphism coextension_unit(const ObjectPtr& f, const std::string& y, const Point& v, int bound);

ObjectPtr fj_direct_sum(const std::vector<ObjectPtr>& parts, const std::string& label);
ObjectPtr tensor_fj(const ObjectPtr& f, const ObjectPtr& g);

// structural objects
ObjectPtr omega_mvee(const ModelPtr& model);
ObjectPtr omega_bar(const ModelPtr& model, const std::string& y);
ObjectPtr omega_log_prime(const ModelPtr& model);
ObjectPtr omega_prime(const ModelPtr& model);
/// Omega' (x) V for a V of dimension r, ambient ordered as (direction, vector index).
ObjectPtr omega_prime_tensor(const ModelPtr& model, int r);
/// First jets of a dimension-r object; order >= 2 throws UnsupportedJetOrder.
ObjectPtr jet_object(const ModelPtr& model, int r, int order = 1);

struct JetSequence {
    ObjectPtr sub, middle, quotient;
    FJMorphism inclusion, projection, splitting;
    bool exact = false;
    bool split = false;
};
JetSequence jet_sequence(const ModelPtr& model, int r);

struct ResidueResolution {
    std::vector<ObjectPtr> terms;           // omega, then R^0, R^1, ...
    std::vector<FJMorphism> differentials;  // terms[k] -> terms[k+1]
    std::vector<std::vector<std::string>> summands;  // strata of each R^p
    std::size_t degrees_checked = 0;
    bool certified = false;
    ObjectPtr omega;  // omega with its resolution recipe attached
};
/// Throws NotExact naming the stratum, degree and term of the first failure.
ResidueResolution residue_resolution(const ModelPtr& model);
/// Omega with the recipe from the residue resolution.
ObjectPtr omega_object(const ModelPtr& model);

struct ExtResult {
    int lo = 0;
    int hi = 0;
    std::vector<std::string> audit;
    bool exact() const { return lo == hi; }
};
/// dim Ext^i(O, G) via the recipe attached to G. Throws NotComputable.
ExtResult ext_dim(const ObjectPtr& g, int i);

struct ExpansionReport {
    std::string stratum;
    std::vector<Point> support;  // window points with nonzero component space
    bool stable_beyond_window = false;
    std::size_t sections = 0;
    /// Per section, the degrees where its component is nonzero.
    std::vector<std::vector<Point>> section_components;
    bool injective = true;
};
std::vector<FJMorphism> global_sections(const ObjectPtr& f);
ExpansionReport fj_expansion(const ObjectPtr& f, const std::string& y);

nlohmann::json to_json(const FJObject& f);
nlohmann::json to_json(const ExpansionReport& r);

}  // namespace fjc
