#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "fjcalc/rational_linalg.hpp"

namespace fjc {

using Point = std::vector<int>;
/// Injection [j] -> [n] stored 0-based: inj[k] is the image of k.
using Injection = std::vector<int>;

bool leq(const Point& a, const Point& b);
std::string point_key(const Point& v);
Point parse_point_key(const std::string& key, int rank);

/// Enumerates the lattice box [lo, hi] in lexicographic order (last coordinate fastest).
std::vector<Point> box_points(const Point& lo, const Point& hi);

/// Functor Z^n -> Q-Vect stored on a finite window [lo, hi].
///
/// Outside the window the module is read with left Kan extension semantics:
/// zero whenever some v_i < lo_i, otherwise the value at min(v, hi), with
/// identity structure maps in the clamped directions.
class GridModule {
public:
    GridModule();  // the zero module of rank 0
    GridModule(Point lo, Point hi);  // zero values on the window
    static GridModule zero(int rank);

    int rank() const { return static_cast<int>(lo_.size()); }
    const Point& lo() const { return lo_; }
    const Point& hi() const { return hi_; }

    std::size_t window_size() const { return dims_.size(); }
    bool in_window(const Point& v) const;
    std::size_t index(const Point& v) const;
    Point point(std::size_t idx) const;
    std::vector<Point> window_points() const { return box_points(lo_, hi_); }

    /// Sets the dimension at a window point; resets the adjacent maps to zero.
    void set_dim(const Point& v, int d);
    /// Stored map at window point v in direction i (requires v + e_i in the window).
    void set_map(const Point& v, int i, RationalMatrix m);
    const RationalMatrix& stored_map(const Point& v, int i) const;

    /// Value dimension at any v in Z^n (Kan semantics).
    int dim(const Point& v) const;
    /// Structure map M(v) -> M(v + e_i) at any v.
    RationalMatrix step(const Point& v, int i) const;
    /// Composite M(v) -> M(w). Throws NotComparable unless v <= w.
    RationalMatrix eval_map(const Point& v, const Point& w) const;

    /// Commuting-square and shape violations, empty when valid.
    std::vector<std::string> violations() const;
    /// Throws KanViolation listing the first violation.
    void require_valid() const;

    bool is_zero() const;
    /// Returns a copy whose window is enlarged to [lo, hi] (must contain the current one).
    GridModule rewindow(const Point& lo, const Point& hi) const;

private:
    Point lo_, hi_;
    std::vector<int> dims_;
    std::vector<std::vector<RationalMatrix>> maps_;  // [index][direction]
    void reset_maps_at(std::size_t idx);
};

/// Natural transformation stored on the union window of source and target.
struct GridMorphism {
    GridModule source;
    GridModule target;
    Point lo, hi;
    std::vector<RationalMatrix> components;

    static GridMorphism zero(const GridModule& s, const GridModule& t);
    static GridMorphism identity(const GridModule& m);

    /// Component at any v (clamped into the union window, zero below it).
    RationalMatrix component(const Point& v) const;
    void set_component(const Point& v, RationalMatrix m);
    std::vector<std::string> violations() const;
    bool is_natural() const { return violations().empty(); }
    bool is_iso() const;
};

GridMorphism compose(const GridMorphism& g, const GridMorphism& f);  // g after f
GridMorphism add(const GridMorphism& f, const GridMorphism& g);
GridMorphism scale(const Rational& s, const GridMorphism& f);
bool equal_morphisms(const GridMorphism& f, const GridMorphism& g);

int evaluate(const GridModule& m, const Point& v);
RationalMatrix eval_map(const GridModule& m, const Point& v, const Point& w);

enum class SubQuotientKind { kernel, cokernel, image, coimage };

/// Result module together with its canonical map: the inclusion into the
/// source (kernel), into the target (image), or the projection from the
/// target (cokernel) or from the source (coimage).
struct SubQuotient {
    GridModule module;
    GridMorphism canonical;
};

SubQuotient sub_quotient(const GridMorphism& phi, SubQuotientKind kind);

/// Tensor product of torsion-free modules; values are subspaces of lim M (x) lim N.
/// Throws NotTorsionFree.
GridModule tensor(const GridModule& m, const GridModule& n);
/// Basis (columns) of (M (x) N)(v) inside lim M (x) lim N.
RationalMatrix tensor_span(const GridModule& m, const GridModule& n, const Point& v);

/// Stabilizes the coordinates outside im(beta) and reindexes the rest through beta.
GridModule lim_along(const GridModule& m, const Injection& beta);
GridMorphism lim_along(const GridMorphism& f, const Injection& beta);
/// Component M(v) -> (lim_beta M)(v o beta).
RationalMatrix stabilization_map(const GridModule& m, const Injection& beta, const Point& v);
/// The degree that v stabilizes to in M's window for the coordinates outside im(beta).
Point stabilized_point(const GridModule& m, const Injection& beta, const Point& v);

Injection compose_injections(const Injection& outer, const Injection& inner);  // outer o inner
Injection identity_injection(int n);
void require_injection(const Injection& beta, int target_size);

GridModule canonical_extension(int dim, int rank);
/// Value `dim` on the upset v >= start, identity maps.
GridModule step_module(int dim, const Point& start);
/// Value `dim` on the box [a, b], zero elsewhere.
GridModule box_module(int dim, const Point& a, const Point& b);
GridModule direct_sum(const GridModule& a, const GridModule& b);

struct Predicates {
    bool bounded_below = true;
    bool coherent = true;
    bool torsion_free = true;
    bool locally_free = true;
};
Predicates predicates(const GridModule& m);

enum class IsoVerdict { iso, not_iso, undecided };
std::string to_string(IsoVerdict v);
IsoVerdict iso_test(const GridModule& m, const GridModule& n);

/// n = 1 only: interval multiplicities, keyed by (start, end) with end = INT_MAX for [start, inf).
std::vector<std::pair<std::pair<int, int>, int>> barcode(const GridModule& m);

/// Basis of the space of natural transformations M -> N.
std::vector<GridMorphism> hom_space(const GridModule& m, const GridModule& n);
/// Natural transformations computed only over degrees v >= bound (all coordinates).
std::size_t hom_dim_bounded(const GridModule& m, const GridModule& n, int bound);
/// Values in degrees v >= bound (all coordinates), zero elsewhere.
GridModule truncate_below(const GridModule& m, int bound);

/// Shrinks the window where the module is already constant or zero.
GridModule kan_normalize(const GridModule& m);

nlohmann::json to_json(const GridModule& m);
GridModule grid_module_from_json(const nlohmann::json& j);

}  // namespace fjc
