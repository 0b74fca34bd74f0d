#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace fjc {

using Weight = std::vector<int>;

/// Weight-graded representation of a split torus of rank `rank`.
struct TorusRep {
    int rank = 0;
    std::map<Weight, int> weights;  // weight -> multiplicity (> 0)

    static TorusRep trivial(int rank);
    static TorusRep line(const Weight& w);
    int dimension() const;
    bool operator==(const TorusRep&) const = default;
};

/// Formal sum of Sym^a (x) det^b, keyed by (a, b).
struct GL2Rep {
    std::map<std::pair<int, int>, int> irreps;

    static GL2Rep trivial();
    static GL2Rep irreducible(int a, int b, int mult = 1);
    int dimension() const;
    bool operator==(const GL2Rep&) const = default;
};

/// GL_2-equivariant line bundle on the projective line, degree k twisted by det^twist.
struct FlagLine {
    int k = 0;
    int twist = 0;
    bool operator==(const FlagLine&) const = default;
};

using CoeffObject = std::variant<TorusRep, GL2Rep, FlagLine>;

std::string kind_name(const CoeffObject& x);
int dimension(const CoeffObject& x);  // rank of the bundle for flag lines

enum class RepOp { tensor, dual, direct_sum };
/// `y` is ignored for dual. Throws ShapeMismatch across kinds or torus ranks.
CoeffObject rep_ops(const CoeffObject& x, const CoeffObject& y, RepOp op);
CoeffObject tensor(const CoeffObject& x, const CoeffObject& y);
CoeffObject dual(const CoeffObject& x);
CoeffObject direct_sum(const CoeffObject& x, const CoeffObject& y);

/// Multiplicity of the trivial character. Flag lines throw UnsupportedCoefficient.
int invariant_multiplicity(const CoeffObject& x);

/// Group morphisms along which characters can be restricted.
struct GroupMorphism {
    enum class Kind { identity, gl2_to_diag_torus, torus_embedding } kind = Kind::identity;
    /// For torus_embedding: r x r' integer matrix of the cocharacter map from the subtorus.
    std::vector<std::vector<int>> embedding;
};

CoeffObject restrict_along(const GroupMorphism& alpha, const CoeffObject& x);

/// Cohomology of O(k) (x) det^twist on the GL_2 flag variety as GL_2-representations.
struct FlagCohomology {
    GL2Rep h0, h1;
};
FlagCohomology bwb_p1(int k, int twist = 0);
/// The cotangent line, normalized so that its H^1 is the trivial representation.
FlagLine cotangent_line();

/// Lambda^i of the dual of an abelian unipotent Lie algebra with the given weights.
TorusRep unipotent_cohomology(int rank, const std::vector<Weight>& weights, int i);

/// (n0, v, u) bookkeeping for a boundary group; weights are for the rank-2 torus S.
struct BoundaryDatum {
    int n0 = 0;
    int v = 0;
    int u = 0;

    int n() const { return n0 + v + u; }
    /// Weights of Lie(V+) (v copies) followed by Lie(R+) (n0 copies).
    std::vector<Weight> quasi_parabolic_weights() const;
    Weight omega_weight() const;
    bool operator==(const BoundaryDatum&) const = default;
};

/// The fixed weight table on the pieces of the boundary Lie algebra.
enum class LiePiece { U, V_plus, V_minus, R_plus, K, R_minus };
Weight s_weight(LiePiece p);
std::string to_string(LiePiece p);

/// Weight-0 multiplicity of Lambda^i((Lie V+ + Lie R+)^*) (x) coeff.
/// The coefficient must be a 1-dimensional rank-2 torus line; throws UnsupportedCoefficient.
int quasi_parabolic_cohomology(const BoundaryDatum& d, const CoeffObject& coeff, int i);

struct BoundaryVanishingReport {
    BoundaryDatum datum;
    bool applicable = true;              // false when u = 0
    std::vector<int> multiplicities;     // index i = 0 .. n0 + v
    int claim_from = 0;                  // n - u
    bool claim_holds = true;
    bool vanishes_all = true;
    Weight top_weight;                   // Lambda^{n0+v} of the dual
    Weight product_weight;               // top_weight + omega_weight
    bool assumes_s_in_k = true;
};
BoundaryVanishingReport boundary_vanishing_check(const BoundaryDatum& d);

/// Weight data of the group attached to a stratum.
struct GroupDatum {
    enum class Shape { torus, gl2, semidirect } shape = Shape::torus;
    int torus_rank = 0;                 // torus shape, or the S-rank for semidirect shapes
    std::string reductive_part;         // descriptive, semidirect only
    std::vector<Weight> unipotent_weights;
    std::vector<Weight> u_lines;        // distinguished normal unipotent directions
    std::optional<BoundaryDatum> boundary;

    bool reductive() const { return shape != Shape::semidirect || unipotent_weights.empty(); }
    /// Empty when valid.
    std::vector<std::string> violations() const;

    static GroupDatum torus(int r);
    static GroupDatum gl2();
    static GroupDatum boundary_group(const BoundaryDatum& d);
};

/// Trivial coefficient for the group: weight 0 torus line, or the trivial flag line for gl2.
CoeffObject unit_coeff(const GroupDatum& g);
/// The canonical coefficient of the stratum (cotangent line, or the omega weight of the boundary datum).
CoeffObject omega_coeff(const GroupDatum& g);

/// dim H^i of the quotient stack with coefficients `coeff`. Throws NotComputable outside supported shapes.
int stack_cohomology(const GroupDatum& g, const CoeffObject& coeff, int i);

nlohmann::json to_json(const CoeffObject& x);
CoeffObject coeff_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GroupDatum& g);
GroupDatum group_datum_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BoundaryVanishingReport& r);

}  // namespace fjc
