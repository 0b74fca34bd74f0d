#include "fjcalc/fj_category.hpp"

#include <algorithm>
#include <set>

#include "fjcalc/errors.hpp"

namespace fjc {

namespace {

using Key = std::pair<std::string, std::string>;

Point pmin(const Point& a, const Point& b) {
    Point c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::min(a[i], b[i]);
    return c;
}

Point pmax(const Point& a, const Point& b) {
    Point c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::max(a[i], b[i]);
    return c;
}

Point clamp_up(const Point& v, const Point& hi) { return pmin(v, hi); }

Point filled(int rank, int x) { return Point(static_cast<std::size_t>(rank), x); }

/// Degree of the stratum below whose beta-coordinates are w and whose other coordinates are `fill`.
Point lift(const Point& w, const Injection& beta, const Point& fill) {
    Point p = fill;
    for (std::size_t k = 0; k < beta.size(); ++k) p[static_cast<std::size_t>(beta[k])] = w[k];
    return p;
}

Point along(const Point& z, const Injection& beta) {
    Point w;
    for (int b : beta) w.push_back(z[static_cast<std::size_t>(b)]);
    return w;
}

std::vector<Key> strict_pairs(const StrataPoset& p) {
    std::vector<Key> out;
    for (const auto& y : p.strata())
        for (const auto& z : p.below(y.label))
            if (z != y.label) out.push_back({z, y.label});
    return out;
}

std::string pair_name(const Key& k) { return k.first + "<" + k.second; }

bool invertible(const RationalMatrix& m) { return m.rows() == m.cols() && rank(m) == m.rows(); }

/// Window box in Y-coordinates covering F_Y and every lim of F_Z along beta_{ZY}.
std::pair<Point, Point> y_box(const FJObject& f, const std::string& y) {
    const auto& fy = f.at(y);
    Point lo = fy.lo(), hi = fy.hi();
    for (const auto& z : f.model->poset.below(y)) {
        if (z == y) continue;
        const auto& beta = f.model->poset.beta(z, y);
        lo = pmin(lo, along(f.at(z).lo(), beta));
        hi = pmax(hi, along(f.at(z).hi(), beta));
    }
    return {lo, hi};
}

/// The lim of F_Z along beta evaluated at w, as a point of F_Z.
Point lim_point(const GridModule& fz, const Injection& beta, const Point& w) { return lift(w, beta, fz.hi()); }

RationalMatrix section_of(const RationalMatrix& p) {
    auto s = solve_matrix(p, RationalMatrix::identity(p.rows()));
    if (!s) throw DimensionMismatch("projection is not surjective");
    return *s;
}

/// Structure map of an ambient-subspace family from basis `from` to basis `to`.
RationalMatrix family_map(const RationalMatrix& to, const RationalMatrix& from) {
    if (to.cols() == 0 || from.cols() == 0) return RationalMatrix(to.cols(), from.cols());
    auto x = solve_matrix(to, from);
    if (!x) throw KanViolation("subspace family is neither increasing nor vanishing along a step");
    return *x;
}

GridMorphism make_mu(const GridModule& fy, const GridModule& fz, const Injection& beta,
                     const std::function<RationalMatrix(const Point&)>& comp) {
    GridMorphism mu = GridMorphism::zero(fy, lim_along(fz, beta));
    for (const auto& w : box_points(mu.lo, mu.hi)) mu.set_component(w, comp(w));
    return mu;
}

}  // namespace

// --------------------------------------------------------------------- model

const GroupDatum& FJModel::group(const std::string& y) const {
    auto it = groups.find(y);
    if (it == groups.end()) throw UnknownStratum("no group datum for '" + y + "'");
    return it->second;
}

std::vector<std::string> FJModel::violations() const {
    std::vector<std::string> out;
    for (const auto& v : poset.validate().violations) out.push_back("poset " + v.kind + ": " + v.detail);
    for (const auto& s : poset.strata()) {
        auto g = groups.find(s.label);
        if (g == groups.end()) {
            out.push_back("no group datum for '" + s.label + "'");
        } else {
            for (const auto& v : g->second.violations()) out.push_back(s.label + ": " + v);
        }
        auto b = branch_direction.find(s.label);
        if (b == branch_direction.end() || static_cast<int>(b->second.size()) != s.codim) {
            out.push_back("branch directions of '" + s.label + "' do not match its codimension");
            continue;
        }
        std::set<int> seen;
        for (int d : b->second)
            if (d < 0 || d >= tangent_dim || !seen.insert(d).second)
                out.push_back("branch directions of '" + s.label + "' are not distinct tangent directions");
    }
    if (!out.empty()) return out;
    for (const auto& [z, y] : strict_pairs(poset)) {
        const auto& beta = poset.beta(z, y);
        for (std::size_t k = 0; k < beta.size(); ++k)
            if (branch_direction.at(z)[static_cast<std::size_t>(beta[k])] != branch_direction.at(y)[k])
                out.push_back("branch directions disagree along " + z + "<" + y);
    }
    return out;
}

namespace {

ModelPtr finish(FJModel m) {
    auto v = m.violations();
    if (!v.empty()) throw ParseError("model '" + m.name + "': " + v.front());
    return std::make_shared<const FJModel>(std::move(m));
}

}  // namespace

ModelPtr modular_model() {
    FJModel m;
    m.name = "modular_curve";
    m.poset = modular_poset();
    m.groups["M"] = GroupDatum::gl2();
    m.groups["cusp"] = GroupDatum::boundary_group({0, 0, 1});
    m.tangent_dim = 1;
    m.branch_direction["M"] = {};
    m.branch_direction["cusp"] = {0};
    return finish(std::move(m));
}

ModelPtr compact_p1_model() {
    FJModel m;
    m.name = "compact_p1";
    m.poset = single_stratum_poset();
    m.groups["M"] = GroupDatum::gl2();
    m.tangent_dim = 1;
    m.branch_direction["M"] = {};
    return finish(std::move(m));
}

ModelPtr jacobi_model() {
    FJModel m;
    m.name = "jacobi";
    m.poset.add_stratum("M", 0);
    m.poset.add_stratum("Y", 1);
    m.poset.set_relation("Y", "M", {});
    GroupDatum open;
    open.shape = GroupDatum::Shape::semidirect;
    open.torus_rank = 2;
    open.reductive_part = "gl2";
    open.unipotent_weights = {s_weight(LiePiece::U), s_weight(LiePiece::V_plus), s_weight(LiePiece::V_minus)};
    open.u_lines = {s_weight(LiePiece::U)};
    m.groups["M"] = open;
    m.groups["Y"] = GroupDatum::boundary_group({0, 1, 1});
    m.tangent_dim = 3;
    m.branch_direction["M"] = {};
    m.branch_direction["Y"] = {0};
    return finish(std::move(m));
}

ModelPtr snc_corner_model() {
    FJModel m;
    m.name = "snc_corner_toy";
    m.poset = snc_corner_poset();
    m.groups["M"] = GroupDatum::torus(2);
    m.groups["D1"] = GroupDatum::boundary_group({0, 1, 1});
    m.groups["D2"] = GroupDatum::boundary_group({0, 1, 1});
    m.groups["C"] = GroupDatum::boundary_group({0, 0, 2});
    m.tangent_dim = 2;
    m.branch_direction["M"] = {};
    m.branch_direction["D1"] = {0};
    m.branch_direction["D2"] = {1};
    m.branch_direction["C"] = {0, 1};
    return finish(std::move(m));
}

nlohmann::json to_json(const FJModel& m) {
    nlohmann::json j;
    j["name"] = m.name;
    j["poset"] = m.poset.to_json();
    j["tangent_dim"] = m.tangent_dim;
    for (const auto& [y, g] : m.groups) j["groups"][y] = to_json(g);
    for (const auto& [y, b] : m.branch_direction) {
        std::vector<int> one_based = b;
        for (auto& x : one_based) ++x;
        j["branch_direction"][y] = one_based;
    }
    return j;
}

ModelPtr model_from_json(const nlohmann::json& j) {
    try {
        FJModel m;
        m.name = j.value("name", std::string("custom"));
        m.poset = StrataPoset::from_json(j.at("poset"));
        m.tangent_dim = j.at("tangent_dim").get<int>();
        for (const auto& s : m.poset.strata()) {
            m.groups[s.label] = group_datum_from_json(j.at("groups").at(s.label));
            std::vector<int> b;
            if (j.contains("branch_direction") && j["branch_direction"].contains(s.label))
                b = j["branch_direction"][s.label].get<std::vector<int>>();
            for (auto& x : b) --x;
            m.branch_direction[s.label] = b;
        }
        return finish(std::move(m));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model: ") + e.what());
    }
}

// -------------------------------------------------------------------- object

const GridModule& FJObject::at(const std::string& y) const {
    auto it = parts.find(y);
    if (it == parts.end()) throw UnknownStratum("'" + y + "' in object '" + label + "'");
    return it->second;
}

RationalMatrix FJObject::basis_at(const std::string& y, const Point& v) const {
    const auto& m = at(y);
    auto a = static_cast<std::size_t>(ambient_dim.at(y));
    if (!leq(m.lo(), v)) return RationalMatrix(a, 0);
    return ambient_basis.at(y)[m.index(clamp_up(v, m.hi()))];
}

bool FJObject::is_zero() const {
    return std::all_of(parts.begin(), parts.end(), [](const auto& kv) { return kv.second.is_zero(); });
}

std::vector<FJViolation> validate(const FJObject& f) {
    std::vector<FJViolation> out;
    const auto& poset = f.model->poset;
    for (const auto& s : poset.strata()) {
        auto it = f.parts.find(s.label);
        if (it == f.parts.end()) {
            out.push_back({"kan", "missing functor for stratum '" + s.label + "'"});
            continue;
        }
        if (it->second.rank() != s.codim) out.push_back({"kan", "functor on '" + s.label + "' has the wrong rank"});
        for (const auto& v : it->second.violations()) out.push_back({"kan", s.label + ": " + v});
    }
    if (!out.empty()) return out;
    for (const auto& key : strict_pairs(poset)) {
        const auto& [z, y] = key;
        auto it = f.mu.find(key);
        if (it == f.mu.end()) {
            out.push_back({"gluing", "missing gluing map for " + pair_name(key)});
            continue;
        }
        const auto& mu = it->second;
        const auto& beta = poset.beta(z, y);
        const auto& fy = f.at(y);
        const auto& fz = f.at(z);
        auto [lo, hi] = y_box(f, y);
        bool shapes_ok = true;
        for (const auto& w : box_points(lo, hi)) {
            auto c = mu.component(w);
            auto rows = static_cast<std::size_t>(fz.dim(lim_point(fz, beta, w)));
            if (c.rows() != rows || c.cols() != static_cast<std::size_t>(fy.dim(w))) {
                out.push_back({"gluing", pair_name(key) + " has the wrong shape at " + point_key(w)});
                shapes_ok = false;
                break;
            }
            if (!invertible(c)) out.push_back({"gluing", pair_name(key) + " is not invertible at " + point_key(w)});
        }
        if (!shapes_ok) continue;
        for (const auto& w : box_points(lo, hi))
            for (int k = 0; k < fy.rank(); ++k) {
                Point wk = w;
                ++wk[static_cast<std::size_t>(k)];
                auto lhs = mu.component(wk) * fy.step(w, k);
                auto rhs = fz.step(lim_point(fz, beta, w), beta[static_cast<std::size_t>(k)]) * mu.component(w);
                if (!(lhs == rhs))
                    out.push_back({"gluing", pair_name(key) + " is not natural at " + point_key(w) + " direction " +
                                                 std::to_string(k)});
            }
    }
    if (!out.empty()) return out;
    for (const auto& [z, y] : strict_pairs(poset))
        for (const auto& w : poset.below(z)) {
            if (w == z) continue;
            const auto& mu_zy = f.mu.at({z, y});
            const auto& mu_wz = f.mu.at({w, z});
            const auto& mu_wy = f.mu.at({w, y});
            const auto& beta_zy = poset.beta(z, y);
            auto [lo, hi] = y_box(f, y);
            for (const auto& p : box_points(lo, hi)) {
                Point u = lift(p, beta_zy, pmax(mu_wz.hi, f.at(z).hi()));
                if (!(mu_wz.component(u) * mu_zy.component(p) == mu_wy.component(p)))
                    out.push_back({"gluing", "cocycle fails for " + w + "<" + z + "<" + y + " at " + point_key(p)});
            }
        }
    return out;
}

void require_valid(const FJObject& f) {
    auto v = validate(f);
    if (v.empty()) return;
    if (v.front().kind == "kan") throw KanViolation(f.label + ": " + v.front().detail);
    throw GluingMismatch(f.label + ": " + v.front().detail);
}

// ------------------------------------------------------------------ morphisms

std::vector<std::string> FJMorphism::violations() const {
    std::vector<std::string> out;
    const auto& poset = source->model->poset;
    for (const auto& s : poset.strata()) {
        auto it = parts.find(s.label);
        if (it == parts.end()) {
            out.push_back("missing component on '" + s.label + "'");
            continue;
        }
        const auto& f = it->second;
        const auto& a = source->at(s.label);
        const auto& b = target->at(s.label);
        for (const auto& v : box_points(pmin(a.lo(), b.lo()), pmax(a.hi(), b.hi()))) {
            auto c = f.component(v);
            if (c.rows() != static_cast<std::size_t>(b.dim(v)) || c.cols() != static_cast<std::size_t>(a.dim(v))) {
                out.push_back(s.label + ": component shape at " + point_key(v));
                break;
            }
        }
        for (const auto& v : f.violations()) out.push_back(s.label + ": " + v);
    }
    if (!out.empty()) return out;
    for (const auto& key : strict_pairs(poset)) {
        const auto& [z, y] = key;
        const auto& beta = poset.beta(z, y);
        const auto& fz = parts.at(z);
        const auto& fy = parts.at(y);
        auto [lo1, hi1] = y_box(*source, y);
        auto [lo2, hi2] = y_box(*target, y);
        Point fill = pmax(fz.hi, pmax(source->at(z).hi(), target->at(z).hi()));
        for (const auto& w : box_points(pmin(lo1, lo2), pmax(hi1, hi2))) {
            auto lhs = fz.component(lift(w, beta, fill)) * source->mu.at(key).component(w);
            auto rhs = target->mu.at(key).component(w) * fy.component(w);
            if (!(lhs == rhs)) out.push_back("not compatible with gluing along " + pair_name(key) + " at " + point_key(w));
        }
    }
    return out;
}

bool FJMorphism::is_iso() const {
    return std::all_of(parts.begin(), parts.end(), [](const auto& kv) { return kv.second.is_iso(); });
}

FJMorphism fj_matrix_morphism(const ObjectPtr& f, const ObjectPtr& g,
                              const std::function<RationalMatrix(const std::string&, const Point&)>& comp) {
    FJMorphism m{f, g, {}};
    for (const auto& s : f->model->poset.strata()) {
        GridMorphism part = GridMorphism::zero(f->at(s.label), g->at(s.label));
        for (const auto& v : box_points(part.lo, part.hi)) part.set_component(v, comp(s.label, v));
        m.parts.emplace(s.label, std::move(part));
    }
    return m;
}

FJMorphism fj_identity(const ObjectPtr& f) {
    return fj_matrix_morphism(f, f, [&](const std::string& y, const Point& v) {
        return RationalMatrix::identity(static_cast<std::size_t>(f->at(y).dim(v)));
    });
}

FJMorphism fj_zero(const ObjectPtr& f, const ObjectPtr& g) {
    return fj_matrix_morphism(f, g, [&](const std::string& y, const Point& v) {
        return RationalMatrix(static_cast<std::size_t>(g->at(y).dim(v)), static_cast<std::size_t>(f->at(y).dim(v)));
    });
}

FJMorphism fj_compose(const FJMorphism& g, const FJMorphism& f) {
    FJMorphism h{f.source, g.target, {}};
    for (const auto& [y, part] : f.parts) h.parts.emplace(y, compose(g.parts.at(y), part));
    return h;
}

FJMorphism fj_ambient_morphism(const ObjectPtr& f, const ObjectPtr& g, const std::map<std::string, RationalMatrix>& maps) {
    if (!f->has_ambient() || !g->has_ambient()) throw DimensionMismatch("ambient morphism needs ambient presentations");
    return fj_matrix_morphism(f, g, [&](const std::string& y, const Point& v) {
        auto image = maps.at(y) * f->basis_at(y, v);
        auto tb = g->basis_at(y, v);
        if (image.cols() == 0 || tb.cols() == 0) return RationalMatrix(tb.cols(), image.cols());
        auto x = solve_matrix(tb, image);
        if (!x) throw DimensionMismatch("ambient map does not respect the subspaces at " + point_key(v));
        return *x;
    });
}

bool fj_equal(const FJMorphism& a, const FJMorphism& b) {
    for (const auto& [y, part] : a.parts)
        if (!equal_morphisms(part, b.parts.at(y))) return false;
    return true;
}

std::vector<FJMorphism> hom_fj(const ObjectPtr& f, const ObjectPtr& g) {
    const auto& poset = f->model->poset;
    BlockSystem sys;
    std::map<std::string, GridMorphism> shapes;
    std::map<std::string, std::size_t> first_block;
    for (const auto& s : poset.strata()) {
        GridMorphism shape = GridMorphism::zero(f->at(s.label), g->at(s.label));
        first_block[s.label] = sys.block_count();
        for (const auto& v : box_points(shape.lo, shape.hi))
            sys.add_block(static_cast<std::size_t>(g->at(s.label).dim(v)), static_cast<std::size_t>(f->at(s.label).dim(v)));
        shapes.emplace(s.label, std::move(shape));
    }
    auto block_of = [&](const std::string& y, const Point& v) -> std::optional<std::size_t> {
        const auto& sh = shapes.at(y);
        if (!leq(sh.lo, v)) return std::nullopt;
        Point c = clamp_up(v, sh.hi);
        std::size_t idx = 0;
        for (std::size_t i = 0; i < c.size(); ++i)
            idx = idx * static_cast<std::size_t>(sh.hi[i] - sh.lo[i] + 1) + static_cast<std::size_t>(c[i] - sh.lo[i]);
        return first_block.at(y) + idx;
    };
    auto add = [&](std::vector<BlockSystem::Term> terms, std::size_t rows, std::size_t cols) {
        if (rows == 0 || cols == 0 || terms.empty()) return;
        sys.add_equation(terms);
    };
    for (const auto& s : poset.strata()) {
        const auto& a = f->at(s.label);
        const auto& b = g->at(s.label);
        const auto& sh = shapes.at(s.label);
        for (const auto& v : box_points(sh.lo, sh.hi))
            for (int i = 0; i < a.rank(); ++i) {
                Point w = v;
                ++w[static_cast<std::size_t>(i)];
                if (w[static_cast<std::size_t>(i)] > sh.hi[static_cast<std::size_t>(i)]) continue;
                auto dav = static_cast<std::size_t>(a.dim(v));
                auto dbw = static_cast<std::size_t>(b.dim(w));
                add({{b.step(v, i), *block_of(s.label, v), RationalMatrix::identity(dav)},
                     {Rational(-1) * RationalMatrix::identity(dbw), *block_of(s.label, w), a.step(v, i)}},
                    dbw, dav);
            }
    }
    for (const auto& key : strict_pairs(poset)) {
        const auto& [z, y] = key;
        const auto& beta = poset.beta(z, y);
        auto [lo1, hi1] = y_box(*f, y);
        auto [lo2, hi2] = y_box(*g, y);
        Point fill = shapes.at(z).hi;
        for (const auto& w : box_points(pmin(lo1, lo2), pmax(hi1, hi2))) {
            Point p = lift(w, beta, fill);
            auto mf = f->mu.at(key).component(w);
            auto mg = g->mu.at(key).component(w);
            std::vector<BlockSystem::Term> terms;
            if (auto bz = block_of(z, p)) terms.push_back({RationalMatrix::identity(mg.rows()), *bz, mf});
            if (auto by = block_of(y, w))
                terms.push_back({Rational(-1) * mg, *by, RationalMatrix::identity(mf.cols())});
            add(terms, mg.rows(), mf.cols());
        }
    }
    std::vector<FJMorphism> out;
    for (const auto& sol : sys.solution_basis()) {
        FJMorphism m{f, g, {}};
        for (const auto& s : poset.strata()) {
            GridMorphism part = shapes.at(s.label);
            auto first = first_block.at(s.label);
            for (std::size_t k = 0; k < part.components.size(); ++k) part.components[k] = sol[first + k];
            m.parts.emplace(s.label, std::move(part));
        }
        out.push_back(std::move(m));
    }
    return out;
}

FJSubQuotient fj_sub_quotient(const FJMorphism& phi, SubQuotientKind kind) {
    const bool sub = kind == SubQuotientKind::kernel || kind == SubQuotientKind::image;
    const ObjectPtr& ambient = (kind == SubQuotientKind::kernel || kind == SubQuotientKind::coimage) ? phi.source : phi.target;
    const auto& poset = ambient->model->poset;
    auto res = std::make_shared<FJObject>();
    res->model = ambient->model;
    static const char* names[] = {"ker", "coker", "im", "coim"};
    res->label = std::string(names[static_cast<int>(kind)]) + "(" + phi.source->label + " -> " + phi.target->label + ")";
    std::map<std::string, GridMorphism> canon;
    for (const auto& s : poset.strata()) {
        auto sq = sub_quotient(phi.parts.at(s.label), kind);
        res->parts.emplace(s.label, sq.module);
        canon.emplace(s.label, sq.canonical);
    }
    for (const auto& key : strict_pairs(poset)) {
        const auto& [z, y] = key;
        const auto& beta = poset.beta(z, y);
        const auto& cz = canon.at(z);
        const auto& cy = canon.at(y);
        const auto& mu_a = ambient->mu.at(key);
        Point fill = pmax(cz.hi, ambient->at(z).hi());
        res->mu.emplace(key, make_mu(res->at(y), res->at(z), beta, [&](const Point& w) {
            Point p = lift(w, beta, fill);
            if (sub) {
                auto target_basis = cz.component(p);
                auto image = mu_a.component(w) * cy.component(w);
                if (target_basis.cols() == 0 || image.cols() == 0) return RationalMatrix(target_basis.cols(), image.cols());
                auto x = solve_matrix(target_basis, image);
                if (!x) throw GluingMismatch("induced gluing does not preserve the subobject");
                return *x;
            }
            auto py = cy.component(w);
            return cz.component(p) * mu_a.component(w) * section_of(py);
        }));
    }
    if (sub && ambient->has_ambient()) {
        res->ambient_dim = ambient->ambient_dim;
        for (const auto& s : poset.strata()) {
            const auto& m = res->at(s.label);
            std::vector<RationalMatrix> bases;
            for (const auto& v : m.window_points()) bases.push_back(ambient->basis_at(s.label, v) * canon.at(s.label).component(v));
            res->ambient_basis[s.label] = std::move(bases);
        }
    }
    ObjectPtr obj = res;
    FJMorphism c{sub ? obj : ambient, sub ? ambient : obj, {}};
    c.parts = canon;
    for (auto& [y, part] : c.parts) {
        part.source = c.source->at(y);
        part.target = c.target->at(y);
    }
    return {obj, c};
}

// ---------------------------------------------------------------- builders

ObjectPtr from_subspaces(const ModelPtr& model, const std::string& label, const std::map<std::string, int>& ambient,
                         const std::map<std::string, std::pair<Point, Point>>& windows, const BasisFn& basis) {
    auto f = std::make_shared<FJObject>();
    f->model = model;
    f->label = label;
    const auto& poset = model->poset;
    for (const auto& s : poset.strata()) {
        auto a = ambient.at(s.label);
        auto win = windows.count(s.label) ? windows.at(s.label) : std::make_pair(filled(s.codim, 0), filled(s.codim, 0));
        GridModule m(win.first, win.second);
        std::vector<RationalMatrix> bases;
        for (const auto& v : m.window_points()) {
            auto b = basis(s.label, v);
            if (b.rows() != static_cast<std::size_t>(a)) throw DimensionMismatch("basis outside the ambient space");
            if (rank(b) != b.cols()) throw DimensionMismatch("basis columns are dependent at " + point_key(v));
            m.set_dim(v, static_cast<int>(b.cols()));
            bases.push_back(std::move(b));
        }
        for (const auto& v : m.window_points())
            for (int i = 0; i < m.rank(); ++i) {
                Point w = v;
                ++w[static_cast<std::size_t>(i)];
                if (m.in_window(w)) m.set_map(v, i, family_map(bases[m.index(w)], bases[m.index(v)]));
            }
        f->parts.emplace(s.label, std::move(m));
        f->ambient_dim[s.label] = a;
        f->ambient_basis[s.label] = std::move(bases);
    }
    for (const auto& key : strict_pairs(poset)) {
        const auto& [z, y] = key;
        const auto& beta = poset.beta(z, y);
        const auto& fz = f->at(z);
        f->mu.emplace(key, make_mu(f->at(y), fz, beta, [&](const Point& w) {
            auto by = f->basis_at(y, w);
            auto bz = f->basis_at(z, lim_point(fz, beta, w));
            if (by.cols() == 0 || bz.cols() == 0) return RationalMatrix(bz.cols(), by.cols());
            auto x = solve_matrix(bz, by);
            if (!x) throw GluingMismatch(label + ": subspaces on " + y + " and " + z + " differ at " + point_key(w));
            return *x;
        }));
    }
    require_valid(*f);
    return f;
}

namespace {

std::map<std::string, int> uniform(const ModelPtr& model, int a) {
    std::map<std::string, int> out;
    for (const auto& s : model->poset.strata()) out[s.label] = a;
    return out;
}

RationalMatrix columns_of(std::size_t ambient, const std::vector<std::size_t>& idx) {
    RationalMatrix m(ambient, idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) m(idx[j], j) = 1;
    return m;
}

/// Tangent directions that stay in Omega' at degree v (v >= 0).
std::vector<int> allowed_directions(const FJModel& model, const std::string& y, const Point& v) {
    const auto& tau = model.branch_direction.at(y);
    std::vector<int> out;
    for (int d = 0; d < model.tangent_dim; ++d) {
        bool excluded = false;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] == 0 && tau[i] == d) excluded = true;
        if (!excluded) out.push_back(d);
    }
    return out;
}

std::map<std::string, std::pair<Point, Point>> unit_windows(const ModelPtr& model) {
    std::map<std::string, std::pair<Point, Point>> w;
    for (const auto& s : model->poset.strata()) w[s.label] = {filled(s.codim, 0), filled(s.codim, 1)};
    return w;
}

std::shared_ptr<FJObject> mutable_copy(const ObjectPtr& f) { return std::make_shared<FJObject>(*f); }

}  // namespace

ObjectPtr fj_zero_object(const ModelPtr& model) {
    return from_subspaces(model, "0", uniform(model, 0), {}, [](const std::string&, const Point&) { return RationalMatrix(0, 0); });
}

ObjectPtr canonical_object(const ModelPtr& model, int dim) {
    auto d = static_cast<std::size_t>(dim);
    auto f = mutable_copy(from_subspaces(model, dim == 1 ? "O" : "O^" + std::to_string(dim), uniform(model, dim), {},
                                         [&](const std::string&, const Point& v) {
                                             return leq(filled(static_cast<int>(v.size()), 0), v) ? RationalMatrix::identity(d)
                                                                                                  : RationalMatrix(d, 0);
                                         }));
    if (dim == 1)
        for (const auto& s : model->poset.strata()) f->coeffs.emplace(s.label, unit_coeff(model->group(s.label)));
    return f;
}

ObjectPtr modular_form_object(const ModelPtr& model, int k, int cusp_bound) {
    std::map<std::string, std::pair<Point, Point>> win;
    for (const auto& s : model->poset.strata()) win[s.label] = {filled(s.codim, cusp_bound), filled(s.codim, cusp_bound)};
    auto f = mutable_copy(from_subspaces(model, "modular_form(k=" + std::to_string(k) + ")", uniform(model, 1), win,
                                         [&](const std::string&, const Point& v) {
                                             return leq(filled(static_cast<int>(v.size()), cusp_bound), v)
                                                        ? RationalMatrix::identity(1)
                                                        : RationalMatrix(1, 0);
                                         }));
    f->coeffs.emplace(model->poset.open_stratum(), FlagLine{k, 0});
    return f;
}

ObjectPtr jacobi_object(const ModelPtr& model, int k, int index) {
    std::map<std::string, std::pair<Point, Point>> win;
    for (const auto& s : model->poset.strata())
        if (s.codim > 0) win[s.label] = {filled(s.codim, index), filled(s.codim, index + 1)};
    auto f = mutable_copy(from_subspaces(model, "jacobi(k=" + std::to_string(k) + ",i=" + std::to_string(index) + ")",
                                         uniform(model, 1), win, [&](const std::string&, const Point& v) {
                                             bool at = !v.empty() && v == filled(static_cast<int>(v.size()), index);
                                             return at ? RationalMatrix::identity(1) : RationalMatrix(1, 0);
                                         }));
    for (const auto& s : model->poset.strata())
        if (s.codim > 0) f->coeffs.emplace(s.label, FlagLine{k, 0});
    return f;
}

CoeffObject restrict_at_coeff(const FJObject& f, const std::string& y) {
    auto it = f.coeffs.find(y);
    if (it == f.coeffs.end()) throw NotComputable("no coefficient descriptor on '" + y + "' for '" + f.label + "'");
    return it->second;
}

int restrict_at(const FJObject& f, const std::string& y, const Point& v) { return f.at(y).dim(v); }

ObjectPtr coextend(const ModelPtr& model, const std::string& y, const Point& v, const CoeffObject& coeff, int bound) {
    const auto& poset = model->poset;
    if (!poset.has(y)) throw UnknownStratum("'" + y + "'");
    if (static_cast<int>(v.size()) != poset.codim(y)) throw DimensionMismatch("degree has the wrong rank for '" + y + "'");
    auto d = static_cast<std::size_t>(dimension(coeff));
    auto members = poset.below(y);
    std::map<std::string, std::pair<Point, Point>> win;
    for (const auto& z : members) {
        const auto& beta = poset.beta(z, y);
        Point lo = filled(poset.codim(z), bound), hi = lo;
        for (std::size_t k = 0; k < beta.size(); ++k) hi[static_cast<std::size_t>(beta[k])] = std::max(bound, v[k] + 1);
        win[z] = {lo, hi};
    }
    auto f = mutable_copy(from_subspaces(model, "coextend(" + y + "," + point_key(v) + ")", uniform(model, static_cast<int>(d)),
                                         win, [&](const std::string& z, const Point& p) {
                                             bool in = std::find(members.begin(), members.end(), z) != members.end() &&
                                                       leq(filled(static_cast<int>(p.size()), bound), p) &&
                                                       leq(along(p, poset.beta(z, y)), v);
                                             return in ? RationalMatrix::identity(d) : RationalMatrix(d, 0);
                                         }));
    for (const auto& z : members) f->coeffs.emplace(z, coeff);
    auto r = std::make_shared<Recipe>();
    r->kind = Recipe::Kind::coextend;
    r->stratum = y;
    r->degree = v;
    r->coeff = coeff;
    r->bound = bound;
    f->recipe = r;
    return f;
}

ObjectPtr truncate(const ObjectPtr& f, int bound) {
    auto t = std::make_shared<FJObject>();
    t->model = f->model;
    t->label = "trunc" + std::to_string(bound) + "(" + f->label + ")";
    t->coeffs = f->coeffs;
    const auto& poset = f->model->poset;
    for (const auto& s : poset.strata()) t->parts.emplace(s.label, truncate_below(f->at(s.label), bound));
    for (const auto& key : strict_pairs(poset)) {
        const auto& [z, y] = key;
        const auto& beta = poset.beta(z, y);
        const auto& old = f->mu.at(key);
        t->mu.emplace(key, make_mu(t->at(y), t->at(z), beta, [&](const Point& w) {
            if (leq(filled(static_cast<int>(w.size()), bound), w)) return old.component(w);
            return RationalMatrix(static_cast<std::size_t>(t->at(z).dim(lim_point(t->at(z), beta, w))),
                                  static_cast<std::size_t>(t->at(y).dim(w)));
        }));
    }
    if (f->has_ambient()) {
        t->ambient_dim = f->ambient_dim;
        for (const auto& s : poset.strata()) {
            std::vector<RationalMatrix> bases;
            for (const auto& v : t->at(s.label).window_points()) bases.push_back(f->basis_at(s.label, v));
            t->ambient_basis[s.label] = std::move(bases);
        }
    }
    return t;
}

FJMorphism truncation_counit(const ObjectPtr& f, int bound) {
    auto t = truncate(f, bound);
    return fj_matrix_morphism(t, f, [&](const std::string& y, const Point& v) {
        auto ds = static_cast<std::size_t>(t->at(y).dim(v));
        auto dt = static_cast<std::size_t>(f->at(y).dim(v));
        return ds > 0 ? RationalMatrix::identity(ds) : RationalMatrix(dt, 0);
    });
}

FJMorphism coextension_unit(const ObjectPtr& f, const std::string& y, const Point& v, int bound) {
    const auto& poset = f->model->poset;
    int d = f->at(y).dim(v);
    TorusRep plain;
    if (d > 0) plain.weights[{}] = d;
    CoeffObject coeff = plain;
    if (auto it = f->coeffs.find(y); it != f->coeffs.end() && dimension(it->second) == d) coeff = it->second;
    auto g = coextend(f->model, y, v, coeff, bound);
    return fj_matrix_morphism(f, g, [&](const std::string& z, const Point& p) {
        auto rows = static_cast<std::size_t>(g->at(z).dim(p));
        auto cols = static_cast<std::size_t>(f->at(z).dim(p));
        if (rows == 0 || cols == 0) return RationalMatrix(rows, cols);
        const auto& fy = f->at(y);
        if (z == y) return fy.eval_map(p, v);
        const auto& beta = poset.beta(z, y);
        Point w = along(p, beta);
        const auto& fz = f->at(z);
        auto inv = inverse(f->mu.at({z, y}).component(w));
        if (!inv) throw GluingMismatch("gluing map not invertible");
        return fy.eval_map(w, v) * *inv * stabilization_map(fz, beta, p);
    });
}

ObjectPtr fj_direct_sum(const std::vector<ObjectPtr>& parts, const std::string& label) {
    if (parts.empty()) throw DimensionMismatch("direct sum of no objects");
    const auto& model = parts.front()->model;
    const auto& poset = model->poset;
    auto f = std::make_shared<FJObject>();
    f->model = model;
    f->label = label;
    for (const auto& s : poset.strata()) {
        GridModule m = parts.front()->at(s.label);
        for (std::size_t i = 1; i < parts.size(); ++i) m = direct_sum(m, parts[i]->at(s.label));
        f->parts.emplace(s.label, std::move(m));
    }
    for (const auto& key : strict_pairs(poset)) {
        const auto& beta = poset.beta(key.first, key.second);
        f->mu.emplace(key, make_mu(f->at(key.second), f->at(key.first), beta, [&](const Point& w) {
            RationalMatrix acc(0, 0);
            for (const auto& p : parts) acc = block_diag(acc, p->mu.at(key).component(w));
            return acc;
        }));
    }
    bool ambient = std::all_of(parts.begin(), parts.end(), [](const ObjectPtr& p) { return p->has_ambient(); });
    if (ambient)
        for (const auto& s : poset.strata()) {
            int a = 0;
            for (const auto& p : parts) a += p->ambient_dim.at(s.label);
            f->ambient_dim[s.label] = a;
            std::vector<RationalMatrix> bases;
            for (const auto& v : f->at(s.label).window_points()) {
                RationalMatrix acc(0, 0);
                for (const auto& p : parts) acc = block_diag(acc, p->basis_at(s.label, v));
                bases.push_back(std::move(acc));
            }
            f->ambient_basis[s.label] = std::move(bases);
        }
    for (const auto& s : poset.strata()) {
        try {
            std::optional<CoeffObject> c;
            for (const auto& p : parts) {
                auto x = restrict_at_coeff(*p, s.label);
                c = c ? direct_sum(*c, x) : x;
            }
            if (c) f->coeffs.emplace(s.label, *c);
        } catch (const Error&) {
            // descriptors are optional
        }
    }
    auto r = std::make_shared<Recipe>();
    r->kind = Recipe::Kind::direct_sum;
    r->parts = parts;
    f->recipe = r;
    require_valid(*f);
    return f;
}

ObjectPtr tensor_fj(const ObjectPtr& f, const ObjectPtr& g) {
    const auto& poset = f->model->poset;
    auto t = std::make_shared<FJObject>();
    t->model = f->model;
    t->label = "(" + f->label + " x " + g->label + ")";
    for (const auto& s : poset.strata()) t->parts.emplace(s.label, tensor(f->at(s.label), g->at(s.label)));
    auto span = [&](const std::string& y, const Point& w) {
        const auto& m = t->at(y);
        if (!leq(m.lo(), w)) {
            auto a = static_cast<std::size_t>(f->at(y).dim(f->at(y).hi()) * g->at(y).dim(g->at(y).hi()));
            return RationalMatrix(a, 0);
        }
        return tensor_span(f->at(y), g->at(y), clamp_up(w, m.hi()));
    };
    for (const auto& key : strict_pairs(poset)) {
        const auto& [z, y] = key;
        const auto& beta = poset.beta(z, y);
        const auto& mf = f->mu.at(key);
        const auto& mg = g->mu.at(key);
        auto ident = kron(mf.component(mf.hi), mg.component(mg.hi));
        t->mu.emplace(key, make_mu(t->at(y), t->at(z), beta, [&](const Point& w) {
            auto by = span(y, w);
            auto bz = span(z, lim_point(t->at(z), beta, w));
            if (by.cols() == 0 || bz.cols() == 0) return RationalMatrix(bz.cols(), by.cols());
            auto x = solve_matrix(bz, ident * by);
            if (!x) throw GluingMismatch("tensor gluing does not preserve the subspace sums");
            return *x;
        }));
    }
    for (const auto& s : poset.strata()) {
        auto a = f->coeffs.find(s.label), b = g->coeffs.find(s.label);
        if (a != f->coeffs.end() && b != g->coeffs.end()) {
            try {
                t->coeffs.emplace(s.label, tensor(a->second, b->second));
            } catch (const Error&) {
                // incompatible descriptors are dropped
            }
        }
    }
    require_valid(*t);
    return t;
}

// ------------------------------------------------------- structural objects

ObjectPtr omega_mvee(const ModelPtr& model) {
    auto open = model->poset.open_stratum();
    auto f = mutable_copy(coextend(model, open, {}, omega_coeff(model->group(open)), 0));
    f->label = "omega_mvee";
    return f;
}

ObjectPtr omega_bar(const ModelPtr& model, const std::string& y) {
    auto f = mutable_copy(coextend(model, y, filled(model->poset.codim(y), 0), omega_coeff(model->group(y)), 0));
    f->label = "omega_bar(" + y + ")";
    return f;
}

ObjectPtr omega_log_prime(const ModelPtr& model) {
    auto f = mutable_copy(canonical_object(model, model->tangent_dim));
    f->label = "omega_log_prime";
    return f;
}

ObjectPtr omega_prime(const ModelPtr& model) { return omega_prime_tensor(model, 1); }

ObjectPtr omega_prime_tensor(const ModelPtr& model, int r) {
    const int n = model->tangent_dim;
    auto amb = static_cast<std::size_t>(n * r);
    return from_subspaces(model, r == 1 ? "omega_prime" : "omega_prime_x" + std::to_string(r), uniform(model, n * r),
                          unit_windows(model), [&](const std::string& y, const Point& v) {
                              std::vector<std::size_t> idx;
                              if (leq(filled(static_cast<int>(v.size()), 0), v))
                                  for (int d : allowed_directions(*model, y, v))
                                      for (int k = 0; k < r; ++k) idx.push_back(static_cast<std::size_t>(d * r + k));
                              return columns_of(amb, idx);
                          });
}

ObjectPtr jet_object(const ModelPtr& model, int r, int order) {
    if (order >= 2) throw UnsupportedJetOrder("jets of order " + std::to_string(order) + " are not modeled");
    if (order < 1) throw DimensionMismatch("jet order must be 1");
    const int n = model->tangent_dim;
    const auto width = static_cast<std::size_t>(1 + n);
    const auto amb = static_cast<std::size_t>(r) * width;
    // Lie-algebra filtration on the dual side: everything for u >= 0, the branch line when one
    // coordinate is -1, nothing below.
    auto filtration_piece = [&](const std::string& y, const Point& u) {
        std::vector<std::size_t> idx;
        int neg = -1, count = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (u[i] < -1) return columns_of(amb, idx);
            if (u[i] == -1) {
                neg = static_cast<int>(i);
                ++count;
            }
        }
        if (count == 0) {
            for (std::size_t a = 0; a < amb; ++a) idx.push_back(a);
        } else if (count == 1) {
            int d = model->branch_direction.at(y)[static_cast<std::size_t>(neg)];
            for (int k = 0; k < r; ++k) idx.push_back(static_cast<std::size_t>(k) * width + 1 + static_cast<std::size_t>(d));
        }
        return columns_of(amb, idx);
    };
    return from_subspaces(model, "jet1(" + std::to_string(r) + ")", uniform(model, static_cast<int>(amb)),
                          unit_windows(model), [&](const std::string& y, const Point& v) {
                              RationalMatrix killed(amb, 0);
                              Point lo = filled(static_cast<int>(v.size()), -2), hi = filled(static_cast<int>(v.size()), 2);
                              for (const auto& u : box_points(lo, hi)) {
                                  Point s = u;
                                  for (std::size_t i = 0; i < s.size(); ++i) s[i] += v[i];
                                  if (leq(filled(static_cast<int>(v.size()), 0), s)) continue;
                                  killed = hstack(killed, filtration_piece(y, u));
                              }
                              if (killed.cols() == 0) return RationalMatrix::identity(amb);
                              return image_basis(kernel_matrix(killed.transpose()));
                          });
}

JetSequence jet_sequence(const ModelPtr& model, int r) {
    JetSequence js;
    const int n = model->tangent_dim;
    const auto width = static_cast<std::size_t>(1 + n);
    const auto ru = static_cast<std::size_t>(r);
    js.sub = omega_prime_tensor(model, r);
    js.middle = jet_object(model, r);
    js.quotient = canonical_object(model, r);
    RationalMatrix inc(ru * width, static_cast<std::size_t>(n) * ru), proj(ru, ru * width), split(ru * width, ru);
    for (std::size_t k = 0; k < ru; ++k) {
        proj(k, k * width) = 1;
        split(k * width, k) = 1;
        for (std::size_t d = 0; d < static_cast<std::size_t>(n); ++d) inc(k * width + 1 + d, d * ru + k) = 1;
    }
    std::map<std::string, RationalMatrix> inc_maps, proj_maps, split_maps;
    for (const auto& s : model->poset.strata()) {
        inc_maps[s.label] = inc;
        proj_maps[s.label] = proj;
        split_maps[s.label] = split;
    }
    js.inclusion = fj_ambient_morphism(js.sub, js.middle, inc_maps);
    js.projection = fj_ambient_morphism(js.middle, js.quotient, proj_maps);
    js.splitting = fj_ambient_morphism(js.quotient, js.middle, split_maps);
    js.exact = js.inclusion.violations().empty() && js.projection.violations().empty();
    for (const auto& s : model->poset.strata()) {
        Point lo = filled(s.codim, -1), hi = filled(s.codim, 2);
        for (const auto& v : box_points(lo, hi)) {
            auto a = js.inclusion.parts.at(s.label).component(v);
            auto b = js.projection.parts.at(s.label).component(v);
            auto mid = static_cast<std::size_t>(js.middle->at(s.label).dim(v));
            if (!(b * a).is_zero() || rank(a) != a.cols() || rank(b) != b.rows() || rank(a) + rank(b) != mid) js.exact = false;
        }
    }
    js.split = js.splitting.violations().empty() && fj_equal(fj_compose(js.projection, js.splitting), fj_identity(js.quotient));
    return js;
}

// ---------------------------------------------------------- residue resolution

ResidueResolution residue_resolution(const ModelPtr& model) {
    const auto& poset = model->poset;
    ResidueResolution res;
    int top = 0;
    for (const auto& s : poset.strata()) top = std::max(top, s.codim);
    auto r0 = omega_mvee(model);
    res.terms.push_back(truncate(r0, 1));
    res.terms.push_back(r0);
    std::vector<std::vector<ObjectPtr>> summand_objects{{r0}};
    res.summands.push_back({poset.open_stratum()});
    for (int p = 1; p <= top; ++p) {
        std::vector<ObjectPtr> objs;
        std::vector<std::string> names;
        for (const auto& y : poset.of_codim(p)) {
            objs.push_back(omega_bar(model, y));
            names.push_back(y);
        }
        summand_objects.push_back(objs);
        res.summands.push_back(names);
        res.terms.push_back(objs.empty() ? fj_zero_object(model) : fj_direct_sum(objs, "R" + std::to_string(p)));
    }
    res.differentials.push_back(fj_matrix_morphism(res.terms[0], res.terms[1], [&](const std::string& z, const Point& v) {
        auto ds = static_cast<std::size_t>(res.terms[0]->at(z).dim(v));
        auto dt = static_cast<std::size_t>(res.terms[1]->at(z).dim(v));
        return ds > 0 ? RationalMatrix::identity(ds) : RationalMatrix(dt, 0);
    }));
    for (int p = 0; p < top; ++p) {
        const auto& src = summand_objects[static_cast<std::size_t>(p)];
        const auto& tgt = summand_objects[static_cast<std::size_t>(p + 1)];
        const auto& src_names = res.summands[static_cast<std::size_t>(p)];
        const auto& tgt_names = res.summands[static_cast<std::size_t>(p + 1)];
        res.differentials.push_back(fj_matrix_morphism(
            res.terms[static_cast<std::size_t>(p + 1)], res.terms[static_cast<std::size_t>(p + 2)],
            [&](const std::string& z, const Point& v) {
                RationalMatrix rows_acc(0, 0);
                std::vector<RationalMatrix> block_rows;
                for (std::size_t t = 0; t < tgt.size(); ++t) {
                    RationalMatrix row(static_cast<std::size_t>(tgt[t]->at(z).dim(v)), 0);
                    for (std::size_t s = 0; s < src.size(); ++s) {
                        auto ds = static_cast<std::size_t>(src[s]->at(z).dim(v));
                        auto dt = static_cast<std::size_t>(tgt[t]->at(z).dim(v));
                        RationalMatrix block(dt, ds);
                        const auto& y = src_names[s];
                        const auto& yp = tgt_names[t];
                        if (ds > 0 && dt > 0 && poset.leq(yp, y)) {
                            const auto& beta = poset.beta(yp, y);
                            auto missing = complement_of(beta, poset.codim(yp));
                            int j = missing.front();
                            int before = static_cast<int>(std::count_if(beta.begin(), beta.end(), [&](int i) { return i < j; }));
                            block = Rational(before % 2 == 0 ? 1 : -1) * RationalMatrix::identity(ds);
                        }
                        row = hstack(row, block);
                    }
                    block_rows.push_back(row);
                }
                std::size_t cols = 0;
                for (const auto& s : src) cols += static_cast<std::size_t>(s->at(z).dim(v));
                RationalMatrix out(0, cols);
                for (const auto& r : block_rows) out = vstack(out, r);
                return out;
            }));
    }
    for (std::size_t k = 0; k < res.differentials.size(); ++k) {
        auto v = res.differentials[k].violations();
        if (!v.empty()) throw NotExact("differential " + std::to_string(k) + " is not a morphism: " + v.front());
    }
    for (const auto& s : poset.strata()) {
        Point lo = filled(s.codim, -1), hi = filled(s.codim, 0);
        for (const auto& t : res.terms) hi = pmax(hi, t->at(s.label).hi());
        for (auto& x : hi) ++x;
        for (const auto& v : box_points(lo, hi)) {
            ++res.degrees_checked;
            std::vector<RationalMatrix> d;
            for (const auto& m : res.differentials) d.push_back(m.parts.at(s.label).component(v));
            for (std::size_t k = 0; k + 1 < d.size(); ++k)
                if (!(d[k + 1] * d[k]).is_zero())
                    throw NotExact("d o d != 0 on '" + s.label + "' at degree " + point_key(v) + " term " + std::to_string(k + 1));
            for (std::size_t k = 0; k < res.terms.size(); ++k) {
                std::size_t in = k == 0 ? 0 : rank(d[k - 1]);
                std::size_t out = k < d.size() ? rank(d[k]) : 0;
                if (in + out != static_cast<std::size_t>(res.terms[k]->at(s.label).dim(v)))
                    throw NotExact("not exact on '" + s.label + "' at degree " + point_key(v) + " term " + std::to_string(k));
            }
        }
    }
    res.certified = true;
    // D_k = ker(T_k -> T_{k+1}); 0 -> D_k -> T_k -> D_{k+1} -> 0, and D_last = T_last.
    const std::size_t last = res.terms.size() - 1;
    ObjectPtr quotient = res.terms[last];
    for (std::size_t k = last; k-- > 1;) {
        auto r = std::make_shared<Recipe>();
        r->kind = Recipe::Kind::kernel;
        r->parts = {res.terms[k], quotient};
        std::shared_ptr<FJObject> dk;
        if (k == 1) {
            dk = mutable_copy(res.terms[0]);
            dk->label = "omega";
        } else {
            dk = mutable_copy(fj_sub_quotient(res.differentials[k - 1], SubQuotientKind::image).object);
            dk->label = "D" + std::to_string(k);
        }
        dk->recipe = r;
        quotient = dk;
    }
    if (last == 1) {
        auto w = mutable_copy(res.terms[0]);
        w->label = "omega";
        w->recipe = res.terms[1]->recipe;
        quotient = w;
    }
    res.omega = quotient;
    return res;
}

ObjectPtr omega_object(const ModelPtr& model) { return residue_resolution(model).omega; }

// ---------------------------------------------------------------- Ext engine

ExtResult ext_dim(const ObjectPtr& g, int i) {
    ExtResult r;
    if (i < 0) return r;
    if (!g->recipe) throw NotComputable("'" + g->label + "' has no registered resolution");
    const auto& rec = *g->recipe;
    const std::string head = "Ext^" + std::to_string(i) + "(O, " + g->label + ")";
    switch (rec.kind) {
        case Recipe::Kind::coextend: {
            if (rec.bound > 0) throw NotComputable(head + ": coextension bound " + std::to_string(rec.bound) + " > 0");
            int d = 0;
            if (leq(filled(static_cast<int>(rec.degree.size()), 0), rec.degree)) {
                try {
                    d = stack_cohomology(g->model->group(rec.stratum), rec.coeff, i);
                } catch (const Error& e) {
                    throw NotComputable(head + " blocked: " + e.what());
                }
            }
            r.lo = r.hi = d;
            r.audit.push_back(head + " = " + std::to_string(d) + " (coefficient cohomology on " + rec.stratum + ")");
            return r;
        }
        case Recipe::Kind::direct_sum: {
            for (const auto& p : rec.parts) {
                auto e = ext_dim(p, i);
                r.lo += e.lo;
                r.hi += e.hi;
                r.audit.insert(r.audit.end(), e.audit.begin(), e.audit.end());
            }
            r.audit.push_back(head + " in [" + std::to_string(r.lo) + ", " + std::to_string(r.hi) + "] (direct sum)");
            return r;
        }
        case Recipe::Kind::kernel: {
            const auto& b = rec.parts.at(0);
            const auto& c = rec.parts.at(1);
            auto bi = ext_dim(b, i), ci = ext_dim(c, i), cprev = ext_dim(c, i - 1), bprev = ext_dim(b, i - 1);
            for (const auto* e : {&bprev, &cprev, &bi, &ci}) r.audit.insert(r.audit.end(), e->audit.begin(), e->audit.end());
            r.lo = std::max(0, cprev.lo - bprev.hi) + std::max(0, bi.lo - ci.hi);
            r.hi = cprev.hi + bi.hi;
            r.audit.push_back(head + " in [" + std::to_string(r.lo) + ", " + std::to_string(r.hi) +
                              "] (long exact sequence of 0 -> " + g->label + " -> " + b->label + " -> " + c->label + " -> 0)");
            return r;
        }
    }
    return r;
}

// ------------------------------------------------------------- expansions

std::vector<FJMorphism> global_sections(const ObjectPtr& f) { return hom_fj(canonical_object(f->model), f); }

ExpansionReport fj_expansion(const ObjectPtr& f, const std::string& y) {
    ExpansionReport rep;
    rep.stratum = y;
    const auto& m = f->at(y);
    for (const auto& v : m.window_points())
        if (m.dim(v) > 0) rep.support.push_back(v);
    rep.stable_beyond_window = m.dim(m.hi()) > 0;
    auto sections = global_sections(f);
    rep.sections = sections.size();
    Point lo = pmin(m.lo(), filled(m.rank(), 0)), hi = pmax(m.hi(), filled(m.rank(), 0));
    RationalMatrix stacked(0, sections.size());
    std::vector<std::vector<Rational>> columns(sections.size());
    for (std::size_t s = 0; s < sections.size(); ++s) {
        std::vector<Point> nonzero;
        for (const auto& v : box_points(lo, hi)) {
            auto c = sections[s].parts.at(y).component(v);
            if (!c.is_zero()) nonzero.push_back(v);
            for (const auto& x : c.entries()) columns[s].push_back(x);
        }
        rep.section_components.push_back(nonzero);
    }
    if (!sections.empty()) {
        std::vector<Column> cols(columns.begin(), columns.end());
        rep.injective = rank(RationalMatrix::from_columns(cols.front().size(), cols)) == sections.size();
    }
    return rep;
}

// ---------------------------------------------------------------------- JSON

nlohmann::json to_json(const FJObject& f) {
    nlohmann::json j;
    j["label"] = f.label;
    j["model"] = f.model->name;
    for (const auto& [y, m] : f.parts) j["strata"][y] = to_json(m);
    j["mu"] = nlohmann::json::object();
    for (const auto& [key, mu] : f.mu) {
        nlohmann::json comps = nlohmann::json::object();
        for (const auto& w : box_points(mu.lo, mu.hi)) comps[point_key(w)] = to_json(mu.component(w));
        j["mu"][pair_name(key)] = comps;
    }
    for (const auto& [y, c] : f.coeffs) j["coefficients"][y] = to_json(c);
    return j;
}

nlohmann::json to_json(const ExpansionReport& r) {
    nlohmann::json support = nlohmann::json::array(), comps = nlohmann::json::array();
    for (const auto& v : r.support) support.push_back(v);
    for (const auto& s : r.section_components) {
        nlohmann::json one = nlohmann::json::array();
        for (const auto& v : s) one.push_back(v);
        comps.push_back(one);
    }
    return {{"stratum", r.stratum},
            {"nonzero_components", support},
            {"nonzero_component_count", r.support.size()},
            {"stable_beyond_window", r.stable_beyond_window},
            {"sections", r.sections},
            {"section_components", comps},
            {"injective", r.injective}};
}

}  // namespace fjc
