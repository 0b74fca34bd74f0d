#include "fjcalc/grid_module.hpp"

#include <algorithm>
#include <climits>
#include <map>
#include <random>
#include <sstream>

#include "fjcalc/errors.hpp"

namespace fjc {

bool leq(const Point& a, const Point& b) {
    if (a.size() != b.size()) throw DimensionMismatch("points of different rank");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

std::string point_key(const Point& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

Point parse_point_key(const std::string& key, int rank) {
    Point v;
    if (!key.empty()) {
        std::stringstream ss(key);
        std::string part;
        while (std::getline(ss, part, ',')) {
            try {
                std::size_t used = 0;
                v.push_back(std::stoi(part, &used));
                if (used != part.size()) throw ParseError("bad coordinate '" + part + "'");
            } catch (const std::logic_error&) {
                throw ParseError("bad point key '" + key + "'");
            }
        }
    }
    if (static_cast<int>(v.size()) != rank) throw ParseError("point key '" + key + "' has wrong rank");
    return v;
}

std::vector<Point> box_points(const Point& lo, const Point& hi) {
    std::vector<Point> out;
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (lo[i] > hi[i]) return out;
    Point v = lo;
    while (true) {
        out.push_back(v);
        int i = static_cast<int>(v.size()) - 1;
        while (i >= 0 && v[i] == hi[i]) {
            v[i] = lo[i];
            --i;
        }
        if (i < 0) break;
        ++v[i];
    }
    return out;
}

namespace {

Point clamp_up(const Point& v, const Point& hi) {
    Point c = v;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::min(c[i], hi[i]);
    return c;
}

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

Point unit_shift(const Point& v, int i, int by = 1) {
    Point w = v;
    w[i] += by;
    return w;
}

}  // namespace

// ---------------------------------------------------------------- GridModule

GridModule::GridModule() : dims_(1, 0), maps_(1) {}

GridModule::GridModule(Point lo, Point hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.size() != hi_.size()) throw DimensionMismatch("window bounds of different rank");
    std::size_t n = 1;
    for (std::size_t i = 0; i < lo_.size(); ++i) {
        if (lo_[i] > hi_[i]) throw DimensionMismatch("window lower bound exceeds upper bound");
        n *= static_cast<std::size_t>(hi_[i] - lo_[i] + 1);
    }
    dims_.assign(n, 0);
    maps_.assign(n, std::vector<RationalMatrix>(lo_.size()));
}

GridModule GridModule::zero(int rank) { return GridModule(Point(rank, 0), Point(rank, 0)); }

bool GridModule::in_window(const Point& v) const {
    if (v.size() != lo_.size()) return false;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] < lo_[i] || v[i] > hi_[i]) return false;
    return true;
}

std::size_t GridModule::index(const Point& v) const {
    if (!in_window(v)) throw DimensionMismatch("point " + point_key(v) + " outside window");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        idx = idx * static_cast<std::size_t>(hi_[i] - lo_[i] + 1) + static_cast<std::size_t>(v[i] - lo_[i]);
    return idx;
}

Point GridModule::point(std::size_t idx) const {
    Point v(lo_.size());
    for (std::size_t i = lo_.size(); i-- > 0;) {
        auto w = static_cast<std::size_t>(hi_[i] - lo_[i] + 1);
        v[i] = lo_[i] + static_cast<int>(idx % w);
        idx /= w;
    }
    return v;
}

void GridModule::reset_maps_at(std::size_t idx) {
    Point v = point(idx);
    for (int i = 0; i < rank(); ++i) {
        Point w = unit_shift(v, i);
        if (in_window(w))
            maps_[idx][i] = RationalMatrix(static_cast<std::size_t>(dims_[index(w)]),
                                           static_cast<std::size_t>(dims_[idx]));
        Point u = unit_shift(v, i, -1);
        if (in_window(u)) {
            auto j = index(u);
            maps_[j][i] = RationalMatrix(static_cast<std::size_t>(dims_[idx]),
                                         static_cast<std::size_t>(dims_[j]));
        }
    }
}

void GridModule::set_dim(const Point& v, int d) {
    if (d < 0) throw DimensionMismatch("negative dimension");
    auto idx = index(v);
    dims_[idx] = d;
    reset_maps_at(idx);
}

void GridModule::set_map(const Point& v, int i, RationalMatrix m) {
    auto idx = index(v);
    Point w = unit_shift(v, i);
    if (!in_window(w)) throw DimensionMismatch("structure map leaves the window");
    if (m.rows() != static_cast<std::size_t>(dims_[index(w)]) ||
        m.cols() != static_cast<std::size_t>(dims_[idx]))
        throw DimensionMismatch("structure map has wrong shape at " + point_key(v));
    maps_[idx][i] = std::move(m);
}

const RationalMatrix& GridModule::stored_map(const Point& v, int i) const {
    if (!in_window(unit_shift(v, i))) throw DimensionMismatch("structure map leaves the window");
    return maps_[index(v)][i];
}

int GridModule::dim(const Point& v) const {
    if (v.size() != lo_.size()) throw DimensionMismatch("point rank differs from module rank");
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] < lo_[i]) return 0;
    return dims_[index(clamp_up(v, hi_))];
}

RationalMatrix GridModule::step(const Point& v, int i) const {
    Point w = unit_shift(v, i);
    auto ds = static_cast<std::size_t>(dim(v));
    auto dt = static_cast<std::size_t>(dim(w));
    if (ds == 0 || dt == 0) return RationalMatrix(dt, ds);
    if (v[i] >= hi_[i]) return RationalMatrix::identity(ds);
    return maps_[index(clamp_up(v, hi_))][i];
}

RationalMatrix GridModule::eval_map(const Point& v, const Point& w) const {
    if (!leq(v, w)) throw NotComparable(point_key(v) + " is not <= " + point_key(w));
    auto ds = static_cast<std::size_t>(dim(v));
    auto dt = static_cast<std::size_t>(dim(w));
    if (ds == 0 || dt == 0) return RationalMatrix(dt, ds);
    Point cur = clamp_up(v, hi_);
    Point end = clamp_up(w, hi_);
    RationalMatrix acc = RationalMatrix::identity(ds);
    for (int i = 0; i < rank(); ++i)
        while (cur[i] < end[i]) {
            acc = maps_[index(cur)][i] * acc;
            ++cur[i];
        }
    return acc;
}

std::vector<std::string> GridModule::violations() const {
    std::vector<std::string> out;
    for (std::size_t idx = 0; idx < dims_.size(); ++idx) {
        Point v = point(idx);
        for (int i = 0; i < rank(); ++i) {
            Point vi = unit_shift(v, i);
            if (!in_window(vi)) continue;
            const auto& m = maps_[idx][i];
            if (m.rows() != static_cast<std::size_t>(dims_[index(vi)]) ||
                m.cols() != static_cast<std::size_t>(dims_[idx]))
                out.push_back("map shape at " + point_key(v) + " direction " + std::to_string(i));
        }
    }
    if (!out.empty()) return out;
    for (std::size_t idx = 0; idx < dims_.size(); ++idx) {
        Point v = point(idx);
        for (int i = 0; i < rank(); ++i)
            for (int j = i + 1; j < rank(); ++j) {
                Point vij = unit_shift(unit_shift(v, i), j);
                if (!in_window(vij)) continue;
                Point vi = unit_shift(v, i), vj = unit_shift(v, j);
                if (!(maps_[index(vi)][j] * maps_[idx][i] == maps_[index(vj)][i] * maps_[idx][j]))
                    out.push_back("square at " + point_key(v) + " directions " + std::to_string(i) +
                                  "," + std::to_string(j) + " does not commute");
            }
    }
    return out;
}

void GridModule::require_valid() const {
    auto v = violations();
    if (!v.empty()) throw KanViolation(v.front());
}

bool GridModule::is_zero() const {
    return std::all_of(dims_.begin(), dims_.end(), [](int d) { return d == 0; });
}

GridModule GridModule::rewindow(const Point& lo, const Point& hi) const {
    if (!leq(lo, lo_) || !leq(hi_, hi)) throw DimensionMismatch("rewindow must enlarge the window");
    GridModule out(lo, hi);
    for (const auto& v : out.window_points()) out.dims_[out.index(v)] = dim(v);
    for (const auto& v : out.window_points())
        for (int i = 0; i < rank(); ++i)
            if (out.in_window(unit_shift(v, i))) out.maps_[out.index(v)][i] = step(v, i);
    return out;
}

// -------------------------------------------------------------- GridMorphism

namespace {

GridMorphism empty_morphism(const GridModule& s, const GridModule& t) {
    if (s.rank() != t.rank()) throw RankMismatch("morphism between modules of different rank");
    GridMorphism f{s, t, pmin(s.lo(), t.lo()), pmax(s.hi(), t.hi()), {}};
    for (const auto& v : box_points(f.lo, f.hi))
        f.components.emplace_back(static_cast<std::size_t>(t.dim(v)), static_cast<std::size_t>(s.dim(v)));
    return f;
}

std::size_t box_index(const Point& lo, const Point& hi, const Point& v) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        idx = idx * static_cast<std::size_t>(hi[i] - lo[i] + 1) + static_cast<std::size_t>(v[i] - lo[i]);
    return idx;
}

}  // namespace

GridMorphism GridMorphism::zero(const GridModule& s, const GridModule& t) { return empty_morphism(s, t); }

GridMorphism GridMorphism::identity(const GridModule& m) {
    GridMorphism f = empty_morphism(m, m);
    for (const auto& v : box_points(f.lo, f.hi))
        f.set_component(v, RationalMatrix::identity(static_cast<std::size_t>(m.dim(v))));
    return f;
}

RationalMatrix GridMorphism::component(const Point& v) const {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] < lo[i]) return RationalMatrix(static_cast<std::size_t>(target.dim(v)),
                                                static_cast<std::size_t>(source.dim(v)));
    return components[box_index(lo, hi, clamp_up(v, hi))];
}

void GridMorphism::set_component(const Point& v, RationalMatrix m) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] < lo[i] || v[i] > hi[i]) throw DimensionMismatch("component outside union window");
    if (m.rows() != static_cast<std::size_t>(target.dim(v)) || m.cols() != static_cast<std::size_t>(source.dim(v)))
        throw DimensionMismatch("component has wrong shape at " + point_key(v));
    components[box_index(lo, hi, v)] = std::move(m);
}

std::vector<std::string> GridMorphism::violations() const {
    std::vector<std::string> out;
    for (const auto& v : box_points(lo, hi)) {
        const auto& c = components[box_index(lo, hi, v)];
        if (c.rows() != static_cast<std::size_t>(target.dim(v)) || c.cols() != static_cast<std::size_t>(source.dim(v))) {
            out.push_back("component shape at " + point_key(v));
            continue;
        }
        for (int i = 0; i < source.rank(); ++i) {
            Point w = unit_shift(v, i);
            if (w[i] > hi[i]) continue;
            if (!(component(w) * source.step(v, i) == target.step(v, i) * c))
                out.push_back("naturality fails at " + point_key(v) + " direction " + std::to_string(i));
        }
    }
    return out;
}

bool GridMorphism::is_iso() const {
    for (const auto& v : box_points(lo, hi)) {
        const auto& c = components[box_index(lo, hi, v)];
        if (c.rows() != c.cols() || rank(c) != c.rows()) return false;
    }
    return true;
}

GridMorphism compose(const GridMorphism& g, const GridMorphism& f) {
    GridMorphism h = empty_morphism(f.source, g.target);
    for (const auto& v : box_points(h.lo, h.hi)) h.set_component(v, g.component(v) * f.component(v));
    return h;
}

GridMorphism add(const GridMorphism& f, const GridMorphism& g) {
    GridMorphism h = empty_morphism(f.source, f.target);
    for (const auto& v : box_points(h.lo, h.hi)) h.set_component(v, f.component(v) + g.component(v));
    return h;
}

GridMorphism scale(const Rational& s, const GridMorphism& f) {
    GridMorphism h = f;
    for (auto& c : h.components) c = s * c;
    return h;
}

bool equal_morphisms(const GridMorphism& f, const GridMorphism& g) {
    if (f.source.rank() != g.source.rank()) return false;
    Point lo = pmin(f.lo, g.lo), hi = pmax(f.hi, g.hi);
    for (const auto& v : box_points(lo, hi))
        if (!(f.component(v) == g.component(v))) return false;
    return true;
}

int evaluate(const GridModule& m, const Point& v) { return m.dim(v); }

RationalMatrix eval_map(const GridModule& m, const Point& v, const Point& w) { return m.eval_map(v, w); }

// -------------------------------------------------------------- sub_quotient

namespace {

RationalMatrix right_inverse(const RationalMatrix& p) {
    auto s = solve_matrix(p, RationalMatrix::identity(p.rows()));
    if (!s) throw DimensionMismatch("projection is not surjective");
    return *s;
}

RationalMatrix coordinates_in(const RationalMatrix& basis, const RationalMatrix& vectors) {
    auto x = solve_matrix(basis, vectors);
    if (!x) throw DimensionMismatch("vectors do not lie in the given subspace");
    return *x;
}

}  // namespace

SubQuotient sub_quotient(const GridMorphism& phi, SubQuotientKind kind) {
    const auto pts = box_points(phi.lo, phi.hi);
    std::vector<RationalMatrix> emb(pts.size());  // basis or projection per point
    GridModule res(phi.lo, phi.hi);
    for (std::size_t k = 0; k < pts.size(); ++k) {
        RationalMatrix a = phi.component(pts[k]);
        switch (kind) {
            case SubQuotientKind::kernel: emb[k] = kernel_matrix(a); break;
            case SubQuotientKind::image: emb[k] = image_basis(a); break;
            case SubQuotientKind::cokernel: emb[k] = cokernel_projection(a); break;
            case SubQuotientKind::coimage: emb[k] = cokernel_projection(kernel_matrix(a)); break;
        }
        bool is_sub = kind == SubQuotientKind::kernel || kind == SubQuotientKind::image;
        res.set_dim(pts[k], static_cast<int>(is_sub ? emb[k].cols() : emb[k].rows()));
    }
    const GridModule& ambient =
        (kind == SubQuotientKind::kernel || kind == SubQuotientKind::coimage) ? phi.source : phi.target;
    for (std::size_t k = 0; k < pts.size(); ++k)
        for (int i = 0; i < res.rank(); ++i) {
            Point w = unit_shift(pts[k], i);
            if (!res.in_window(w)) continue;
            std::size_t kw = res.index(w);
            RationalMatrix st = ambient.step(pts[k], i);
            if (kind == SubQuotientKind::kernel || kind == SubQuotientKind::image)
                res.set_map(pts[k], i, coordinates_in(emb[kw], st * emb[k]));
            else
                res.set_map(pts[k], i, emb[kw] * st * right_inverse(emb[k]));
        }
    SubQuotient out{res, {}};
    if (kind == SubQuotientKind::kernel || kind == SubQuotientKind::image)
        out.canonical = empty_morphism(res, ambient);
    else
        out.canonical = empty_morphism(ambient, res);
    for (std::size_t k = 0; k < pts.size(); ++k) out.canonical.set_component(pts[k], emb[k]);
    return out;
}

// ------------------------------------------------------------------- tensor

Predicates predicates(const GridModule& m) {
    Predicates p;
    for (const auto& v : m.window_points())
        for (int i = 0; i < m.rank(); ++i) {
            if (!m.in_window(unit_shift(v, i))) continue;
            if (rank(m.stored_map(v, i)) != static_cast<std::size_t>(m.dim(v))) p.torsion_free = false;
        }
    p.locally_free = p.torsion_free;
    if (!p.locally_free) return p;
    Point lo = m.lo();
    for (auto& x : lo) --x;
    for (const auto& v : box_points(lo, m.hi()))
        for (int i = 0; i < m.rank() && p.locally_free; ++i)
            for (int j = i + 1; j < m.rank(); ++j) {
                Point vi = unit_shift(v, i), vj = unit_shift(v, j);
                RationalMatrix a = m.step(v, i), b = m.step(v, j);
                RationalMatrix c = m.step(vi, j), d = m.step(vj, i);
                std::size_t dp = c.cols() + d.cols() - rank(hstack(c, Rational(-1) * d));
                std::size_t da = static_cast<std::size_t>(m.dim(v));
                if (dp != da || rank(vstack(a, b)) != da) {
                    p.locally_free = false;
                    break;
                }
            }
    return p;
}

RationalMatrix tensor_span(const GridModule& m, const GridModule& n, const Point& v) {
    const auto a = static_cast<std::size_t>(m.dim(m.hi()));
    const auto b = static_cast<std::size_t>(n.dim(n.hi()));
    Point top(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) top[i] = std::min(v[i] - n.lo()[i], m.hi()[i]);
    RationalMatrix span(a * b, 0);
    if (!leq(m.lo(), top)) return span;
    for (const auto& v1 : box_points(m.lo(), top)) {
        Point v2(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) v2[i] = v[i] - v1[i];
        if (m.dim(v1) == 0 || n.dim(v2) == 0) continue;
        RationalMatrix em = m.eval_map(v1, m.hi());
        RationalMatrix en = n.eval_map(v2, pmax(v2, n.hi()));
        span = hstack(span, kron(em, en));
    }
    RationalMatrix basis = image_basis(span);
    if (basis.cols() == a * b) return RationalMatrix::identity(a * b);
    return basis;
}

GridModule tensor(const GridModule& m, const GridModule& n) {
    if (m.rank() != n.rank()) throw RankMismatch("tensor of modules of different rank");
    if (!predicates(m).torsion_free || !predicates(n).torsion_free)
        throw NotTorsionFree("tensor is defined on torsion-free modules only");
    Point lo(m.lo()), hi(m.hi());
    for (std::size_t i = 0; i < lo.size(); ++i) {
        lo[i] += n.lo()[i];
        hi[i] += n.hi()[i];
    }
    GridModule t(lo, hi);
    std::vector<RationalMatrix> basis;
    for (const auto& v : t.window_points()) {
        basis.push_back(tensor_span(m, n, v));
        t.set_dim(v, static_cast<int>(basis.back().cols()));
    }
    for (const auto& v : t.window_points())
        for (int i = 0; i < t.rank(); ++i) {
            Point w = unit_shift(v, i);
            if (t.in_window(w)) t.set_map(v, i, coordinates_in(basis[t.index(w)], basis[t.index(v)]));
        }
    return t;
}

// --------------------------------------------------------------------- limits

void require_injection(const Injection& beta, int target_size) {
    std::vector<bool> seen(static_cast<std::size_t>(std::max(target_size, 0)), false);
    for (int x : beta) {
        if (x < 0 || x >= target_size) throw DimensionMismatch("injection value out of range");
        if (seen[static_cast<std::size_t>(x)]) throw DimensionMismatch("map is not injective");
        seen[static_cast<std::size_t>(x)] = true;
    }
}

Injection compose_injections(const Injection& outer, const Injection& inner) {
    Injection c;
    for (int k : inner) c.push_back(outer.at(static_cast<std::size_t>(k)));
    return c;
}

Injection identity_injection(int n) {
    Injection b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) b[static_cast<std::size_t>(i)] = i;
    return b;
}

namespace {

Point lift_point(const Point& w, const Injection& beta, const Point& fill) {
    Point p = fill;
    for (std::size_t k = 0; k < beta.size(); ++k) p[static_cast<std::size_t>(beta[k])] = w[k];
    return p;
}

}  // namespace

GridModule lim_along(const GridModule& m, const Injection& beta) {
    require_injection(beta, m.rank());
    Point lo, hi;
    for (int b : beta) {
        lo.push_back(m.lo()[static_cast<std::size_t>(b)]);
        hi.push_back(m.hi()[static_cast<std::size_t>(b)]);
    }
    GridModule out(lo, hi);
    for (const auto& w : out.window_points()) out.set_dim(w, m.dim(lift_point(w, beta, m.hi())));
    for (const auto& w : out.window_points())
        for (std::size_t k = 0; k < beta.size(); ++k) {
            Point wk = unit_shift(w, static_cast<int>(k));
            if (out.in_window(wk)) out.set_map(w, static_cast<int>(k), m.step(lift_point(w, beta, m.hi()), beta[k]));
        }
    return out;
}

GridMorphism lim_along(const GridMorphism& f, const Injection& beta) {
    GridMorphism g = empty_morphism(lim_along(f.source, beta), lim_along(f.target, beta));
    for (const auto& w : box_points(g.lo, g.hi)) g.set_component(w, f.component(lift_point(w, beta, f.hi)));
    return g;
}

Point stabilized_point(const GridModule& m, const Injection& beta, const Point& v) {
    Point p = v;
    std::vector<bool> in_image(v.size(), false);
    for (int b : beta) in_image[static_cast<std::size_t>(b)] = true;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!in_image[i]) p[i] = std::max(v[i], m.hi()[i]);
    return p;
}

RationalMatrix stabilization_map(const GridModule& m, const Injection& beta, const Point& v) {
    require_injection(beta, m.rank());
    return m.eval_map(v, stabilized_point(m, beta, v));
}

// -------------------------------------------------------------- constructors

GridModule canonical_extension(int dim, int rank) { return step_module(dim, Point(static_cast<std::size_t>(rank), 0)); }

GridModule step_module(int dim, const Point& start) {
    GridModule m(start, start);
    m.set_dim(start, dim);
    return m;
}

GridModule box_module(int dim, const Point& a, const Point& b) {
    Point hi = b;
    for (auto& x : hi) ++x;
    GridModule m(a, hi);
    for (const auto& v : m.window_points()) m.set_dim(v, leq(v, b) ? dim : 0);
    for (const auto& v : m.window_points())
        for (int i = 0; i < m.rank(); ++i) {
            Point w = unit_shift(v, i);
            if (m.in_window(w) && m.dim(v) && m.dim(w))
                m.set_map(v, i, RationalMatrix::identity(static_cast<std::size_t>(dim)));
        }
    return m;
}

GridModule direct_sum(const GridModule& a, const GridModule& b) {
    if (a.rank() != b.rank()) throw RankMismatch("direct sum of modules of different rank");
    GridModule s(pmin(a.lo(), b.lo()), pmax(a.hi(), b.hi()));
    for (const auto& v : s.window_points()) s.set_dim(v, a.dim(v) + b.dim(v));
    for (const auto& v : s.window_points())
        for (int i = 0; i < s.rank(); ++i)
            if (s.in_window(unit_shift(v, i))) s.set_map(v, i, block_diag(a.step(v, i), b.step(v, i)));
    return s;
}

// ----------------------------------------------------------------- iso_test

std::string to_string(IsoVerdict v) {
    switch (v) {
        case IsoVerdict::iso: return "iso";
        case IsoVerdict::not_iso: return "not_iso";
        case IsoVerdict::undecided: return "undecided";
    }
    return "undecided";
}

std::vector<std::pair<std::pair<int, int>, int>> barcode(const GridModule& m) {
    if (m.rank() != 1) throw RankMismatch("barcode needs a rank-1 module");
    const int lo = m.lo()[0], hi = m.hi()[0];
    auto r = [&](int a, int b) -> long {
        if (a < lo) return 0;
        return static_cast<long>(rank(m.eval_map({a}, {std::min(b, hi)})));
    };
    std::vector<std::pair<std::pair<int, int>, int>> bars;
    for (int a = lo; a <= hi; ++a)
        for (int b = a; b <= hi; ++b) {
            long mult = r(a, b) - r(a - 1, b) - r(a, b + 1) + r(a - 1, b + 1);
            if (b == hi) mult = r(a, hi) - r(a - 1, hi);
            if (mult > 0) bars.push_back({{a, b == hi ? INT_MAX : b}, static_cast<int>(mult)});
        }
    return bars;
}

std::vector<GridMorphism> hom_space(const GridModule& m, const GridModule& n) {
    GridMorphism shape = empty_morphism(m, n);
    const auto pts = box_points(shape.lo, shape.hi);
    BlockSystem sys;
    for (const auto& v : pts) sys.add_block(static_cast<std::size_t>(n.dim(v)), static_cast<std::size_t>(m.dim(v)));
    for (std::size_t k = 0; k < pts.size(); ++k)
        for (int i = 0; i < m.rank(); ++i) {
            Point w = unit_shift(pts[k], i);
            if (w[i] > shape.hi[i]) continue;
            std::size_t kw = box_index(shape.lo, shape.hi, w);
            auto dmv = static_cast<std::size_t>(m.dim(pts[k]));
            auto dnw = static_cast<std::size_t>(n.dim(w));
            sys.add_equation({{n.step(pts[k], i), k, RationalMatrix::identity(dmv)},
                              {Rational(-1) * RationalMatrix::identity(dnw), kw, m.step(pts[k], i)}});
        }
    std::vector<GridMorphism> out;
    for (auto& sol : sys.solution_basis()) {
        GridMorphism f = shape;
        f.components = std::move(sol);
        out.push_back(std::move(f));
    }
    return out;
}

GridModule truncate_below(const GridModule& m, int bound) {
    Point lo = m.lo(), hi = m.hi();
    for (std::size_t i = 0; i < lo.size(); ++i) {
        lo[i] = std::max(lo[i], bound);
        hi[i] = std::max(hi[i], bound);
    }
    GridModule c(lo, hi);
    for (const auto& v : c.window_points()) c.set_dim(v, m.dim(v));
    for (const auto& v : c.window_points())
        for (int i = 0; i < c.rank(); ++i)
            if (c.in_window(unit_shift(v, i))) c.set_map(v, i, m.step(v, i));
    return c;
}

std::size_t hom_dim_bounded(const GridModule& m, const GridModule& n, int bound) {
    return hom_space(truncate_below(m, bound), truncate_below(n, bound)).size();
}

IsoVerdict iso_test(const GridModule& m, const GridModule& n) {
    if (m.rank() != n.rank()) throw RankMismatch("iso_test on modules of different rank");
    const Point lo = pmin(m.lo(), n.lo()), hi = pmax(m.hi(), n.hi());
    const auto pts = box_points(lo, hi);
    for (const auto& v : pts)
        if (m.dim(v) != n.dim(v)) return IsoVerdict::not_iso;
    if (m.rank() == 1) return barcode(m.rewindow(lo, hi)) == barcode(n.rewindow(lo, hi)) ? IsoVerdict::iso
                                                                                          : IsoVerdict::not_iso;
    for (const auto& v : pts)
        for (const auto& w : pts)
            if (leq(v, w) && rank(m.eval_map(v, w)) != rank(n.eval_map(v, w))) return IsoVerdict::not_iso;
    auto basis = hom_space(m, n);
    std::vector<GridMorphism> candidates = basis;
    std::mt19937 rng(12345);
    std::uniform_int_distribution<int> coeff(-3, 3);
    for (int t = 0; t < 8 && !basis.empty(); ++t) {
        GridMorphism f = scale(0, basis[0]);
        for (const auto& b : basis) f = add(f, scale(coeff(rng), b));
        candidates.push_back(std::move(f));
    }
    for (const auto& f : candidates)
        if (f.is_iso()) return IsoVerdict::iso;
    if (basis.empty() && m.is_zero()) return IsoVerdict::iso;
    return IsoVerdict::undecided;
}

// ------------------------------------------------------------- kan_normalize

GridModule kan_normalize(const GridModule& m) {
    Point lo = m.lo(), hi = m.hi();
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < m.rank(); ++i) {
            auto slice = [&](int coord) {
                Point a = lo, b = hi;
                a[i] = b[i] = coord;
                return box_points(a, b);
            };
            while (hi[i] > lo[i]) {
                bool constant = true;
                for (const auto& v : slice(hi[i] - 1))
                    if (!m.step(v, i).is_identity() || m.dim(v) != m.dim(unit_shift(v, i))) constant = false;
                if (!constant) break;
                --hi[i];
                changed = true;
            }
            while (lo[i] < hi[i]) {
                bool zero = true;
                for (const auto& v : slice(lo[i]))
                    if (m.dim(v) != 0) zero = false;
                if (!zero) break;
                ++lo[i];
                changed = true;
            }
        }
    }
    GridModule out(lo, hi);
    for (const auto& v : out.window_points()) out.set_dim(v, m.dim(v));
    for (const auto& v : out.window_points())
        for (int i = 0; i < out.rank(); ++i)
            if (out.in_window(unit_shift(v, i))) out.set_map(v, i, m.step(v, i));
    return out;
}

// ---------------------------------------------------------------------- JSON

nlohmann::json to_json(const GridModule& m) {
    nlohmann::json j;
    j["rank"] = m.rank();
    j["lo"] = m.lo();
    j["hi"] = m.hi();
    nlohmann::json values = nlohmann::json::object(), maps = nlohmann::json::object();
    for (const auto& v : m.window_points()) {
        values[point_key(v)] = m.dim(v);
        nlohmann::json dirs = nlohmann::json::object();
        for (int i = 0; i < m.rank(); ++i) {
            Point w = v;
            ++w[static_cast<std::size_t>(i)];
            if (m.in_window(w) && m.dim(v) && m.dim(w)) dirs[std::to_string(i)] = to_json(m.stored_map(v, i));
        }
        if (!dirs.empty()) maps[point_key(v)] = dirs;
    }
    j["values"] = values;
    j["maps"] = maps;
    return j;
}

GridModule grid_module_from_json(const nlohmann::json& j) {
    try {
        int rank = j.at("rank").get<int>();
        Point lo = j.at("lo").get<Point>(), hi = j.at("hi").get<Point>();
        if (static_cast<int>(lo.size()) != rank || static_cast<int>(hi.size()) != rank)
            throw ParseError("window bounds do not match rank");
        GridModule m(lo, hi);
        for (auto it = j.at("values").begin(); it != j.at("values").end(); ++it) {
            Point v = parse_point_key(it.key(), rank);
            int d = it.value().is_object() ? it.value().at("dim").get<int>() : it.value().get<int>();
            m.set_dim(v, d);
        }
        if (j.contains("maps"))
            for (auto it = j.at("maps").begin(); it != j.at("maps").end(); ++it) {
                Point v = parse_point_key(it.key(), rank);
                for (auto d = it.value().begin(); d != it.value().end(); ++d) {
                    int i = std::stoi(d.key());
                    Point w = v;
                    ++w[static_cast<std::size_t>(i)];
                    m.set_map(v, i,
                              matrix_from_json(d.value(), static_cast<std::size_t>(m.dim(w)),
                                               static_cast<std::size_t>(m.dim(v))));
                }
            }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("grid module: ") + e.what());
    } catch (const DimensionMismatch& e) {
        throw ParseError(std::string("grid module: ") + e.what());
    }
}

}  // namespace fjc
