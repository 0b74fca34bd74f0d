#pragma once

#include <random>

#include "fjcalc/grid_module.hpp"

namespace fjt {

using namespace fjc;
using Rng = std::mt19937;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline Rational random_rational(Rng& rng, int range = 3) {
    int num = uniform_int(rng, -range, range);
    int den = uniform_int(rng, 1, 2);
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline RationalMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, int range = 3) {
    RationalMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = random_rational(rng, range);
    return m;
}

/// Random low-rank matrix: product of two random factors.
inline RationalMatrix random_low_rank(Rng& rng, std::size_t rows, std::size_t cols) {
    auto k = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(std::min(rows, cols))));
    return random_matrix(rng, rows, k) * random_matrix(rng, k, cols);
}

/// Module B(v)/A(v) where B is spanned by generators with random birth degrees in the
/// window and A by relations drawn from B; torsion_free drops the relations.
inline GridModule random_module(Rng& rng, int rank, int max_side, int max_dim, bool torsion_free) {
    Point lo(static_cast<std::size_t>(rank)), hi(static_cast<std::size_t>(rank));
    for (int i = 0; i < rank; ++i) {
        lo[static_cast<std::size_t>(i)] = uniform_int(rng, -1, 0);
        hi[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)] + uniform_int(rng, 0, max_side - 1);
    }
    auto pts = box_points(lo, hi);
    auto pick = [&]() { return pts[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(pts.size()) - 1))]; };
    const auto d = static_cast<std::size_t>(uniform_int(rng, 0, max_dim));
    struct Gen {
        Point birth;
        RationalMatrix vec;
    };
    std::vector<Gen> gens, rels;
    for (std::size_t g = 0; g < d + 1; ++g) gens.push_back({pick(), random_matrix(rng, d, 1)});
    auto span_at = [&](const std::vector<Gen>& list, const Point& v) {
        RationalMatrix acc(d, 0);
        for (const auto& g : list)
            if (leq(g.birth, v)) acc = hstack(acc, g.vec);
        return image_basis(acc);
    };
    if (!torsion_free) {
        int nrel = uniform_int(rng, 0, 2);
        for (int r = 0; r < nrel; ++r) {
            Point b = pick();
            auto basis = span_at(gens, b);
            if (basis.cols() == 0) continue;
            rels.push_back({b, basis * random_matrix(rng, basis.cols(), 1)});
        }
    }
    GridModule m(lo, hi);
    std::vector<RationalMatrix> bases, quot;
    for (const auto& v : pts) {
        auto b = span_at(gens, v);
        auto a = span_at(rels, v);
        RationalMatrix q;
        if (b.cols() == 0) {
            q = RationalMatrix(0, 0);
        } else {
            auto coords = a.cols() == 0 ? RationalMatrix(b.cols(), 0) : *solve_matrix(b, a);
            q = cokernel_projection(coords);
        }
        m.set_dim(v, static_cast<int>(q.rows()));
        bases.push_back(b);
        quot.push_back(q);
    }
    for (const auto& v : pts)
        for (int i = 0; i < rank; ++i) {
            Point w = v;
            ++w[static_cast<std::size_t>(i)];
            if (!m.in_window(w)) continue;
            const auto& bv = bases[m.index(v)];
            const auto& bw = bases[m.index(w)];
            const auto& qv = quot[m.index(v)];
            const auto& qw = quot[m.index(w)];
            if (qv.rows() == 0 || qw.rows() == 0) {
                m.set_map(v, i, RationalMatrix(qw.rows(), qv.rows()));
                continue;
            }
            auto incl = *solve_matrix(bw, bv);
            auto section = *solve_matrix(qv, RationalMatrix::identity(qv.rows()));
            m.set_map(v, i, qw * incl * section);
        }
    return m;
}

/// Random element of Hom(m, n): a small integer combination of a basis.
inline GridMorphism random_morphism(Rng& rng, const GridModule& m, const GridModule& n) {
    auto basis = hom_space(m, n);
    GridMorphism f = GridMorphism::zero(m, n);
    for (const auto& b : basis) f = add(f, scale(Rational(uniform_int(rng, -2, 2)), b));
    return f;
}

}  // namespace fjt
