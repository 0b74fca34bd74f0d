#pragma once

#include <climits>
#include <map>
#include <string>
#include <vector>

#include "fjcalc/fj_category.hpp"

namespace fjt {

using namespace fjc;

/// Box around every window of both objects, one unit of slack on each side.
inline std::pair<int, int> common_box(const FJObject& a, const FJObject& b) {
    int lo = 0, hi = 0;
    for (const auto* f : {&a, &b})
        for (const auto& [y, m] : f->parts)
            for (std::size_t i = 0; i < m.lo().size(); ++i) {
                lo = std::min(lo, m.lo()[i]);
                hi = std::max(hi, m.hi()[i]);
            }
    return {lo - 1, hi + 1};
}

inline bool all_at_least(const Point& p, int bound) {
    for (int x : p)
        if (x < bound) return false;
    return true;
}

/// Oracle: dim Hom_FJ(a, b) restricted to degrees >= bound, as the nullity of one dense system
/// with an unknown matrix at every point of a fixed box on every stratum.
inline std::size_t brute_hom_dim(const FJObject& a, const FJObject& b, int bound = INT_MIN) {
    const auto& poset = a.model->poset;
    auto [lo, hi] = common_box(a, b);
    if (bound != INT_MIN) hi = std::max(hi, bound + 1);
    struct Var {
        std::size_t offset, rows, cols;
    };
    std::map<std::pair<std::string, Point>, Var> vars;
    std::size_t n = 0;
    for (const auto& s : poset.strata())
        for (const auto& p : box_points(Point(static_cast<std::size_t>(s.codim), lo), Point(static_cast<std::size_t>(s.codim), hi))) {
            if (!all_at_least(p, bound)) continue;
            auto r = static_cast<std::size_t>(b.at(s.label).dim(p));
            auto c = static_cast<std::size_t>(a.at(s.label).dim(p));
            vars[{s.label, p}] = {n, r, c};
            n += r * c;
        }
    std::vector<std::vector<Rational>> rows;
    // One row per entry of sum(L * X * R); each X is flattened row-major.
    struct Term {
        RationalMatrix left;
        const Var* var;
        RationalMatrix right;
    };
    auto add_equation = [&](const std::vector<Term>& terms, std::size_t out_r, std::size_t out_c) {
        for (std::size_t i = 0; i < out_r; ++i)
            for (std::size_t j = 0; j < out_c; ++j) {
                std::vector<Rational> row(n);
                for (const auto& t : terms)
                    for (std::size_t k = 0; k < t.var->rows; ++k)
                        for (std::size_t l = 0; l < t.var->cols; ++l)
                            row[t.var->offset + k * t.var->cols + l] += t.left(i, k) * t.right(l, j);
                rows.push_back(std::move(row));
            }
    };
    for (const auto& [key, v] : vars) {
        const auto& [y, p] = key;
        const auto& ma = a.at(y);
        const auto& mb = b.at(y);
        for (int i = 0; i < ma.rank(); ++i) {
            Point q = p;
            ++q[static_cast<std::size_t>(i)];
            auto it = vars.find({y, q});
            if (it == vars.end()) continue;
            const Var& w = it->second;
            add_equation({{mb.step(p, i), &v, RationalMatrix::identity(v.cols)},
                          {Rational(-1) * RationalMatrix::identity(w.rows), &w, ma.step(p, i)}},
                         w.rows, v.cols);
        }
    }
    for (const auto& s : poset.strata())
        for (const auto& z : poset.below(s.label)) {
            if (z == s.label) continue;
            const auto& beta = poset.beta(z, s.label);
            const auto& mua = a.mu.at({z, s.label});
            const auto& mub = b.mu.at({z, s.label});
            for (const auto& [key, v] : vars) {
                if (key.first != s.label) continue;
                const Point& w = key.second;
                Point p(static_cast<std::size_t>(poset.codim(z)), hi);
                for (std::size_t k = 0; k < beta.size(); ++k) p[static_cast<std::size_t>(beta[k])] = w[k];
                const Var& vz = vars.at({z, p});
                auto ma = mua.component(w);
                auto mb = mub.component(w);
                add_equation({{RationalMatrix::identity(vz.rows), &vz, ma}, {Rational(-1) * mb, &v, RationalMatrix::identity(v.cols)}},
                             mb.rows(), v.cols);
            }
        }
    if (n == 0) return 0;
    if (rows.empty()) return n;
    return n - rank(RationalMatrix::from_rows(rows));
}

}  // namespace fjt
