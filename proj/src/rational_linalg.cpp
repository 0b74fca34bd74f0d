#include "fjcalc/rational_linalg.hpp"

#include <algorithm>
#include <utility>

#include "fjcalc/errors.hpp"

namespace fjc {

std::string to_string(const Rational& q) {
    Rational c = q;
    c.canonicalize();
    if (c.get_den() == 1) return c.get_num().get_str();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rational parse_rational(const std::string& s) {
    auto valid_int = [](const std::string& t, bool allow_sign) {
        std::size_t i = 0;
        if (allow_sign && !t.empty() && (t[0] == '-' || t[0] == '+')) i = 1;
        if (i >= t.size()) return false;
        return std::all_of(t.begin() + static_cast<long>(i), t.end(),
                           [](char c) { return c >= '0' && c <= '9'; });
    };
    auto slash = s.find('/');
    std::string num = s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!valid_int(num, true) || !valid_int(den, false)) throw ParseError("bad rational '" + s + "'");
    if (num[0] == '+') num = num.substr(1);
    mpz_class d(den);
    if (d == 0) throw ParseError("zero denominator in '" + s + "'");
    Rational q(mpz_class(num), d);
    q.canonicalize();
    return q;
}

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), a_(rows * cols) {}

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols, std::vector<Rational> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (a_.size() != rows * cols) throw DimensionMismatch("entry count does not match shape");
}

RationalMatrix RationalMatrix::identity(std::size_t n) {
    RationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

RationalMatrix RationalMatrix::from_rows(const std::vector<std::vector<Rational>>& rows) {
    std::size_t c = rows.empty() ? 0 : rows[0].size();
    RationalMatrix m(rows.size(), c);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != c) throw DimensionMismatch("ragged rows");
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

RationalMatrix RationalMatrix::from_ints(const std::vector<std::vector<long>>& rows) {
    std::vector<std::vector<Rational>> r;
    for (const auto& row : rows) {
        std::vector<Rational> q;
        for (long x : row) q.emplace_back(x);
        r.push_back(std::move(q));
    }
    return from_rows(r);
}

RationalMatrix RationalMatrix::from_columns(std::size_t rows, const std::vector<Column>& cols) {
    RationalMatrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].size() != rows) throw DimensionMismatch("column length differs from row count");
        for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    }
    return m;
}

Column RationalMatrix::column(std::size_t j) const {
    Column c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

RationalMatrix RationalMatrix::transpose() const {
    RationalMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool RationalMatrix::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](const Rational& q) { return q == 0; });
}

bool RationalMatrix::is_identity() const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if ((*this)(i, j) != (i == j ? 1 : 0)) return false;
    return true;
}

bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.cols_ != b.rows_) throw DimensionMismatch("product of incompatible shapes");
    RationalMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const Rational& x = a(i, k);
            if (x == 0) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += x * b(k, j);
        }
    return c;
}

RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionMismatch("sum of different shapes");
    RationalMatrix c = a;
    for (std::size_t i = 0; i < c.a_.size(); ++i) c.a_[i] += b.a_[i];
    return c;
}

RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b) {
    return a + Rational(-1) * b;
}

RationalMatrix operator*(const Rational& s, const RationalMatrix& a) {
    RationalMatrix c = a;
    for (auto& x : c.a_) x *= s;
    return c;
}

Column apply(const RationalMatrix& a, const Column& x) {
    if (x.size() != a.cols()) throw DimensionMismatch("vector length differs from column count");
    Column y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

namespace {

// Integer row-echelon form by Bareiss elimination. Each row is first scaled by
// the lcm of its denominators so the elimination runs entirely in Z.
struct Echelon {
    std::vector<std::vector<mpz_class>> rows;  // only the nonzero rows, in pivot order
    std::vector<std::size_t> pivots;
};

Echelon bareiss(const RationalMatrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<std::vector<mpz_class>> r(m, std::vector<mpz_class>(n));
    for (std::size_t i = 0; i < m; ++i) {
        mpz_class l = 1;
        for (std::size_t j = 0; j < n; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a(i, j).get_den_mpz_t());
        for (std::size_t j = 0; j < n; ++j) r[i][j] = a(i, j).get_num() * (l / a(i, j).get_den());
    }
    Echelon e;
    mpz_class prev = 1;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < m; ++col) {
        std::size_t p = row;
        while (p < m && r[p][col] == 0) ++p;
        if (p == m) continue;
        std::swap(r[row], r[p]);
        for (std::size_t i = row + 1; i < m; ++i) {
            for (std::size_t j = col + 1; j < n; ++j) {
                mpz_class t = r[row][col] * r[i][j] - r[i][col] * r[row][j];
                mpz_divexact(r[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            r[i][col] = 0;
        }
        prev = r[row][col];
        e.pivots.push_back(col);
        ++row;
    }
    r.resize(row);
    e.rows = std::move(r);
    return e;
}

// Solves the echelon system for the pivot variables given values of the rest.
void back_substitute(const Echelon& e, Column& x, const std::vector<mpz_class>* rhs) {
    for (std::size_t k = e.pivots.size(); k-- > 0;) {
        const auto& row = e.rows[k];
        std::size_t p = e.pivots[k];
        Rational acc = rhs ? Rational((*rhs)[k]) : Rational(0);
        for (std::size_t j = p + 1; j < x.size(); ++j)
            if (row[j] != 0) acc -= Rational(row[j]) * x[j];
        x[p] = acc / Rational(row[p]);
    }
}

}  // namespace

std::size_t rank(const RationalMatrix& a) { return bareiss(a).pivots.size(); }

std::vector<Column> kernel_basis(const RationalMatrix& a) {
    Echelon e = bareiss(a);
    std::vector<bool> is_pivot(a.cols(), false);
    for (auto p : e.pivots) is_pivot[p] = true;
    std::vector<Column> basis;
    for (std::size_t f = 0; f < a.cols(); ++f) {
        if (is_pivot[f]) continue;
        Column x(a.cols());
        x[f] = 1;
        back_substitute(e, x, nullptr);
        basis.push_back(std::move(x));
    }
    return basis;
}

std::optional<Column> solve(const RationalMatrix& a, const Column& b) {
    if (b.size() != a.rows()) throw DimensionMismatch("right-hand side length differs from row count");
    RationalMatrix aug = hstack(a, RationalMatrix::from_columns(a.rows(), {b}));
    Echelon e = bareiss(aug);
    if (!e.pivots.empty() && e.pivots.back() == a.cols()) return std::nullopt;
    std::vector<mpz_class> rhs;
    for (const auto& row : e.rows) rhs.push_back(row[a.cols()]);
    Echelon lhs{e.rows, e.pivots};
    for (auto& row : lhs.rows) row.pop_back();
    Column x(a.cols());
    back_substitute(lhs, x, &rhs);
    return x;
}

std::optional<RationalMatrix> solve_matrix(const RationalMatrix& a, const RationalMatrix& b) {
    if (b.rows() != a.rows()) throw DimensionMismatch("solve_matrix row counts differ");
    std::vector<Column> cols;
    for (std::size_t j = 0; j < b.cols(); ++j) {
        auto x = solve(a, b.column(j));
        if (!x) return std::nullopt;
        cols.push_back(std::move(*x));
    }
    return RationalMatrix::from_columns(a.cols(), cols);
}

std::optional<RationalMatrix> inverse(const RationalMatrix& a) {
    if (a.rows() != a.cols() || rank(a) != a.rows()) return std::nullopt;
    return solve_matrix(a, RationalMatrix::identity(a.rows()));
}

RationalMatrix image_basis(const RationalMatrix& a) {
    Echelon e = bareiss(a);
    std::vector<Column> cols;
    for (auto p : e.pivots) cols.push_back(a.column(p));
    return RationalMatrix::from_columns(a.rows(), cols);
}

RationalMatrix kernel_matrix(const RationalMatrix& a) {
    return RationalMatrix::from_columns(a.cols(), kernel_basis(a));
}

RationalMatrix cokernel_projection(const RationalMatrix& a) {
    return kernel_matrix(a.transpose()).transpose();
}

bool column_space_contains(const RationalMatrix& big, const RationalMatrix& small) {
    if (small.cols() == 0) return true;
    return rank(hstack(big, small)) == rank(big);
}

bool same_column_space(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.rows() != b.rows()) return false;
    std::size_t r = rank(hstack(a, b));
    return r == rank(a) && r == rank(b);
}

RationalMatrix hstack(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.rows() != b.rows()) throw DimensionMismatch("hstack row counts differ");
    RationalMatrix c(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j) c(i, a.cols() + j) = b(i, j);
    }
    return c;
}

RationalMatrix vstack(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.cols() != b.cols()) throw DimensionMismatch("vstack column counts differ");
    return hstack(a.transpose(), b.transpose()).transpose();
}

RationalMatrix block_diag(const RationalMatrix& a, const RationalMatrix& b) {
    RationalMatrix c(a.rows() + b.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) c(a.rows() + i, a.cols() + j) = b(i, j);
    return c;
}

RationalMatrix kron(const RationalMatrix& a, const RationalMatrix& b) {
    RationalMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (a(i, j) == 0) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    c(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
        }
    return c;
}

std::size_t BlockSystem::add_block(std::size_t rows, std::size_t cols) {
    shapes_.emplace_back(rows, cols);
    offsets_.push_back(total_);
    total_ += rows * cols;
    return shapes_.size() - 1;
}

void BlockSystem::add_equation(const std::vector<Term>& terms) {
    if (terms.empty()) return;
    const std::size_t p = terms[0].left.rows(), q = terms[0].right.cols();
    for (const auto& t : terms) {
        auto [r, c] = shapes_.at(t.block);
        if (t.left.rows() != p || t.right.cols() != q || t.left.cols() != r || t.right.rows() != c)
            throw DimensionMismatch("block equation term has inconsistent shape");
    }
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < q; ++j) {
            std::vector<Rational> row(total_);
            bool nonzero = false;
            for (const auto& t : terms) {
                auto [r, c] = shapes_[t.block];
                for (std::size_t a = 0; a < r; ++a) {
                    if (t.left(i, a) == 0) continue;
                    for (std::size_t b = 0; b < c; ++b) {
                        if (t.right(b, j) == 0) continue;
                        row[offsets_[t.block] + a * c + b] += t.left(i, a) * t.right(b, j);
                        nonzero = true;
                    }
                }
            }
            if (nonzero) rows_.push_back(std::move(row));
        }
}

std::vector<std::vector<RationalMatrix>> BlockSystem::solution_basis() const {
    RationalMatrix a(rows_.size(), total_);
    for (std::size_t i = 0; i < rows_.size(); ++i)
        for (std::size_t j = 0; j < total_; ++j) a(i, j) = rows_[i][j];
    std::vector<std::vector<RationalMatrix>> out;
    for (const auto& x : kernel_basis(a)) {
        std::vector<RationalMatrix> blocks;
        for (std::size_t k = 0; k < shapes_.size(); ++k) {
            auto [r, c] = shapes_[k];
            RationalMatrix m(r, c);
            for (std::size_t e = 0; e < r * c; ++e) m(e / c, e % c) = x[offsets_[k] + e];
            blocks.push_back(std::move(m));
        }
        out.push_back(std::move(blocks));
    }
    return out;
}

nlohmann::json to_json(const RationalMatrix& a) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < a.cols(); ++j) row.push_back(to_string(a(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

RationalMatrix matrix_from_json(const nlohmann::json& j, std::size_t rows, std::size_t cols) {
    if (!j.is_array() || j.size() != rows) throw ParseError("matrix has wrong row count");
    RationalMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) throw ParseError("matrix row has wrong length");
        for (std::size_t k = 0; k < cols; ++k) {
            const auto& e = j[i][k];
            if (e.is_string()) m(i, k) = parse_rational(e.get<std::string>());
            else if (e.is_number_integer()) m(i, k) = Rational(e.get<long>());
            else throw ParseError("matrix entry must be a string or integer");
        }
    }
    return m;
}

}  // namespace fjc
