#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

namespace fjc {

using Rational = mpq_class;
using Column = std::vector<Rational>;

/// "p/q" in lowest terms, "p" when q == 1.
std::string to_string(const Rational& q);
/// Accepts "p", "p/q" or "-p/q"; throws ParseError otherwise.
Rational parse_rational(const std::string& s);

/// Dense row-major matrix over Q. A 0 x n or n x 0 matrix is a valid zero map.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols);
    RationalMatrix(std::size_t rows, std::size_t cols, std::vector<Rational> entries);

    static RationalMatrix identity(std::size_t n);
    static RationalMatrix from_rows(const std::vector<std::vector<Rational>>& rows);
    static RationalMatrix from_ints(const std::vector<std::vector<long>>& rows);
    /// Columns must all have length `rows`.
    static RationalMatrix from_columns(std::size_t rows, const std::vector<Column>& cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::vector<Rational>& entries() const { return a_; }

    Rational& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    Column column(std::size_t j) const;
    RationalMatrix transpose() const;
    bool is_zero() const;
    bool is_identity() const;

    friend bool operator==(const RationalMatrix& a, const RationalMatrix& b);
    friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
    friend RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b);
    friend RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b);
    friend RationalMatrix operator*(const Rational& s, const RationalMatrix& a);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> a_;
};

Column apply(const RationalMatrix& a, const Column& x);

std::size_t rank(const RationalMatrix& a);
/// Basis of the right null space; empty iff `a` is injective.
std::vector<Column> kernel_basis(const RationalMatrix& a);
/// Some x with a x = b, or nullopt when inconsistent. Throws DimensionMismatch.
std::optional<Column> solve(const RationalMatrix& a, const Column& b);

/// X with a X = b, or nullopt.
std::optional<RationalMatrix> solve_matrix(const RationalMatrix& a, const RationalMatrix& b);
std::optional<RationalMatrix> inverse(const RationalMatrix& a);

/// Matrix whose columns are the pivot columns of `a` (a basis of its image).
RationalMatrix image_basis(const RationalMatrix& a);
/// Matrix whose columns span ker(a).
RationalMatrix kernel_matrix(const RationalMatrix& a);
/// Surjection p with ker(p) = im(a); rows form a basis of the left null space.
RationalMatrix cokernel_projection(const RationalMatrix& a);

bool same_column_space(const RationalMatrix& a, const RationalMatrix& b);
bool column_space_contains(const RationalMatrix& big, const RationalMatrix& small);

RationalMatrix hstack(const RationalMatrix& a, const RationalMatrix& b);
RationalMatrix vstack(const RationalMatrix& a, const RationalMatrix& b);
RationalMatrix block_diag(const RationalMatrix& a, const RationalMatrix& b);
RationalMatrix kron(const RationalMatrix& a, const RationalMatrix& b);

/// Homogeneous system in unknown matrix blocks: each equation is
/// sum_k left_k * X_{block_k} * right_k = 0.
class BlockSystem {
public:
    struct Term {
        RationalMatrix left;
        std::size_t block;
        RationalMatrix right;
    };

    std::size_t add_block(std::size_t rows, std::size_t cols);
    void add_equation(const std::vector<Term>& terms);
    std::size_t unknowns() const { return total_; }
    std::size_t block_count() const { return shapes_.size(); }
    /// Basis of the solution space, each element given as one matrix per block.
    std::vector<std::vector<RationalMatrix>> solution_basis() const;

private:
    std::vector<std::pair<std::size_t, std::size_t>> shapes_;
    std::vector<std::size_t> offsets_;
    std::size_t total_ = 0;
    std::vector<std::vector<Rational>> rows_;
};

nlohmann::json to_json(const RationalMatrix& a);
RationalMatrix matrix_from_json(const nlohmann::json& j, std::size_t rows, std::size_t cols);

}  // namespace fjc
