#pragma once

#include <optional>
#include <vector>

#include "maninlab/arith.hpp"
#include "maninlab/finite_field.hpp"

namespace maninlab {

using IVec = std::vector<long long>;
using QVec = std::vector<BigRational>;
using QMat = std::vector<QVec>;

QVec to_q(const IVec& v);
QMat to_q(const std::vector<IVec>& rows);
BigRational dot(const QVec& a, const QVec& b);
long long dot(const IVec& a, const IVec& b);

// Reduced row echelon form in place; returns the pivot columns.
std::vector<std::size_t> rref(QMat& a);
std::size_t rank(const QMat& a);
std::size_t rank(const std::vector<IVec>& rows);
BigRational det(const QMat& a);
BigInt det(const std::vector<IVec>& rows);
std::optional<QMat> inverse(const QMat& a);
// Some x with a x = b, or nothing when the system is inconsistent.
std::optional<QVec> solve(const QMat& a, const QVec& b);
// Basis of {x : a x = 0}; ncols is needed when a has no rows.
std::vector<QVec> nullspace(const QMat& a, std::size_t ncols);
// Smallest integer vector on the ray of v (v nonzero).
IVec primitive(const QVec& v);
IVec primitive(const IVec& v);

// Linear algebra over a finite field; matrices are row lists.
using FqRow = std::vector<FiniteField::Elem>;
std::size_t fq_rref(const FiniteField& k, std::vector<FqRow>& rows, std::vector<std::size_t>* pivots = nullptr);
std::size_t fq_rank(const FiniteField& k, std::vector<FqRow> rows);
std::vector<FqRow> fq_nullspace(const FiniteField& k, std::vector<FqRow> rows, std::size_t ncols);
// Dimension of the solution set of rows x = rhs, or nothing if empty.
std::optional<std::size_t> fq_affine_dim(const FiniteField& k, std::vector<FqRow> rows, const FqRow& rhs,
                                         std::size_t ncols);

}  // namespace maninlab
