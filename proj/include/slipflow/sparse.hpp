#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "slipflow/krylov.hpp"

namespace slipflow {

/// Sparse linear combination of unknowns. Stencil code templated on the value
/// type evaluates to one of these when fed unit forms, which yields matrix rows.
class LinearForm {
 public:
  using Term = std::pair<std::size_t, double>;

  LinearForm() = default;
  static LinearForm unit(std::size_t col) {
    LinearForm f;
    f.terms_.push_back({col, 1.0});
    return f;
  }

  const std::vector<Term>& terms() const { return terms_; }

  LinearForm& operator*=(double s) {
    for (auto& t : terms_) t.second *= s;
    return *this;
  }
  LinearForm& operator/=(double s) { return *this *= 1.0 / s; }
  LinearForm& operator+=(const LinearForm& o) { return *this = merge(*this, o, 1.0); }
  LinearForm& operator-=(const LinearForm& o) { return *this = merge(*this, o, -1.0); }

  friend LinearForm operator+(const LinearForm& a, const LinearForm& b) { return merge(a, b, 1.0); }
  friend LinearForm operator-(const LinearForm& a, const LinearForm& b) { return merge(a, b, -1.0); }
  friend LinearForm operator-(LinearForm a) { return a *= -1.0; }
  friend LinearForm operator*(double s, LinearForm a) { return a *= s; }
  friend LinearForm operator*(LinearForm a, double s) { return a *= s; }
  friend LinearForm operator/(LinearForm a, double s) { return a /= s; }

 private:
  static LinearForm merge(const LinearForm& a, const LinearForm& b, double sb) {
    LinearForm r;
    r.terms_.reserve(a.terms_.size() + b.terms_.size());
    auto ia = a.terms_.begin(), ib = b.terms_.begin();
    while (ia != a.terms_.end() || ib != b.terms_.end()) {
      if (ib == b.terms_.end() || (ia != a.terms_.end() && ia->first < ib->first)) {
        r.terms_.push_back(*ia++);
      } else if (ia == a.terms_.end() || ib->first < ia->first) {
        r.terms_.push_back({ib->first, sb * ib->second});
        ++ib;
      } else {
        r.terms_.push_back({ia->first, ia->second + sb * ib->second});
        ++ia;
        ++ib;
      }
    }
    return r;
  }

  std::vector<Term> terms_;  // sorted by column, unique
};

/// Compressed sparse row matrix with sorted column indices.
struct CsrMatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col;
  std::vector<double> val;

  std::size_t nonzeros() const { return val.size(); }

  void multiply(const Vector& x, Vector& y) const {
    for (std::size_t r = 0; r < rows; ++r) {
      double s = 0.0;
      for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) s += val[p] * x[col[p]];
      y[r] = s;
    }
  }

  double at(std::size_t r, std::size_t c) const {
    const auto b = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]);
    const auto e = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]);
    const auto it = std::lower_bound(b, e, c);
    return (it != e && *it == c) ? val[static_cast<std::size_t>(it - col.begin())] : 0.0;
  }

  Vector diagonal() const {
    Vector d(rows);
    for (std::size_t r = 0; r < rows; ++r) d[r] = at(r, r);
    return d;
  }

  /// Appends a row; exact zeros are dropped except on the diagonal.
  void push_row(const LinearForm& f) {
    for (const auto& [c, v] : f.terms())
      if (v != 0.0 || c == rows) {
        col.push_back(c);
        val.push_back(v);
      }
    ++rows;
    row_ptr.push_back(col.size());
  }
};

}  // namespace slipflow
