#pragma once

#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include "uvman/errors.hpp"

namespace uvman {

// Reduced fraction with positive denominator. Used for power exponents.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d);
  Rational(long long n) : num(n), den(1) {}

  bool integer() const { return den == 1; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

// Shared tables for one (vars, order) combination: the graded-lex monomial
// enumeration, binomials, and the gather table that drives truncated
// products. Built once, interned in a registry, immutable afterwards.
//
// Monomial order: primary key total degree, secondary key lexicographic with
// larger exponent on the earlier variable first, so index 0 is the constant
// and each degree occupies one contiguous block.
class JetShape {
 public:
  static std::shared_ptr<const JetShape> get(int vars, int order);

  int vars() const { return vars_; }
  int order() const { return order_; }
  std::size_t count() const { return degree_start_[static_cast<std::size_t>(order_) + 1]; }
  // number of monomials of total degree <= d
  std::size_t count_up_to(int d) const { return degree_start_[static_cast<std::size_t>(d) + 1]; }
  int degree_of(std::size_t i) const { return degree_[i]; }
  std::span<const int> exponents_of(std::size_t i) const {
    return {exps_.data() + i * static_cast<std::size_t>(vars_), static_cast<std::size_t>(vars_)};
  }
  std::size_t index_of(std::span<const int> exponents) const;

  std::span<const std::size_t> pair_start() const { return pair_start_; }
  std::span<const std::uint32_t> pair_a() const { return pair_a_; }
  std::span<const std::uint32_t> pair_b() const { return pair_b_; }
  std::size_t pair_count() const { return pair_a_.size(); }

 private:
  JetShape(int vars, int order);

  std::uint64_t binom(int n, int k) const;

  int vars_;
  int order_;
  std::vector<std::uint64_t> binom_;        // (order+vars+1) x (vars+1), row-major
  std::vector<std::size_t> degree_start_;   // per-degree block offsets, size order+2
  std::vector<std::uint8_t> degree_;        // total degree per monomial
  std::vector<int> exps_;                   // exponent rows, count * vars
  std::vector<std::size_t> pair_start_;     // per-target offsets into pair_a_/pair_b_
  std::vector<std::uint32_t> pair_a_, pair_b_;
};

// Truncated multivariate Taylor expansion of a scalar field about the chart
// base point. Coefficients are plain polynomial coefficients in the
// displacement variables (the 1/alpha! factor is absorbed). Value type,
// immutable in practice: every operation returns a fresh jet.
//
// valid_degree tracks how far the coefficients are trustworthy; consumers
// must not read past it. add/mul take the min of the operands, div and the
// analytic builtins preserve it, partial lowers it by one.
class Jet {
 public:
  Jet() = default;
  explicit Jet(std::shared_ptr<const JetShape> shape, double constant = 0.0);

  // base_value + displacement of coordinate `var` (identity chart function)
  static Jet variable(std::shared_ptr<const JetShape> shape, int var, double base_value);

  // jet with explicitly given coefficients (graded-lex order, shape.count() many)
  static Jet from_coefficients(std::shared_ptr<const JetShape> shape,
                               std::span<const double> coefficients, int valid_degree);

  const std::shared_ptr<const JetShape>& shape() const { return shape_; }
  int vars() const { return shape_->vars(); }
  int order() const { return shape_->order(); }
  int valid_degree() const { return valid_; }

  double coeff(std::size_t i) const { return c_[i]; }
  double constant_term() const { return c_[0]; }
  double coeff(std::span<const int> exponents) const { return c_[shape_->index_of(exponents)]; }
  std::span<const double> coeffs() const { return c_; }

  Jet with_valid_degree(int v) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator+=(double s) { c_[0] += s; return *this; }
  Jet& operator-=(double s) { c_[0] -= s; return *this; }
  Jet& operator*=(double s);

  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet div(const Jet& a, const Jet& b);
  friend Jet partial(const Jet& a, int var);
  friend Jet compose_series(const Jet& a, std::span<const double> series);

 private:
  void check_same_shape(const Jet& o) const;

  std::shared_ptr<const JetShape> shape_;
  int valid_ = 0;
  std::vector<double> c_;
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator+(Jet a, double s);
Jet operator+(double s, Jet a);
Jet operator-(Jet a, double s);
Jet operator-(double s, const Jet& a);
Jet operator-(const Jet& a);
Jet operator*(Jet a, double s);
Jet operator*(double s, Jet a);
Jet operator*(const Jet& a, const Jet& b);

// truncated quotient; the divisor needs a nonzero constant term
Jet div(const Jet& a, const Jet& b);

// formal partial derivative with respect to coordinate `var`
Jet partial(const Jet& a, int var);

Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
// a^p: integer p by repeated multiplication (any base, nonzero constant for
// p < 0); fractional p by the binomial series (positive constant term)
Jet pow(const Jet& a, const Rational& p);

// max |coefficient| over total degree <= d; requires d <= valid_degree
double norm_up_to(const Jet& a, int d);

// max |a - b| coefficientwise over total degree <= d
double max_coeff_difference(const Jet& a, const Jet& b, int d);

// polynomial evaluation at a displacement from the base point,
// using coefficients up to the valid degree
double value_at(const Jet& a, std::span<const double> displacement);

bool all_finite(const Jet& a);

// composition sum_k series[k] * (a - a0)^k by Horner; series must hold
// order()+1 coefficients
Jet compose_series(const Jet& a, std::span<const double> series);

namespace kernel {

// Straightforward scatter product with on-the-fly index computation.
// Slow but independent of the gather table; kept as the testing reference.
void mul_reference(const JetShape& s, const double* a, const double* b, double* out);

// Table-driven gather product. Accumulation order per target matches the
// reference exactly, so results are bitwise identical, parallel or not.
void mul_gather(const JetShape& s, const double* a, const double* b, double* out, bool parallel);

// pair-count threshold above which operator* runs the gather loop in parallel
std::size_t parallel_threshold();

}  // namespace kernel

}  // namespace uvman
