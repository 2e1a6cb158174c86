#include "uvman/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

namespace uvman {

namespace {

long long gcd_ll(long long a, long long b) {
  while (b != 0) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

}  // namespace

Rational::Rational(long long n, long long d) : num(n), den(d) {
  if (den == 0) throw DomainError("rational exponent with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  long long g = gcd_ll(num == 0 ? den : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num == 0) den = 1;
}

// ---------------------------------------------------------------------------
// JetShape
// ---------------------------------------------------------------------------

JetShape::JetShape(int vars, int order) : vars_(vars), order_(order) {
  const int rows = order_ + vars_ + 1;
  const int cols = vars_ + 1;
  binom_.assign(static_cast<std::size_t>(rows) * cols, 0);
  for (int n = 0; n < rows; ++n) {
    binom_[static_cast<std::size_t>(n) * cols] = 1;
    for (int k = 1; k <= std::min(n, vars_); ++k) {
      std::uint64_t v = binom_[static_cast<std::size_t>(n - 1) * cols + (k - 1)];
      if (n - 1 >= k) v += binom_[static_cast<std::size_t>(n - 1) * cols + k];
      binom_[static_cast<std::size_t>(n) * cols + k] = v;
    }
  }

  // enumerate monomials degree block by degree block, within a block the
  // earlier variable carries the larger exponent first
  degree_start_.assign(static_cast<std::size_t>(order_) + 2, 0);
  std::vector<int> e(static_cast<std::size_t>(vars_), 0);
  auto emit = [&](int d) {
    exps_.insert(exps_.end(), e.begin(), e.end());
    degree_.push_back(static_cast<std::uint8_t>(d));
  };
  auto gen = [&](auto&& self, int var, int rem, int d) -> void {
    if (var == vars_ - 1) {
      e[static_cast<std::size_t>(var)] = rem;
      emit(d);
      return;
    }
    for (int v = rem; v >= 0; --v) {
      e[static_cast<std::size_t>(var)] = v;
      self(self, var + 1, rem - v, d);
    }
    e[static_cast<std::size_t>(var)] = 0;
  };
  for (int d = 0; d <= order_; ++d) {
    degree_start_[static_cast<std::size_t>(d)] = degree_.size();
    gen(gen, 0, d, d);
  }
  degree_start_[static_cast<std::size_t>(order_) + 1] = degree_.size();

  // gather table for truncated products: all pairs (i, j) with
  // deg(i) + deg(j) <= order, grouped by target monomial, (i, j)-ordered
  // within each group (stable counting sort keeps the insertion order)
  const std::size_t n = count();
  std::vector<std::size_t> cnt(n + 1, 0);
  std::vector<int> sum(static_cast<std::size_t>(vars_));
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) total += count_up_to(order_ - degree_[i]);
  std::vector<std::uint32_t> tgt(total);
  std::size_t p = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int* ei = exps_.data() + i * static_cast<std::size_t>(vars_);
    const std::size_t jmax = count_up_to(order_ - degree_[i]);
    for (std::size_t j = 0; j < jmax; ++j, ++p) {
      const int* ej = exps_.data() + j * static_cast<std::size_t>(vars_);
      for (int v = 0; v < vars_; ++v) sum[static_cast<std::size_t>(v)] = ei[v] + ej[v];
      const std::size_t t = index_of(sum);
      tgt[p] = static_cast<std::uint32_t>(t);
      ++cnt[t + 1];
    }
  }
  pair_start_.assign(n + 1, 0);
  for (std::size_t t = 0; t < n; ++t) pair_start_[t + 1] = pair_start_[t] + cnt[t + 1];
  pair_a_.resize(total);
  pair_b_.resize(total);
  std::vector<std::size_t> cursor(pair_start_.begin(), pair_start_.end() - 1);
  p = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t jmax = count_up_to(order_ - degree_[i]);
    for (std::size_t j = 0; j < jmax; ++j, ++p) {
      const std::size_t slot = cursor[tgt[p]]++;
      pair_a_[slot] = static_cast<std::uint32_t>(i);
      pair_b_[slot] = static_cast<std::uint32_t>(j);
    }
  }
}

std::uint64_t JetShape::binom(int n, int k) const {
  if (k < 0 || k > vars_ || n < 0 || n < k) return 0;
  return binom_[static_cast<std::size_t>(n) * (vars_ + 1) + k];
}

std::size_t JetShape::index_of(std::span<const int> exponents) const {
  int d = 0;
  for (int v = 0; v < vars_; ++v) d += exponents[static_cast<std::size_t>(v)];
  std::size_t pos = degree_start_[static_cast<std::size_t>(d)];
  int rem = d;
  for (int v = 0; v + 1 < vars_; ++v) {
    const int e = exponents[static_cast<std::size_t>(v)];
    const int k = vars_ - 1 - v;  // variables after v
    pos += binom(rem - e - 1 + k, k);
    rem -= e;
  }
  return pos;
}

std::shared_ptr<const JetShape> JetShape::get(int vars, int order) {
  if (vars < 1) throw Error("jet shape needs at least one variable");
  if (order < 0 || order > 200) throw Error("jet truncation order out of range");
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetShape>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{vars, order}];
  if (!slot) slot = std::shared_ptr<const JetShape>(new JetShape(vars, order));
  return slot;
}

// ---------------------------------------------------------------------------
// kernels
// ---------------------------------------------------------------------------

namespace kernel {

std::size_t parallel_threshold() { return 32768; }

void mul_reference(const JetShape& s, const double* a, const double* b, double* out) {
  const std::size_t n = s.count();
  std::fill(out, out + n, 0.0);
  const int m = s.vars();
  std::vector<int> sum(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ei = s.exponents_of(i);
    const std::size_t jmax = s.count_up_to(s.order() - s.degree_of(i));
    for (std::size_t j = 0; j < jmax; ++j) {
      const auto ej = s.exponents_of(j);
      for (int v = 0; v < m; ++v) sum[static_cast<std::size_t>(v)] = ei[static_cast<std::size_t>(v)] + ej[static_cast<std::size_t>(v)];
      out[s.index_of(sum)] += a[i] * b[j];
    }
  }
}

void mul_gather(const JetShape& s, const double* a, const double* b, double* out, bool parallel) {
  const auto ps = s.pair_start();
  const std::uint32_t* pa = s.pair_a().data();
  const std::uint32_t* pb = s.pair_b().data();
  const auto n = static_cast<std::int64_t>(s.count());
  (void)parallel;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (std::int64_t t = 0; t < n; ++t) {
    double acc = 0.0;
    const std::size_t end = ps[static_cast<std::size_t>(t) + 1];
    for (std::size_t p = ps[static_cast<std::size_t>(t)]; p < end; ++p) acc += a[pa[p]] * b[pb[p]];
    out[t] = acc;
  }
}

}  // namespace kernel

// ---------------------------------------------------------------------------
// Jet
// ---------------------------------------------------------------------------

Jet::Jet(std::shared_ptr<const JetShape> shape, double constant)
    : shape_(std::move(shape)), valid_(shape_->order()), c_(shape_->count(), 0.0) {
  c_[0] = constant;
}

Jet Jet::variable(std::shared_ptr<const JetShape> shape, int var, double base_value) {
  if (var < 0 || var >= shape->vars()) throw Error("coordinate index out of range");
  Jet j(std::move(shape), base_value);
  if (j.order() >= 1) j.c_[1 + static_cast<std::size_t>(var)] = 1.0;
  return j;
}

Jet Jet::from_coefficients(std::shared_ptr<const JetShape> shape,
                           std::span<const double> coefficients, int valid_degree) {
  if (coefficients.size() != shape->count())
    throw ShapeMismatch("coefficient vector does not match the shape");
  Jet j(std::move(shape));
  std::copy(coefficients.begin(), coefficients.end(), j.c_.begin());
  if (!all_finite(j)) throw DomainError("jet coefficients must be finite");
  return j.with_valid_degree(valid_degree);
}

Jet Jet::with_valid_degree(int v) const {
  if (v < 0 || v > order()) throw InsufficientOrder("valid degree out of range");
  Jet j(*this);
  j.valid_ = v;
  return j;
}

void Jet::check_same_shape(const Jet& o) const {
  if (!shape_ || !o.shape_ || shape_->vars() != o.shape_->vars() ||
      shape_->order() != o.shape_->order())
    throw ShapeMismatch("jet operands have different shapes");
}

Jet& Jet::operator+=(const Jet& o) {
  check_same_shape(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  valid_ = std::min(valid_, o.valid_);
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  check_same_shape(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  valid_ = std::min(valid_, o.valid_);
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator+(Jet a, double s) { return a += s; }
Jet operator+(double s, Jet a) { return a += s; }
Jet operator-(Jet a, double s) { return a -= s; }
Jet operator*(Jet a, double s) { return a *= s; }
Jet operator*(double s, Jet a) { return a *= s; }

Jet operator-(const Jet& a) {
  Jet r(a);
  r *= -1.0;
  return r;
}

Jet operator-(double s, const Jet& a) { return -a + s; }

Jet operator*(const Jet& a, const Jet& b) {
  a.check_same_shape(b);
  Jet r(a.shape_);
  r.valid_ = std::min(a.valid_, b.valid_);
  const bool par = a.shape_->pair_count() >= kernel::parallel_threshold();
  kernel::mul_gather(*a.shape_, a.c_.data(), b.c_.data(), r.c_.data(), par);
  return r;
}

Jet div(const Jet& a, const Jet& b) {
  a.check_same_shape(b);
  const double b0 = b.c_[0];
  if (b0 == 0.0) throw SingularDivision("division by jet with zero constant term");
  Jet q(a.shape_);
  q.valid_ = std::min(a.valid_, b.valid_);
  const auto& s = *a.shape_;
  const auto ps = s.pair_start();
  const std::uint32_t* pa = s.pair_a().data();
  const std::uint32_t* pb = s.pair_b().data();
  const std::size_t n = s.count();
  // long division in graded order: every pair feeding target t with a
  // nonconstant divisor factor references quotient entries strictly below t
  for (std::size_t t = 0; t < n; ++t) {
    double acc = 0.0;
    for (std::size_t p = ps[t]; p < ps[t + 1]; ++p) {
      if (pb[p] == 0) continue;
      acc += q.c_[pa[p]] * b.c_[pb[p]];
    }
    q.c_[t] = (a.c_[t] - acc) / b0;
  }
  return q;
}

Jet partial(const Jet& a, int var) {
  if (var < 0 || var >= a.vars()) throw Error("coordinate index out of range");
  if (a.valid_degree() < 1)
    throw InsufficientOrder("partial derivative of a jet with no valid degree left");
  const auto& s = *a.shape();
  Jet r(a.shape());
  r.valid_ = a.valid_degree() - 1;
  const int m = s.vars();
  std::vector<int> e(static_cast<std::size_t>(m));
  for (std::size_t i = 1; i < s.count(); ++i) {
    const auto ei = s.exponents_of(i);
    const int ev = ei[static_cast<std::size_t>(var)];
    if (ev == 0) continue;
    for (int v = 0; v < m; ++v) e[static_cast<std::size_t>(v)] = ei[static_cast<std::size_t>(v)];
    e[static_cast<std::size_t>(var)] = ev - 1;
    r.c_[s.index_of(e)] = static_cast<double>(ev) * a.coeff(i);
  }
  return r;
}

Jet compose_series(const Jet& a, std::span<const double> series) {
  Jet w(a);
  w.c_[0] = 0.0;
  const int K = a.order();
  Jet r(a.shape(), series[static_cast<std::size_t>(K)]);
  for (int k = K - 1; k >= 0; --k) {
    r = r * w;
    r += series[static_cast<std::size_t>(k)];
  }
  return r.with_valid_degree(a.valid_degree());
}

namespace {

std::vector<double> series_buffer(const Jet& a) {
  return std::vector<double>(static_cast<std::size_t>(a.order()) + 1, 0.0);
}

}  // namespace

Jet exp(const Jet& a) {
  auto c = series_buffer(a);
  c[0] = std::exp(a.constant_term());
  for (std::size_t k = 1; k < c.size(); ++k) c[k] = c[k - 1] / static_cast<double>(k);
  return compose_series(a, c);
}

Jet log(const Jet& a) {
  const double a0 = a.constant_term();
  if (!(a0 > 0.0)) throw DomainError("log of jet with nonpositive constant term");
  auto c = series_buffer(a);
  c[0] = std::log(a0);
  if (c.size() > 1) c[1] = 1.0 / a0;
  for (std::size_t k = 2; k < c.size(); ++k)
    c[k] = -c[k - 1] * static_cast<double>(k - 1) / (static_cast<double>(k) * a0);
  return compose_series(a, c);
}

Jet sqrt(const Jet& a) {
  const double a0 = a.constant_term();
  if (!(a0 > 0.0)) throw DomainError("sqrt of jet with nonpositive constant term");
  auto c = series_buffer(a);
  c[0] = std::sqrt(a0);
  for (std::size_t k = 1; k < c.size(); ++k)
    c[k] = c[k - 1] * (0.5 - static_cast<double>(k - 1)) / (static_cast<double>(k) * a0);
  return compose_series(a, c);
}

Jet sin(const Jet& a) {
  auto c = series_buffer(a);
  const double s = std::sin(a.constant_term());
  const double co = std::cos(a.constant_term());
  const double cycle[4] = {s, co, -s, -co};
  double fact = 1.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    c[k] = cycle[k % 4] / fact;
  }
  return compose_series(a, c);
}

Jet cos(const Jet& a) {
  auto c = series_buffer(a);
  const double s = std::sin(a.constant_term());
  const double co = std::cos(a.constant_term());
  const double cycle[4] = {co, -s, -co, s};
  double fact = 1.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    c[k] = cycle[k % 4] / fact;
  }
  return compose_series(a, c);
}

Jet pow(const Jet& a, const Rational& p) {
  if (p.integer()) {
    long long e = p.num;
    if (e == 0) return Jet(a.shape(), 1.0).with_valid_degree(a.valid_degree());
    if (e < 0) return div(Jet(a.shape(), 1.0), pow(a, Rational(-e)));
    Jet result(a.shape(), 1.0);
    result = result.with_valid_degree(a.valid_degree());
    Jet base(a);
    while (true) {
      if (e & 1) result = result * base;
      e >>= 1;
      if (e == 0) break;
      base = base * base;
    }
    return result;
  }
  const double a0 = a.constant_term();
  if (!(a0 > 0.0))
    throw DomainError("fractional power of jet with nonpositive constant term");
  const double pv = p.value();
  auto c = series_buffer(a);
  c[0] = std::pow(a0, pv);
  for (std::size_t k = 1; k < c.size(); ++k)
    c[k] = c[k - 1] * (pv - static_cast<double>(k - 1)) / (static_cast<double>(k) * a0);
  return compose_series(a, c);
}

double norm_up_to(const Jet& a, int d) {
  if (d < 0) return 0.0;
  if (d > a.valid_degree())
    throw InsufficientOrder("norm requested beyond the valid degree");
  const std::size_t n = a.shape()->count_up_to(d);
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a.coeff(i)));
  return m;
}

double max_coeff_difference(const Jet& a, const Jet& b, int d) {
  if (a.vars() != b.vars() || a.order() != b.order())
    throw ShapeMismatch("jet operands have different shapes");
  const std::size_t n = a.shape()->count_up_to(d);
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a.coeff(i) - b.coeff(i)));
  return m;
}

double value_at(const Jet& a, std::span<const double> displacement) {
  const auto& s = *a.shape();
  double sum = 0.0;
  const std::size_t n = s.count_up_to(a.valid_degree());
  for (std::size_t i = 0; i < n; ++i) {
    double term = a.coeff(i);
    if (term == 0.0) continue;
    const auto e = s.exponents_of(i);
    for (int v = 0; v < s.vars(); ++v)
      for (int k = 0; k < e[static_cast<std::size_t>(v)]; ++k) term *= displacement[static_cast<std::size_t>(v)];
    sum += term;
  }
  return sum;
}

bool all_finite(const Jet& a) {
  const std::size_t n = a.shape()->count_up_to(a.valid_degree());
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(a.coeff(i))) return false;
  return true;
}

}  // namespace uvman
