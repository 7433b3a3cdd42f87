#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "grasslag/rational.hpp"

namespace grasslag {

struct ParseError : std::runtime_error {
  size_t position;
  ParseError(const std::string& msg, size_t pos)
      : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"), position(pos) {}
};

// Exponent vectors ordered by total degree, then lexicographically.
// Used as a "greater" comparator so map iteration yields the leading term first.
struct GradedLexGreater {
  bool operator()(const std::vector<unsigned>& a, const std::vector<unsigned>& b) const {
    unsigned da = 0, db = 0;
    for (unsigned e : a) da += e;
    for (unsigned e : b) db += e;
    if (da != db) return da > db;
    return a > b;  // lexicographic on exponent vectors
  }
};

// Sparse multivariate polynomial with exact rational coefficients.
class Polynomial {
 public:
  using Exponents = std::vector<unsigned>;
  using TermMap = std::map<Exponents, Rat, GradedLexGreater>;

  Polynomial() = default;  // zero polynomial in zero variables
  explicit Polynomial(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  static Polynomial constant(std::vector<std::string> vars, const Rat& value);
  static Polynomial variable(std::vector<std::string> vars, size_t index);

  const std::vector<std::string>& variables() const { return vars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t term_count() const { return terms_.size(); }
  unsigned total_degree() const;
  Rat coefficient(const Exponents& e) const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }
  Polynomial& operator*=(const Rat& s);
  friend Polynomial operator*(Polynomial a, const Rat& s) { return a *= s; }
  friend Polynomial operator*(const Rat& s, Polynomial a) { return a *= s; }
  Polynomial pow(unsigned e) const;

  Polynomial derivative(size_t var) const;

  Rat evaluate(const std::vector<Rat>& point) const;
  std::complex<double> evaluate(const std::vector<std::complex<double>>& point) const;
  double evaluate(const std::vector<double>& point) const;

  bool operator==(const Polynomial& o) const;
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  // Deterministic rendering: terms in descending graded-lex order.
  std::string str() const;

  void add_term(const Exponents& e, const Rat& c);

 private:
  void check_compatible(const Polynomial& o) const;

  std::vector<std::string> vars_;
  TermMap terms_;
};

// Quotient of polynomials. No GCD reduction is ever performed; equality is
// decided by cross-multiplication, which is exact.
class RationalFunction {
 public:
  RationalFunction() = default;
  RationalFunction(Polynomial num, Polynomial den);
  static RationalFunction from_polynomial(const Polynomial& p);

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }

  RationalFunction operator-() const;
  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);

  RationalFunction derivative(size_t var) const;

  // Cross-multiplication equality: num*o.den == o.num*den, exact.
  bool equals(const RationalFunction& o) const;

  Rat evaluate(const std::vector<Rat>& point) const;  // throws on zero denominator
  std::complex<double> evaluate(const std::vector<std::complex<double>>& point) const;

  std::string str() const;

 private:
  Polynomial num_, den_;
};

// Parses +, -, *, ^ with parentheses, integer/rational literals, and the given
// variable names. Unknown symbols, syntax errors, and negative or fractional
// exponents raise ParseError with a character offset.
Polynomial parse_expression(const std::string& text, const std::vector<std::string>& vars);

Polynomial det4(const std::array<std::array<Polynomial, 4>, 4>& m);

// Exact Jacobian determinant of a 4-component rational map in 4 variables.
RationalFunction jacobian_determinant(const std::array<RationalFunction, 4>& map);

}  // namespace grasslag
