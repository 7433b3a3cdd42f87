#include "grasslag/polynomial.hpp"

#include <cctype>
#include <sstream>

namespace grasslag {

Polynomial Polynomial::constant(std::vector<std::string> vars, const Rat& value) {
  Polynomial p(std::move(vars));
  if (value != 0) p.terms_.emplace(Exponents(p.vars_.size(), 0), value);
  return p;
}

Polynomial Polynomial::variable(std::vector<std::string> vars, size_t index) {
  if (index >= vars.size()) throw std::invalid_argument("variable index out of range");
  Polynomial p(std::move(vars));
  Exponents e(p.vars_.size(), 0);
  e[index] = 1;
  p.terms_.emplace(std::move(e), Rat(1));
  return p;
}

unsigned Polynomial::total_degree() const {
  if (terms_.empty()) return 0;
  // leading term has maximal total degree under graded-lex
  unsigned d = 0;
  for (unsigned e : terms_.begin()->first) d += e;
  return d;
}

Rat Polynomial::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rat(0) : it->second;
}

void Polynomial::check_compatible(const Polynomial& o) const {
  if (vars_ != o.vars_) throw std::invalid_argument("polynomial variable lists differ");
}

void Polynomial::add_term(const Exponents& e, const Rat& c) {
  if (c == 0) return;
  if (e.size() != vars_.size()) throw std::invalid_argument("exponent arity mismatch");
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::operator-() const {
  Polynomial r(vars_);
  for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  check_compatible(o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  check_compatible(o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.check_compatible(b);
  Polynomial r(a.vars_);
  Polynomial::Exponents e(a.vars_.size());
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

Polynomial& Polynomial::operator*=(const Rat& s) {
  if (s == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Polynomial Polynomial::pow(unsigned e) const {
  Polynomial r = Polynomial::constant(vars_, Rat(1));
  Polynomial base = *this;
  while (e > 0) {
    if (e & 1u) r = r * base;
    e >>= 1u;
    if (e) base = base * base;
  }
  return r;
}

Polynomial Polynomial::derivative(size_t var) const {
  if (var >= vars_.size()) throw std::invalid_argument("derivative variable out of range");
  Polynomial r(vars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents d = e;
    d[var] -= 1;
    r.add_term(d, c * Rat(static_cast<long>(e[var])));
  }
  return r;
}

Rat Polynomial::evaluate(const std::vector<Rat>& point) const {
  if (point.size() != vars_.size()) throw std::invalid_argument("evaluation arity mismatch");
  Rat sum(0);
  for (const auto& [e, c] : terms_) {
    Rat m = c;
    for (size_t i = 0; i < e.size(); ++i) {
      for (unsigned k = 0; k < e[i]; ++k) m *= point[i];
    }
    sum += m;
  }
  return sum;
}

std::complex<double> Polynomial::evaluate(const std::vector<std::complex<double>>& point) const {
  if (point.size() != vars_.size()) throw std::invalid_argument("evaluation arity mismatch");
  std::complex<double> sum = 0.0;
  for (const auto& [e, c] : terms_) {
    std::complex<double> m = rat_d(c);
    for (size_t i = 0; i < e.size(); ++i) {
      for (unsigned k = 0; k < e[i]; ++k) m *= point[i];
    }
    sum += m;
  }
  return sum;
}

double Polynomial::evaluate(const std::vector<double>& point) const {
  if (point.size() != vars_.size()) throw std::invalid_argument("evaluation arity mismatch");
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = rat_d(c);
    for (size_t i = 0; i < e.size(); ++i) {
      for (unsigned k = 0; k < e[i]; ++k) m *= point[i];
    }
    sum += m;
  }
  return sum;
}

bool Polynomial::operator==(const Polynomial& o) const {
  return vars_ == o.vars_ && terms_ == o.terms_;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    Rat a = c;
    if (first) {
      if (a < 0) {
        out << "-";
        a = -a;
      }
    } else {
      out << (a < 0 ? " - " : " + ");
      if (a < 0) a = -a;
    }
    first = false;
    bool any_var = false;
    for (unsigned k : e)
      if (k) any_var = true;
    if (!any_var || a != 1) {
      out << rat_str(a);
      if (any_var) out << "*";
    }
    bool lead = true;
    for (size_t i = 0; i < e.size(); ++i) {
      if (!e[i]) continue;
      if (!lead) out << "*";
      lead = false;
      out << vars_[i];
      if (e[i] > 1) out << "^" << e[i];
    }
  }
  return out.str();
}

RationalFunction::RationalFunction(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (num_.variables() != den_.variables())
    throw std::invalid_argument("rational function variable lists differ");
  if (den_.is_zero()) throw std::invalid_argument("zero denominator polynomial");
}

RationalFunction RationalFunction::from_polynomial(const Polynomial& p) {
  return RationalFunction(p, Polynomial::constant(p.variables(), Rat(1)));
}

RationalFunction RationalFunction::operator-() const { return RationalFunction(-num_, den_); }

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
  return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
  return RationalFunction(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
  return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
  if (b.num_.is_zero()) throw std::invalid_argument("division by zero rational function");
  return RationalFunction(a.num_ * b.den_, a.den_ * b.num_);
}

RationalFunction RationalFunction::derivative(size_t var) const {
  // (p/q)' = (p'q - pq') / q^2, no reduction
  return RationalFunction(num_.derivative(var) * den_ - num_ * den_.derivative(var), den_ * den_);
}

bool RationalFunction::equals(const RationalFunction& o) const {
  return (num_ * o.den_) == (o.num_ * den_);
}

Rat RationalFunction::evaluate(const std::vector<Rat>& point) const {
  Rat d = den_.evaluate(point);
  if (d == 0) throw std::domain_error("rational function evaluated at a denominator zero");
  return num_.evaluate(point) / d;
}

std::complex<double> RationalFunction::evaluate(const std::vector<std::complex<double>>& point) const {
  std::complex<double> d = den_.evaluate(point);
  if (d == std::complex<double>(0.0, 0.0))
    throw std::domain_error("rational function evaluated at a denominator zero");
  return num_.evaluate(point) / d;
}

std::string RationalFunction::str() const { return "(" + num_.str() + ") / (" + den_.str() + ")"; }

namespace {

struct Token {
  enum Kind { Number, Ident, Plus, Minus, Star, Caret, LParen, RParen, End } kind;
  size_t pos;
  std::string text;  // for Number / Ident
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    size_t start = pos_;
    if (pos_ >= text_.size()) return {Token::End, start, ""};
    char c = text_[pos_];
    switch (c) {
      case '+': ++pos_; return {Token::Plus, start, "+"};
      case '-': ++pos_; return {Token::Minus, start, "-"};
      case '*': ++pos_; return {Token::Star, start, "*"};
      case '^': ++pos_; return {Token::Caret, start, "^"};
      case '(': ++pos_; return {Token::LParen, start, "("};
      case ')': ++pos_; return {Token::RParen, start, ")"};
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t p = pos_;
      while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
      // rational literal n/d
      if (p < text_.size() && text_[p] == '/' && p + 1 < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[p + 1]))) {
        ++p;
        while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
      }
      std::string lit = text_.substr(pos_, p - pos_);
      pos_ = p;
      return {Token::Number, start, lit};
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t p = pos_;
      while (p < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[p])) || text_[p] == '_'))
        ++p;
      std::string name = text_.substr(pos_, p - pos_);
      pos_ = p;
      return {Token::Ident, start, name};
    }
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }

 private:
  const std::string& text_;
  size_t pos_ = 0;
};

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& vars)
      : lexer_(text), vars_(vars) {
    advance();
  }

  Polynomial parse() {
    Polynomial p = expr();
    if (cur_.kind != Token::End) throw ParseError("trailing input", cur_.pos);
    return p;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  Polynomial expr() {
    bool neg = false;
    if (cur_.kind == Token::Plus || cur_.kind == Token::Minus) {
      neg = cur_.kind == Token::Minus;
      advance();
    }
    Polynomial p = term();
    if (neg) p = -p;
    while (cur_.kind == Token::Plus || cur_.kind == Token::Minus) {
      bool sub = cur_.kind == Token::Minus;
      advance();
      Polynomial t = term();
      if (sub)
        p -= t;
      else
        p += t;
    }
    return p;
  }

  Polynomial term() {
    Polynomial p = factor();
    while (cur_.kind == Token::Star) {
      advance();
      p = p * factor();
    }
    return p;
  }

  Polynomial factor() {
    Polynomial base = atom();
    if (cur_.kind == Token::Caret) {
      size_t cpos = cur_.pos;
      advance();
      if (cur_.kind == Token::Minus)
        throw ParseError("negative exponents are not allowed", cur_.pos);
      if (cur_.kind != Token::Number || cur_.text.find('/') != std::string::npos)
        throw ParseError("exponent must be a nonnegative integer", cur_.kind == Token::End ? cpos : cur_.pos);
      unsigned long e = std::stoul(cur_.text);
      if (e > 64) throw ParseError("exponent too large", cur_.pos);
      advance();
      return base.pow(static_cast<unsigned>(e));
    }
    return base;
  }

  Polynomial atom() {
    switch (cur_.kind) {
      case Token::Number: {
        Rat v = parse_rational(cur_.text);
        advance();
        return Polynomial::constant(vars_, v);
      }
      case Token::Ident: {
        for (size_t i = 0; i < vars_.size(); ++i) {
          if (vars_[i] == cur_.text) {
            advance();
            return Polynomial::variable(vars_, i);
          }
        }
        throw ParseError("unknown symbol '" + cur_.text + "'", cur_.pos);
      }
      case Token::LParen: {
        advance();
        Polynomial p = expr();
        if (cur_.kind != Token::RParen) throw ParseError("expected ')'", cur_.pos);
        advance();
        return p;
      }
      case Token::Minus: {
        advance();
        return -factor();
      }
      default:
        throw ParseError("expected a number, symbol, or '('", cur_.pos);
    }
  }

  Lexer lexer_;
  const std::vector<std::string>& vars_;
  Token cur_;
};

}  // namespace

Polynomial parse_expression(const std::string& text, const std::vector<std::string>& vars) {
  return Parser(text, vars).parse();
}

namespace {

Polynomial det3(const std::array<std::array<Polynomial, 4>, 4>& m, int rows[3], int cols[3]) {
  Polynomial r = m[rows[0]][cols[0]] * (m[rows[1]][cols[1]] * m[rows[2]][cols[2]] -
                                        m[rows[1]][cols[2]] * m[rows[2]][cols[1]]);
  r -= m[rows[0]][cols[1]] * (m[rows[1]][cols[0]] * m[rows[2]][cols[2]] -
                              m[rows[1]][cols[2]] * m[rows[2]][cols[0]]);
  r += m[rows[0]][cols[2]] * (m[rows[1]][cols[0]] * m[rows[2]][cols[1]] -
                              m[rows[1]][cols[1]] * m[rows[2]][cols[0]]);
  return r;
}

}  // namespace

Polynomial det4(const std::array<std::array<Polynomial, 4>, 4>& m) {
  Polynomial r(m[0][0].variables());
  int sign = 1;
  for (int j = 0; j < 4; ++j) {
    int rows[3] = {1, 2, 3};
    int cols[3];
    int cc = 0;
    for (int k = 0; k < 4; ++k)
      if (k != j) cols[cc++] = k;
    Polynomial minor = det3(m, rows, cols);
    Polynomial contrib = m[0][j] * minor;
    if (sign < 0) contrib = -contrib;
    r += contrib;
    sign = -sign;
  }
  return r;
}

RationalFunction jacobian_determinant(const std::array<RationalFunction, 4>& map) {
  const auto& vars = map[0].num().variables();
  if (vars.size() != 4) throw std::invalid_argument("jacobian_determinant expects 4 variables");
  // Row i of the Jacobian has common denominator q_i^2:
  //   d(p_i/q_i)/dx_j = (dp_i q_i - p_i dq_i) / q_i^2
  // so det J = det(N) / prod q_i^2 with polynomial N_ij.
  std::array<std::array<Polynomial, 4>, 4> n;
  Polynomial den = Polynomial::constant(vars, Rat(1));
  for (int i = 0; i < 4; ++i) {
    const Polynomial& p = map[i].num();
    const Polynomial& q = map[i].den();
    for (int j = 0; j < 4; ++j) n[i][j] = p.derivative(j) * q - p * q.derivative(j);
    den = den * q * q;
  }
  return RationalFunction(det4(n), den);
}

}  // namespace grasslag
