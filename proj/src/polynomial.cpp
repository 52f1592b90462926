#include "nilwalk/polynomial.hpp"

#include <algorithm>
#include <sstream>

#include "nilwalk/errors.hpp"

namespace nilwalk {

Monomial Monomial::variable(SeqVariable v, int exponent) {
  Monomial m;
  if (exponent > 0) m.factors_.push_back({v, exponent});
  return m;
}

Monomial Monomial::from_factors(std::vector<VarPower> factors) {
  std::sort(factors.begin(), factors.end());
  Monomial m;
  for (const auto& [v, e] : factors) {
    if (e < 0) throw std::invalid_argument("negative exponent");
    if (e == 0) continue;
    if (!m.factors_.empty() && m.factors_.back().first == v)
      m.factors_.back().second += e;
    else
      m.factors_.push_back({v, e});
  }
  return m;
}

int Monomial::degree() const {
  int d = 0;
  for (const auto& f : factors_) d += f.second;
  return d;
}

int Monomial::homogeneous_degree(const GradedBasis& basis) const {
  int d = 0;
  for (const auto& [v, e] : factors_) d += basis.level_of(v.coord) * e;
  return d;
}

int Monomial::exponent(SeqVariable v) const {
  for (const auto& [w, e] : factors_)
    if (w == v) return e;
  return 0;
}

std::vector<int> Monomial::index_set() const {
  std::vector<int> out;
  for (const auto& f : factors_)
    if (out.empty() || out.back() != f.first.seq) out.push_back(f.first.seq);
  return out;
}

int Monomial::max_seq() const { return factors_.empty() ? 0 : factors_.back().first.seq; }

Monomial Monomial::type_class() const {
  const auto idx = index_set();
  Monomial m;
  m.factors_ = factors_;
  for (auto& f : m.factors_) {
    const auto pos = std::lower_bound(idx.begin(), idx.end(), f.first.seq) - idx.begin();
    f.first.seq = static_cast<int>(pos) + 1;
  }
  return m;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial m;
  m.factors_.reserve(factors_.size() + o.factors_.size());
  auto i = factors_.begin(), j = o.factors_.begin();
  while (i != factors_.end() || j != o.factors_.end()) {
    if (j == o.factors_.end() || (i != factors_.end() && i->first < j->first)) {
      m.factors_.push_back(*i++);
    } else if (i == factors_.end() || j->first < i->first) {
      m.factors_.push_back(*j++);
    } else {
      m.factors_.push_back({i->first, i->second + j->second});
      ++i;
      ++j;
    }
  }
  return m;
}

std::strong_ordering Monomial::operator<=>(const Monomial& o) const {
  if (auto c = degree() <=> o.degree(); c != 0) return c;
  return factors_ <=> o.factors_;
}

Polynomial::Polynomial(const Rational& c) {
  if (sgn(c) != 0) terms_.emplace(Monomial(), c);
}

Polynomial Polynomial::variable(SeqVariable v) { return monomial(Monomial::variable(v), 1); }

Polynomial Polynomial::monomial(const Monomial& m, const Rational& c) {
  Polynomial p;
  p.add_term(m, c);
  return p;
}

Rational Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (inserted) return;
  it->second += c;
  if (sgn(it->second) == 0) terms_.erase(it);
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, t.first.degree());
  return d;
}

int Polynomial::max_seq() const {
  int s = 0;
  for (const auto& t : terms_) s = std::max(s, t.first.max_seq());
  return s;
}

Rational Polynomial::height() const {
  Rational h = 0;
  for (const auto& t : terms_) h = std::max<Rational>(h, abs(t.second));
  return h;
}

Rational Polynomial::l1_norm() const {
  Rational s = 0;
  for (const auto& t : terms_) s += abs(t.second);
  return s;
}

Polynomial Polynomial::operator-() const {
  Polynomial p = *this;
  for (auto& t : p.terms_) t.second = -t.second;
  return p;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& s) {
  if (sgn(s) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.second *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) out.add_term(ma * mb, ca * cb);
  return out;
}

Polynomial pow(const Polynomial& p, int e) {
  if (e < 0) throw std::invalid_argument("negative power");
  Polynomial out(1);
  for (int k = 0; k < e; ++k) out = out * p;
  return out;
}

Polynomial substitute(const Polynomial& p, const Substitution& sub) {
  Polynomial out;
  for (const auto& [m, c] : p.terms()) {
    Polynomial term(c);
    std::vector<VarPower> kept;
    for (const auto& [v, e] : m.factors()) {
      if (const Polynomial* r = sub(v))
        term = term * pow(*r, e);
      else
        kept.push_back({v, e});
    }
    if (!kept.empty()) term = term * Polynomial::monomial(Monomial::from_factors(kept), 1);
    out += term;
  }
  return out;
}

Polynomial rename(const Polynomial& p, const std::function<SeqVariable(SeqVariable)>& map) {
  Polynomial out;
  for (const auto& [m, c] : p.terms()) {
    std::vector<VarPower> f;
    for (const auto& [v, e] : m.factors()) f.push_back({map(v), e});
    out.add_term(Monomial::from_factors(std::move(f)), c);
  }
  return out;
}

std::string to_string(const Polynomial& p, const GradedBasis& basis) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    if (!first) os << (sgn(c) < 0 ? " - " : " + ");
    else if (sgn(c) < 0) os << "-";
    first = false;
    const Rational a = abs(c);
    const bool unit = a == 1 && !m.is_constant();
    if (!unit) os << to_string(a);
    bool lead = unit;
    for (const auto& [v, e] : m.factors()) {
      if (!lead) os << "*";
      lead = false;
      const auto& l = basis.label(v.coord);
      os << "x" << v.seq << "[" << l.level << "," << l.index << "]";
      if (e > 1) os << "^" << e;
    }
  }
  return os.str();
}

nlohmann::json rational_to_json_num(const Rational& r) {
  nlohmann::json j;
  if (r.get_num().fits_slong_p()) j["num"] = r.get_num().get_si();
  else j["num"] = r.get_num().get_str();
  if (r.get_den().fits_slong_p()) j["den"] = r.get_den().get_si();
  else j["den"] = r.get_den().get_str();
  return j;
}

nlohmann::json polynomial_to_json(const Polynomial& p, const GradedBasis& basis) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [m, c] : p.terms()) {
    nlohmann::json mono = nlohmann::json::array();
    for (const auto& [v, e] : m.factors()) {
      const auto& l = basis.label(v.coord);
      mono.push_back({{{"seq", v.seq}, {"label", {l.level, l.index}}}, e});
    }
    nlohmann::json t = rational_to_json_num(c);
    t["monomial"] = mono;
    terms.push_back(t);
  }
  return terms;
}

namespace {
mpz_class json_integer(const nlohmann::json& j) {
  if (j.is_string()) return mpz_class(j.get<std::string>());
  return mpz_class(j.get<long>());
}
}  // namespace

Polynomial polynomial_from_json(const nlohmann::json& j, const GradedBasis& basis) {
  if (!j.is_array()) throw StructuralError("polynomial must be a list of terms");
  Polynomial p;
  for (const auto& t : j) {
    std::vector<VarPower> f;
    for (const auto& vp : t.at("monomial")) {
      const auto& var = vp.at(0);
      const auto label = var.at("label");
      const int coord = basis.index_of({label.at(0).get<int>(), label.at(1).get<int>()});
      f.push_back({{var.at("seq").get<int>(), coord}, vp.at(1).get<int>()});
    }
    Rational c(json_integer(t.at("num")), json_integer(t.value("den", nlohmann::json(1))));
    if (c.get_den() == 0) throw StructuralError("zero denominator");
    c.canonicalize();
    p.add_term(Monomial::from_factors(std::move(f)), c);
  }
  return p;
}

CompiledPolynomialMap::CompiledPolynomialMap(const std::vector<Polynomial>& outputs,
                                             const std::function<int(SeqVariable)>& slot_of) {
  output_begin_.push_back(0);
  for (const auto& p : outputs) {
    for (const auto& [m, c] : p.terms()) {
      Term t{to_double(c), static_cast<int>(factors_.size()), 0};
      for (const auto& [v, e] : m.factors()) {
        factors_.push_back({slot_of(v), e});
        ++t.count;
      }
      terms_.push_back(t);
    }
    output_begin_.push_back(static_cast<int>(terms_.size()));
  }
}

}  // namespace nilwalk
