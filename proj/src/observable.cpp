#include "rslab/observable.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace rslab {

Polynomial Polynomial::constant(double c, std::size_t n) {
  Polynomial p;
  p.terms.push_back({c, std::vector<int>(n, 0)});
  return p;
}

Polynomial Polynomial::variable(std::size_t var, std::size_t n, double c) {
  if (var < 1 || var > n) throw IndexRangeError("Polynomial::variable: index out of range");
  Polynomial p;
  std::vector<int> pw(n, 0);
  pw[var - 1] = 1;
  p.terms.push_back({c, std::move(pw)});
  return p;
}

Polynomial& Polynomial::add_term(double coef, std::vector<int> powers) {
  terms.push_back({coef, std::move(powers)});
  return *this;
}

void Polynomial::validate(std::size_t n) const {
  for (const Term& t : terms) {
    if (t.powers.size() != n)
      throw IndexRangeError("polynomial term has " + std::to_string(t.powers.size()) +
                            " exponents, expected " + std::to_string(n));
    if (std::any_of(t.powers.begin(), t.powers.end(), [](int e) { return e < 0; }))
      throw IndexRangeError("polynomial exponents must be non-negative");
  }
}

std::size_t Polynomial::variables() const {
  return terms.empty() ? 0 : terms.front().powers.size();
}

Observable Observable::I(int k) {
  Observable o;
  o.kind_ = ObservableKind::power_trace;
  o.a_ = k;
  return o;
}

Observable Observable::I1(int k) {
  Observable o;
  o.kind_ = ObservableKind::weighted_trace;
  o.a_ = k;
  return o;
}

Observable Observable::H() {
  Observable o;
  o.kind_ = ObservableKind::hamiltonian;
  return o;
}

Observable Observable::Momentum() {
  Observable o;
  o.kind_ = ObservableKind::momentum;
  return o;
}

Observable Observable::C(int k, int j) {
  Observable o;
  o.kind_ = ObservableKind::wojciechowski;
  o.a_ = k;
  o.b_ = j;
  return o;
}

Observable Observable::K(int j) {
  Observable o;
  o.kind_ = ObservableKind::extra_k;
  o.a_ = j;
  return o;
}

Observable Observable::L(int j) {
  Observable o;
  o.kind_ = ObservableKind::extra_l;
  o.a_ = j;
  return o;
}

Observable Observable::UserPoly(Polynomial poly) {
  Observable o;
  o.kind_ = ObservableKind::user_poly;
  o.poly_ = std::move(poly);
  return o;
}

Observable Observable::UserF(std::vector<Polynomial> u_maps) {
  Observable o;
  o.kind_ = ObservableKind::user_f;
  o.u_maps_ = std::move(u_maps);
  return o;
}

Observable Observable::Product(Observable f, Observable g) {
  Observable o;
  o.kind_ = ObservableKind::product;
  o.lhs_ = std::make_shared<const Observable>(std::move(f));
  o.rhs_ = std::make_shared<const Observable>(std::move(g));
  return o;
}

namespace {

std::vector<int> parse_ints(const std::string& s, const std::string& id) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int v = 0;
    const char* b = item.data();
    const char* e = b + item.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) throw ConfigError("bad observable index in '" + id + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

Observable Observable::parse(const std::string& id) {
  if (id == "H" || id == "h") return H();
  if (id == "P" || id == "Momentum") return Momentum();
  const auto colon = id.find(':');
  if (colon == std::string::npos) throw ConfigError("unknown observable id '" + id + "'");
  const std::string tag = id.substr(0, colon);
  const std::vector<int> idx = parse_ints(id.substr(colon + 1), id);
  auto need = [&](std::size_t count) {
    if (idx.size() != count) throw ConfigError("observable '" + id + "' has wrong index count");
  };
  if (tag == "I") {
    need(1);
    return I(idx[0]);
  }
  if (tag == "I1") {
    need(1);
    return I1(idx[0]);
  }
  if (tag == "C") {
    need(2);
    return C(idx[0], idx[1]);
  }
  if (tag == "K") {
    need(1);
    return K(idx[0]);
  }
  if (tag == "L") {
    need(1);
    return L(idx[0]);
  }
  throw ConfigError("unknown observable id '" + id + "'");
}

std::string Observable::id() const {
  switch (kind_) {
    case ObservableKind::power_trace:
      return "I:" + std::to_string(a_);
    case ObservableKind::weighted_trace:
      return "I1:" + std::to_string(a_);
    case ObservableKind::hamiltonian:
      return "H";
    case ObservableKind::momentum:
      return "P";
    case ObservableKind::wojciechowski:
      return "C:" + std::to_string(a_) + "," + std::to_string(b_);
    case ObservableKind::extra_k:
      return "K:" + std::to_string(a_);
    case ObservableKind::extra_l:
      return "L:" + std::to_string(a_);
    case ObservableKind::user_poly:
      return "UserPoly";
    case ObservableKind::user_f:
      return "UserF";
    case ObservableKind::product:
      return "(" + lhs_->id() + ")*(" + rhs_->id() + ")";
  }
  return "?";
}

void Observable::check_ranges(int n) const {
  auto fail = [&](const std::string& why) {
    throw IndexRangeError("observable " + id() + ": " + why + " (n=" + std::to_string(n) + ")");
  };
  switch (kind_) {
    case ObservableKind::power_trace:
    case ObservableKind::weighted_trace:
      if (std::abs(a_) > max_trace_power(n)) fail("|k| must be <= 4n+2");
      break;
    case ObservableKind::hamiltonian:
    case ObservableKind::momentum:
      break;
    case ObservableKind::wojciechowski:
      if (a_ < 1 || a_ > n || b_ < 1 || b_ > n) fail("k, j must lie in 1..n");
      if (a_ == b_) fail("k != j required");
      break;
    case ObservableKind::extra_k:
    case ObservableKind::extra_l:
      if (a_ < 2 || a_ > n) fail("j must lie in 2..n");
      break;
    case ObservableKind::user_poly:
      poly_.validate(static_cast<std::size_t>(n));
      break;
    case ObservableKind::user_f:
      if (u_maps_.size() != static_cast<std::size_t>(n)) fail("UserF needs n U-components");
      for (const Polynomial& p : u_maps_) p.validate(static_cast<std::size_t>(n));
      break;
    case ObservableKind::product:
      lhs_->check_ranges(n);
      rhs_->check_ranges(n);
      break;
  }
}

bool Observable::is_spectral(int n) const {
  switch (kind_) {
    case ObservableKind::power_trace:
    case ObservableKind::hamiltonian:
    case ObservableKind::momentum:
    case ObservableKind::user_poly:
      return true;
    case ObservableKind::product:
      return lhs_->is_spectral(n) && rhs_->is_spectral(n);
    default:
      return false;
  }
}

double evaluate(const Observable& obs, const PhasePoint& point, const ModelConfig& cfg) {
  cfg.validate();
  validate_point(point, cfg);
  obs.check_ranges(cfg.n);
  LaxInvariants<double> inv(as_generic(point), cfg);
  return obs.evaluate(inv);
}

}  // namespace rslab
