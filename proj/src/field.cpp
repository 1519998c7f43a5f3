#include "ising/field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "json.hpp"

#include "ising/error.hpp"

namespace ising {

namespace {

// Every non-table family is f(r) = base + amplitude * (1 + r)^(-exponent)
// with r the graph distance to the origin.
struct Radial {
  double base = 0.0;
  double amplitude = 0.0;
  double exponent = 1.0;

  double operator()(int r) const {
    if (amplitude == 0.0) return base;
    return base + amplitude * std::pow(1.0 + r, -exponent);
  }
};

Radial radial_of(const FieldSpec::Family& f) {
  if (auto* u = std::get_if<UniformField>(&f)) return {u->h, 0.0, 1.0};
  if (auto* p = std::get_if<PowerLawField>(&f)) return {0.0, p->sign * p->amplitude, p->exponent};
  if (auto* s = std::get_if<ShiftedField>(&f)) return {s->base, s->sign * s->amplitude, s->exponent};
  throw ContractViolation("table field has no radial form");
}

void check_exponent(double p) {
  if (!(p > 0.0)) throw ParseError("power-law exponent must be positive");
}

void check_sign(int s) {
  if (s != 1 && s != -1) throw ParseError("sign must be +1 or -1");
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::map<std::string, double> parse_keys(const std::string& body, const std::string& family) {
  std::map<std::string, double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError(family + ": expected key=value, got '" + item + "'");
    std::string key = trim(item.substr(0, eq));
    std::string val = trim(item.substr(eq + 1));
    try {
      std::size_t used = 0;
      double v = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
      out[key] = v;
    } catch (const std::exception&) {
      throw ParseError(family + ": bad number '" + val + "' for key " + key);
    }
  }
  return out;
}

double require(const std::map<std::string, double>& kv, const std::string& key,
               const std::string& family) {
  auto it = kv.find(key);
  if (it == kv.end()) throw ParseError(family + ": missing key " + key);
  return it->second;
}

void reject_unknown(const std::map<std::string, double>& kv, std::initializer_list<const char*> known,
                    const std::string& family) {
  for (const auto& [k, v] : kv) {
    if (std::find_if(known.begin(), known.end(), [&](const char* n) { return k == n; }) == known.end())
      throw ParseError(family + ": unknown key " + k);
  }
}

Site parse_site_key(const std::string& key) {
  auto comma = key.find(',');
  if (comma == std::string::npos) throw ParseError("table key must be \"x,y\", got '" + key + "'");
  try {
    return {std::stoi(key.substr(0, comma)), std::stoi(key.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ParseError("table key must be \"x,y\", got '" + key + "'");
  }
}

FieldSpec parse_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open field table " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("field table " + path + ": " + e.what());
  }
  const nlohmann::json* values = &doc;
  std::string tail;
  if (doc.is_object() && doc.contains("values")) {
    values = &doc["values"];
    if (doc.contains("tail")) tail = doc["tail"].get<std::string>();
  }
  if (!values->is_object()) throw ParseError("field table " + path + " must be a JSON object");
  std::map<Site, double> table;
  for (const auto& [key, v] : values->items()) {
    if (!v.is_number()) throw ParseError("field table value for " + key + " is not a number");
    table[parse_site_key(key)] = v.get<double>();
  }
  if (tail.empty()) return FieldSpec::table(std::move(table));
  return FieldSpec::table(std::move(table), FieldSpec::parse(tail));
}

FieldSpec parse_single(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw ParseError("field spec needs 'family:params', got '" + text + "'");
  std::string family = trim(text.substr(0, colon));
  std::string body = trim(text.substr(colon + 1));

  if (family == "table") {
    if (body.empty() || body[0] != '@') throw ParseError("table field expects table:@file.json");
    return parse_table_file(body.substr(1));
  }
  auto kv = parse_keys(body, family);
  if (family == "uniform") {
    reject_unknown(kv, {"h"}, family);
    return FieldSpec::uniform(require(kv, "h", family));
  }
  if (family == "powerlaw") {
    reject_unknown(kv, {"A", "p", "sign"}, family);
    int sign = kv.count("sign") ? static_cast<int>(kv["sign"]) : 1;
    return FieldSpec::power_law(require(kv, "A", family), require(kv, "p", family), sign);
  }
  if (family == "shifted") {
    reject_unknown(kv, {"c", "A", "p", "sign"}, family);
    int sign = kv.count("sign") ? static_cast<int>(kv["sign"]) : 1;
    return FieldSpec::shifted(require(kv, "c", family), require(kv, "A", family),
                              require(kv, "p", family), sign);
  }
  if (family == "window") {
    reject_unknown(kv, {"n", "v", "cx", "cy"}, family);
    int n = static_cast<int>(require(kv, "n", family));
    Site c{static_cast<int>(kv.count("cx") ? kv["cx"] : 0.0), static_cast<int>(kv.count("cy") ? kv["cy"] : 0.0)};
    Region w(c, n);
    std::map<Site, double> table;
    for (Site s : w.sites()) table[s] = require(kv, "v", family);
    return FieldSpec::table(std::move(table));
  }
  throw ParseError("unknown field family '" + family + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Sum over r of r * (1 + r)^(-p) from r = R to infinity, as an integral of a
// function decreasing on [1, inf).
double shell_tail_integral(double R, double p) {
  return std::pow(1.0 + R, 2.0 - p) / (p - 2.0) - std::pow(1.0 + R, 1.0 - p) / (p - 1.0);
}

double shell_term(double r, double p) { return r * std::pow(1.0 + r, -p); }

// sum_i |A (1+|i|)^(-p)| over Z^2 with certified brackets. The shell
// function r (1+r)^(-p) is decreasing and convex for r >= 2, so past a radius
// R >= 2 the midpoint rule bounds the tail sum from above and the trapezoid
// rule bounds it from below.
std::pair<double, double> power_law_l1_direct(double amplitude, double p, double tol) {
  const double a = std::abs(amplitude);
  const double target = tol / (4.0 * a);
  auto gap = [p](double R) {
    return shell_tail_integral(R + 0.5, p) - shell_tail_integral(R + 1.0, p) - 0.5 * shell_term(R + 1.0, p);
  };
  long long radius = 16;
  while (gap(static_cast<double>(radius)) > target && radius < (1LL << 26)) radius *= 2;
  long double direct = 0.0L;
  // Shells of radius r >= 1 hold 4r sites; sum small terms first.
  for (long long r = radius; r >= 1; --r)
    direct += static_cast<long double>(r) * std::pow(1.0L + r, -static_cast<long double>(p));
  const double R = static_cast<double>(radius);
  const double upper_tail = shell_tail_integral(R + 0.5, p);
  const double lower_tail = shell_tail_integral(R + 1.0, p) + 0.5 * shell_term(R + 1.0, p);
  const double d = static_cast<double>(direct);
  double upper = a * (1.0 + 4.0 * (d + upper_tail));
  double lower = a * (1.0 + 4.0 * (d + lower_tail));
  // Absorb summation rounding so the upper value stays an overestimate.
  upper = std::nextafter(upper * (1.0 + 4e-16), std::numeric_limits<double>::infinity());
  lower = lower * (1.0 - 4e-16);
  return {upper, lower};
}

// The shell sum dominates repeated norm queries; results depend only on
// (|A|, p, tol).
std::pair<double, double> power_law_l1(double amplitude, double p, double tol) {
  static std::mutex lock;
  static std::map<std::tuple<double, double, double>, std::pair<double, double>> cache;
  const auto key = std::make_tuple(std::abs(amplitude), p, tol);
  {
    std::lock_guard<std::mutex> guard(lock);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto value = power_law_l1_direct(amplitude, p, tol);
  std::lock_guard<std::mutex> guard(lock);
  if (cache.size() > 4096) cache.clear();
  cache.emplace(key, value);
  return value;
}

}  // namespace

FieldSpec::FieldSpec(UniformField f) : family_(f) {}

FieldSpec::FieldSpec(PowerLawField f) : family_(f) {
  check_exponent(f.exponent);
  check_sign(f.sign);
  if (f.amplitude < 0.0) throw ParseError("power-law amplitude must be non-negative; use sign=-1");
}

FieldSpec::FieldSpec(ShiftedField f) : family_(f) {
  check_exponent(f.exponent);
  check_sign(f.sign);
  if (f.amplitude < 0.0) throw ParseError("shifted amplitude must be non-negative; use sign=-1");
}

FieldSpec::FieldSpec(TableField f) : family_(std::move(f)) {
  const auto& t = std::get<TableField>(family_);
  if (t.tail && t.tail->is_table()) throw ParseError("a table tail must be an analytic family");
}

FieldSpec FieldSpec::table(std::map<Site, double> values, FieldSpec tail) {
  return FieldSpec(TableField{std::move(values), std::make_shared<const FieldSpec>(std::move(tail))});
}

FieldSpec FieldSpec::parse(const std::string& text) {
  auto semi = text.find(';');
  if (semi == std::string::npos) return parse_single(trim(text));
  FieldSpec head = parse_single(trim(text.substr(0, semi)));
  FieldSpec tail = parse_single(trim(text.substr(semi + 1)));
  if (!head.is_table()) throw ParseError("only a table or window may precede ';'");
  auto t = std::get<TableField>(head.family_);
  if (t.tail) throw ParseError("table already has a tail");
  return FieldSpec::table(std::move(t.values), std::move(tail));
}

double FieldSpec::at(Site s) const {
  if (auto* t = std::get_if<TableField>(&family_)) {
    auto it = t->values.find(s);
    if (it != t->values.end()) return it->second;
    return t->tail ? t->tail->at(s) : 0.0;
  }
  return radial_of(family_)(std::abs(s.x) + std::abs(s.y));
}

std::vector<double> FieldSpec::on(const Region& region) const {
  std::vector<double> h(region.size());
  for (std::size_t k = 0; k < h.size(); ++k) h[k] = at(region.site(k));
  return h;
}

FieldSpec FieldSpec::with_override(Site k, double value) const {
  if (auto* t = std::get_if<TableField>(&family_)) {
    TableField copy = *t;
    copy.values[k] = value;
    return FieldSpec(std::move(copy));
  }
  return FieldSpec::table({{k, value}}, *this);
}

FieldSpec FieldSpec::with_zeroed(const Region& window) const {
  TableField out;
  if (auto* t = std::get_if<TableField>(&family_)) {
    out = *t;
  } else {
    out.tail = std::make_shared<const FieldSpec>(*this);
  }
  for (Site s : window.sites()) out.values[s] = 0.0;
  return FieldSpec(std::move(out));
}

std::string FieldSpec::describe() const {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, UniformField>) {
          return "uniform:h=" + fmt(f.h);
        } else if constexpr (std::is_same_v<T, PowerLawField>) {
          return "powerlaw:A=" + fmt(f.amplitude) + ",p=" + fmt(f.exponent) + (f.sign < 0 ? ",sign=-1" : "");
        } else if constexpr (std::is_same_v<T, ShiftedField>) {
          return "shifted:c=" + fmt(f.base) + ",A=" + fmt(f.amplitude) + ",p=" + fmt(f.exponent) +
                 (f.sign < 0 ? ",sign=-1" : "");
        } else {
          std::string s = "table:{" + std::to_string(f.values.size()) + " sites}";
          if (f.tail) s += ";" + f.tail->describe();
          return s;
        }
      },
      family_);
}

FieldNorms field_norms(const FieldSpec& spec, double tail_tolerance) {
  if (!(tail_tolerance > 0.0)) throw DomainError("tail tolerance must be positive");
  constexpr double inf = std::numeric_limits<double>::infinity();
  FieldNorms n;

  auto radial_norms = [&](const Radial& f, FieldNorms& out) {
    out.inf_outside_every_box = f.base;
    if (f.base != 0.0) {
      out.l1 = out.l1_lower = inf;
      out.l1_finite = false;
    } else if (f.amplitude == 0.0) {
      out.l1 = out.l1_lower = 0.0;
    } else if (f.exponent <= 2.0) {
      out.l1 = out.l1_lower = inf;
      out.l1_finite = false;
    } else {
      auto [up, lo] = power_law_l1(f.amplitude, f.exponent, tail_tolerance);
      out.l1 = up;
      out.l1_lower = lo;
    }
  };

  if (auto* t = std::get_if<TableField>(&spec.family())) {
    double table_l1 = 0.0;
    double table_sup = -inf;
    double table_sup_abs = 0.0;
    for (const auto& [s, v] : t->values) {
      table_l1 += std::abs(v);
      table_sup = std::max(table_sup, v);
      table_sup_abs = std::max(table_sup_abs, std::abs(v));
    }
    if (!t->tail) {
      n.l1 = n.l1_lower = table_l1;
      n.sup = std::max(table_sup, 0.0);
      n.sup_abs = table_sup_abs;
      n.inf_outside_every_box = 0.0;
      return n;
    }
    Radial f = radial_of(t->tail->family());
    radial_norms(f, n);
    double covered = 0.0;
    for (const auto& [s, v] : t->values) covered += std::abs(t->tail->at(s));
    if (n.l1_finite) {
      n.l1 = n.l1 - covered + table_l1;
      n.l1_lower = std::max(0.0, n.l1_lower - covered + table_l1);
    }
    // f is monotone in r, so its sup over the uncovered sites sits either at
    // the smallest uncovered radius or at the limit.
    int r_min = 0;
    for (;; ++r_min) {
      bool found = false;
      for (int dx = -r_min; dx <= r_min && !found; ++dx) {
        int dy = r_min - std::abs(dx);
        if (!t->values.count({dx, dy}) || !t->values.count({dx, -dy})) found = true;
      }
      if (found) break;
    }
    double near = f(r_min);
    n.sup = std::max({table_sup, near, f.base});
    n.sup_abs = std::max({table_sup_abs, std::abs(near), std::abs(f.base)});
    return n;
  }

  Radial f = radial_of(spec.family());
  radial_norms(f, n);
  n.sup = std::max(f(0), f.base);
  n.sup_abs = std::max(std::abs(f(0)), std::abs(f.base));
  return n;
}

ModelParams::ModelParams(double coupling, double inverse_temperature, FieldSpec h)
    : J(coupling), beta(inverse_temperature), field(std::move(h)) {
  if (!(coupling > 0.0)) throw DomainError("coupling J must be positive (ferromagnet)");
  if (!(inverse_temperature >= 0.0)) throw DomainError("beta must be non-negative");
}

}  // namespace ising
