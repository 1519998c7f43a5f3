#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "ising/lattice.hpp"

namespace ising {

struct UniformField {
  double h = 0.0;
};

// h_i = sign * A * (1 + |i|)^(-p), |i| the graph distance to the origin.
struct PowerLawField {
  double amplitude = 0.0;
  double exponent = 3.0;
  int sign = +1;
};

// h_i = c + sign * A * (1 + |i|)^(-p).
struct ShiftedField {
  double base = 0.0;
  double amplitude = 0.0;
  double exponent = 3.0;
  int sign = +1;
};

class FieldSpec;

// Explicit values on a finite support; outside it the field is zero or
// follows the tail family.
struct TableField {
  std::map<Site, double> values;
  std::shared_ptr<const FieldSpec> tail;
};

class FieldSpec {
 public:
  using Family = std::variant<UniformField, PowerLawField, ShiftedField, TableField>;

  FieldSpec() : family_(UniformField{}) {}
  FieldSpec(UniformField f);
  FieldSpec(PowerLawField f);
  FieldSpec(ShiftedField f);
  FieldSpec(TableField f);

  static FieldSpec zero() { return FieldSpec(UniformField{0.0}); }
  static FieldSpec uniform(double h) { return FieldSpec(UniformField{h}); }
  static FieldSpec power_law(double amplitude, double exponent, int sign = +1) {
    return FieldSpec(PowerLawField{amplitude, exponent, sign});
  }
  static FieldSpec shifted(double base, double amplitude, double exponent, int sign = +1) {
    return FieldSpec(ShiftedField{base, amplitude, exponent, sign});
  }
  static FieldSpec table(std::map<Site, double> values) {
    return FieldSpec(TableField{std::move(values), nullptr});
  }
  static FieldSpec table(std::map<Site, double> values, FieldSpec tail);

  // Parses the textual form used on the command line:
  //   uniform:h=0.3
  //   powerlaw:A=0.02,p=3[,sign=-1]
  //   shifted:c=0.5,A=0.1,p=3[,sign=-1]
  //   table:@file.json
  //   window:n=3,v=0.2[,cx=0,cy=0]
  // A table or window may be followed by ";SPEC" giving the field outside
  // its support, e.g. "window:n=3,v=0.2;powerlaw:A=0.02,p=3".
  static FieldSpec parse(const std::string& text);

  double at(Site s) const;
  std::vector<double> on(const Region& region) const;

  const Family& family() const { return family_; }
  bool is_table() const { return std::holds_alternative<TableField>(family_); }

  // Same field with h_k replaced by value.
  FieldSpec with_override(Site k, double value) const;
  // Same field with h set to zero on every site of the window.
  FieldSpec with_zeroed(const Region& window) const;

  std::string describe() const;

 private:
  Family family_;
};

struct FieldNorms {
  // Upper estimate of ||h||_1, never below the true value; +inf when the
  // field is not summable.
  double l1 = 0.0;
  // Certified lower estimate; l1 - l1_lower <= tail tolerance when finite.
  double l1_lower = 0.0;
  bool l1_finite = true;
  // sup_i h_i and sup_i |h_i|.
  double sup = 0.0;
  double sup_abs = 0.0;
  // liminf_i h_i: the infimum of h outside a sufficiently large box.
  double inf_outside_every_box = 0.0;
};

FieldNorms field_norms(const FieldSpec& spec, double tail_tolerance = 1e-12);

struct ModelParams {
  double J = 1.0;
  double beta = 0.0;
  FieldSpec field;

  ModelParams() = default;
  ModelParams(double coupling, double inverse_temperature, FieldSpec h);

  ModelParams with_field(FieldSpec h) const { return ModelParams(J, beta, std::move(h)); }
  ModelParams with_beta(double b) const { return ModelParams(J, b, field); }
};

}  // namespace ising
