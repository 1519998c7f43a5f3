#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "ising/bounds.hpp"
#include "ising/contour.hpp"
#include "ising/error.hpp"

namespace ising::experiments {

using nlohmann::ordered_json;

namespace {

constexpr double kTol = 1e-12;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string format_number(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string cell_text(const ordered_json& c, int digits) {
  if (c.is_null()) return "";
  if (c.is_string()) return c.get<std::string>();
  if (c.is_boolean()) return c.get<bool>() ? "true" : "false";
  if (c.is_number_integer()) return std::to_string(c.get<std::int64_t>());
  if (c.is_number()) return format_number(c.get<double>(), digits);
  return c.dump();
}

ordered_json site_json(Site s) { return ordered_json::array({s.x, s.y}); }

Site site_or_center(const std::optional<Site>& s) { return s.value_or(Site{0, 0}); }

void require_sides(int lo, int hi) {
  if (lo < 1 || hi < lo) throw DomainError("box sizes must satisfy 1 <= box-min <= box-max");
}

ordered_json norms_json(const FieldNorms& n) {
  ordered_json j;
  j["l1"] = n.l1_finite ? ordered_json(n.l1) : ordered_json("inf");
  j["l1_lower"] = n.l1_finite ? ordered_json(n.l1_lower) : ordered_json("inf");
  j["sup_abs"] = n.sup_abs;
  j["liminf"] = n.inf_outside_every_box;
  return j;
}

struct GapColumn {
  std::vector<int> sides;
  std::vector<double> plus;
  std::vector<double> minus;
  std::vector<double> gap;
};

GapColumn gap_column(const ExactGapOptions& o, const ModelParams& params) {
  require_sides(o.box_min, o.box_max);
  // Fail before doing any work.
  const ExactLimits limits;
  if (o.method == Method::transfer && o.box_max > limits.transfer_max_side)
    throw CapacityError("box side " + std::to_string(o.box_max) + " exceeds the transfer-matrix cap of " +
                        std::to_string(limits.transfer_max_side));
  if (o.method == Method::brute && o.box_max * o.box_max > limits.brute_max_sites)
    throw CapacityError("a " + std::to_string(o.box_max) + "x" + std::to_string(o.box_max) +
                        " box exceeds the brute-force cap of " + std::to_string(limits.brute_max_sites) + " sites");
  const Site site = site_or_center(o.site);
  GapColumn g;
  for (int side = o.box_min; side <= o.box_max; ++side) {
    const Region box = make_box({0, 0}, side);
    if (!box.contains(site))
      throw DomainError("site " + to_string(site) + " lies outside the " + std::to_string(side) + "x" +
                        std::to_string(side) + " box");
    g.sides.push_back(side);
    g.plus.push_back(magnetization(box, BoundaryCondition::plus(), params, site, o.method));
    g.minus.push_back(magnetization(box, BoundaryCondition::minus(), params, site, o.method));
    g.gap.push_back(g.plus.back() - g.minus.back());
  }
  return g;
}

// Volume monotonicity and range; these are theorems for every field.
void check_column(const GapColumn& g, const std::string& label, Report& r) {
  for (std::size_t k = 0; k < g.gap.size(); ++k) {
    if (g.gap[k] < -kTol || g.gap[k] > 2.0 + kTol)
      r.failures.push_back(label + " gap out of [0, 2] at side " + std::to_string(g.sides[k]));
    if (k > 0 && g.gap[k] > g.gap[k - 1] + kTol)
      r.failures.push_back(label + " gap increases from side " + std::to_string(g.sides[k - 1]) + " to " +
                           std::to_string(g.sides[k]));
  }
}

// 2 (1 - 2 c(beta)) when the series converges.
std::optional<double> plateau_prediction(double beta, double J) {
  if (!(peierls_ratio(beta, J) < 1.0)) return std::nullopt;
  return 2.0 * plus_bc_lower_bound(beta, J);
}

ordered_json trend(const GapColumn& g, Regime regime, const ModelParams& params) {
  ordered_json t;
  bool non_increasing = true;
  bool strictly_decreasing = true;
  for (std::size_t k = 1; k < g.gap.size(); ++k) {
    non_increasing = non_increasing && g.gap[k] <= g.gap[k - 1] + kTol;
    strictly_decreasing = strictly_decreasing && g.gap[k] < g.gap[k - 1];
  }
  t["non_increasing"] = non_increasing;
  t["strictly_decreasing"] = strictly_decreasing;
  const double first = g.gap.front();
  const double last = g.gap.back();
  switch (regime) {
    case Regime::summable: {
      t["expected"] = "gap plateaus at a positive value";
      auto pred = plateau_prediction(params.beta, params.J);
      if (pred) {
        t["plateau_prediction"] = *pred;
        t["threshold"] = *pred - 0.05;
        t["matches"] = non_increasing && last >= *pred - 0.05;
      } else {
        t["matches"] = nullptr;
      }
      break;
    }
    case Regime::liminf_positive:
      t["expected"] = "gap decays toward 0";
      t["matches"] = strictly_decreasing && last <= 0.5 * first;
      break;
    case Regime::neither:
      t["expected"] = "no prediction";
      t["matches"] = nullptr;
      break;
  }
  return t;
}

ordered_json common_parameters(double beta, double J, const FieldSpec& field) {
  ordered_json p;
  p["beta"] = beta;
  p["J"] = J;
  p["field"] = field.describe();
  return p;
}

}  // namespace

const ordered_json& Report::at(std::size_t row, const std::string& column) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == column) return rows.at(row).at(c);
  throw DomainError("report has no column " + column);
}

void write_table(const Report& r, std::ostream& out) {
  out << r.command << " (ising " << kVersion << ")\n";
  for (const auto& [k, v] : r.parameters.items()) out << "  " << k << " = " << cell_text(v, 12) << '\n';
  std::vector<std::size_t> width(r.columns.size());
  std::vector<std::vector<std::string>> text;
  for (std::size_t c = 0; c < r.columns.size(); ++c) width[c] = r.columns[c].size();
  for (const auto& row : r.rows) {
    text.emplace_back();
    for (std::size_t c = 0; c < row.size(); ++c) {
      text.back().push_back(cell_text(row[c], 8));
      width[c] = std::max(width[c], text.back().back().size());
    }
  }
  out << '\n';
  for (std::size_t c = 0; c < r.columns.size(); ++c)
    out << std::setw(static_cast<int>(width[c])) << r.columns[c] << (c + 1 < r.columns.size() ? "  " : "\n");
  for (const auto& row : text)
    for (std::size_t c = 0; c < row.size(); ++c)
      out << std::setw(static_cast<int>(width[c])) << row[c] << (c + 1 < row.size() ? "  " : "\n");
  out << '\n';
  for (const auto& [k, v] : r.summary.items()) out << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  for (const auto& f : r.failures) out << "FAIL: " << f << '\n';
  out << (r.passed() ? "PASS" : "FAIL") << " (" << format_number(r.wall_seconds, 3) << " s)\n";
}

void write_csv(const Report& r, std::ostream& out) {
  out << "# command=" << r.command << '\n';
  out << "# version=" << kVersion << '\n';
  out << "# parameters=" << r.parameters.dump() << '\n';
  out << "# summary=" << r.summary.dump() << '\n';
  out << "# status=" << (r.passed() ? "pass" : "fail") << '\n';
  out << "# wall_seconds=" << format_number(r.wall_seconds, 6) << '\n';
  for (std::size_t c = 0; c < r.columns.size(); ++c) out << r.columns[c] << (c + 1 < r.columns.size() ? "," : "\n");
  for (const auto& row : r.rows)
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::string s = cell_text(row[c], 17);
      if (s.find_first_of(",\"") != std::string::npos) {
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        s = q + "\"";
      }
      out << s << (c + 1 < row.size() ? "," : "\n");
    }
}

ordered_json to_json(const Report& r) {
  ordered_json j;
  j["command"] = r.command;
  j["version"] = kVersion;
  j["parameters"] = r.parameters;
  j["columns"] = r.columns;
  j["rows"] = r.rows;
  j["summary"] = r.summary;
  j["status"] = r.passed() ? "pass" : "fail";
  j["failures"] = r.failures;
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::summable: return "summable (J > 3 ||h||_1)";
    case Regime::liminf_positive: return "liminf h > 0";
    case Regime::neither: return "neither";
  }
  return "neither";
}

Regime classify(const ModelParams& params) {
  const FieldNorms n = field_norms(params.field);
  if (n.l1_finite && params.J > 3.0 * n.l1) return Regime::summable;
  if (n.inf_outside_every_box > 0.0) return Regime::liminf_positive;
  return Regime::neither;
}

Report exact_gap(const ExactGapOptions& o) {
  Stopwatch clock;
  const ModelParams params(o.J, o.beta, FieldSpec::parse(o.field));
  Report r;
  r.command = "exact-gap";
  r.parameters = common_parameters(o.beta, o.J, params.field);
  r.parameters["box_min"] = o.box_min;
  r.parameters["box_max"] = o.box_max;
  r.parameters["site"] = site_json(site_or_center(o.site));
  r.parameters["method"] = to_string(o.method);

  const GapColumn g = gap_column(o, params);
  r.columns = {"side", "m_plus", "m_minus", "gap", "method", "error_bound"};
  for (std::size_t k = 0; k < g.sides.size(); ++k)
    r.rows.push_back({g.sides[k], g.plus[k], g.minus[k], g.gap[k], to_string(o.method), 0.0});
  check_column(g, "exact", r);

  const Regime regime = classify(params);
  r.summary["regime"] = to_string(regime);
  r.summary["field_norms"] = norms_json(field_norms(params.field));
  r.summary["trend"] = trend(g, regime, params);
  r.summary["error_bound"] = "exact; 0 means floating-point rounding only";
  r.wall_seconds = clock.seconds();
  return r;
}

Report contour_verify(const ContourVerifyOptions& o) {
  Stopwatch clock;
  const FieldSpec field = FieldSpec::parse(o.field);
  const Region box = make_box({0, 0}, o.box);
  if (box.size() > static_cast<std::size_t>(ExactLimits{}.brute_max_sites))
    throw CapacityError("contour-verify enumerates every configuration; " + std::to_string(box.size()) +
                        " sites exceeds the brute-force cap of " + std::to_string(ExactLimits{}.brute_max_sites));
  if (o.betas.empty()) throw DomainError("beta grid is empty");

  Report r;
  r.command = "contour-verify";
  r.parameters["box"] = o.box;
  r.parameters["betas"] = o.betas;
  r.parameters["J"] = o.J;
  r.parameters["field"] = field.describe();

  const auto minus = BoundaryCondition::minus();
  const std::uint64_t count = std::uint64_t{1} << box.size();
  std::vector<ContourFamily> families;
  families.reserve(count);
  std::set<std::vector<std::pair<int, std::vector<DualEdge>>>> distinct;
  bool round_trip = true;
  std::size_t ambiguous = 0;
  int max_length = 0;
  for (std::uint64_t c = 0; c < count; ++c) {
    const auto cfg = SpinConfiguration::from_bits(box, minus, c);
    auto fam = extract_contours(cfg);
    const auto back = reconstruct_configuration(fam);
    round_trip = round_trip && back == cfg && extract_contours(back) == fam;
    ambiguous += ambiguous_type_contours(fam, cfg).size();
    std::vector<std::pair<int, std::vector<DualEdge>>> key;
    for (const auto& g : fam.contours) {
      key.emplace_back(static_cast<int>(g.sign()), g.edges());
      max_length = std::max(max_length, g.length());
    }
    distinct.insert(std::move(key));
    families.push_back(std::move(fam));
  }
  const bool bijection = round_trip && distinct.size() == count;
  if (!bijection) r.failures.push_back("extraction and reconstruction are not mutually inverse");

  const FieldNorms norms = field_norms(field);
  r.columns = {"beta",     "families",         "configurations", "bijection",     "log_z_contour",
               "log_z_normalized", "z_residual", "weight_residual", "sandwich", "min_slack_low",
               "min_slack_high", "method"};
  for (double beta : o.betas) {
    const ModelParams params(o.J, beta, field);
    const double z_contour = log_partition_contour(box, params);
    const double z_exact = log_partition_normalized_minus(box, params, Method::brute);
    const double z_res = std::abs(z_contour - z_exact);
    double w_res = 0.0;
    bool sandwich = true;
    double slack_low = INFINITY;
    double slack_high = INFINITY;
    for (std::uint64_t c = 0; c < count; ++c) {
      const auto cfg = SpinConfiguration::from_bits(box, minus, c);
      const double lhs = -beta * energy_normalized_minus(cfg, params);
      const double rhs = family_weight_log(families[c], params);
      w_res = std::max(w_res, std::abs(std::expm1(lhs - rhs)));
      if (norms.l1_finite) {
        const auto s = sandwich_check(families[c], params);
        sandwich = sandwich && s.holds;
        slack_low = std::min(slack_low, s.slack_low);
        slack_high = std::min(slack_high, s.slack_high);
      }
    }
    ordered_json sandwich_cell = norms.l1_finite ? ordered_json(sandwich) : ordered_json("n/a");
    ordered_json low = norms.l1_finite ? ordered_json(slack_low) : ordered_json(nullptr);
    ordered_json high = norms.l1_finite ? ordered_json(slack_high) : ordered_json(nullptr);
    r.rows.push_back({beta, static_cast<std::int64_t>(distinct.size()), static_cast<std::int64_t>(count), bijection,
                      z_contour, z_exact, z_res, w_res, sandwich_cell, low, high, "contour vs brute"});
    const std::string at = " at beta = " + format_number(beta, 6);
    if (z_res > 1e-10) r.failures.push_back("contour partition function differs by " + format_number(z_res, 3) + at);
    if (w_res > kTol) r.failures.push_back("weight identity residual " + format_number(w_res, 3) + at);
    if (norms.l1_finite && !sandwich) r.failures.push_back("sandwich bound violated" + at);
  }
  r.summary["max_contour_length"] = max_length;
  r.summary["ambiguous_type_contours"] = static_cast<std::int64_t>(ambiguous);
  r.summary["field_norms"] = norms_json(norms);
  r.summary["tolerances"] = "z_residual <= 1e-10 absolute, weight_residual <= 1e-12 relative";

  if (!o.dump_path.empty()) {
    nlohmann::json dump;
    dump["box"] = {{"center", {0, 0}}, {"side", o.box}};
    dump["families"] = nlohmann::json::array();
    for (std::uint64_t c = 0; c < count; ++c) {
      auto j = to_json(families[c]);
      j["configuration_bits"] = c;
      dump["families"].push_back(std::move(j));
    }
    std::ofstream out(o.dump_path);
    if (!out) throw Error("cannot write " + o.dump_path);
    out << dump.dump() << '\n';
    r.summary["dump"] = o.dump_path;
  }
  r.wall_seconds = clock.seconds();
  return r;
}

Report peierls(const PeierlsOptions& o) {
  Stopwatch clock;
  const FieldSpec field = FieldSpec::parse(o.field);
  const Region box = make_box({0, 0}, o.box);
  const Site site = site_or_center(o.site);
  if (o.betas.empty()) throw DomainError("beta grid is empty");
  Report r;
  r.command = "peierls";
  r.parameters["betas"] = o.betas;
  r.parameters["J"] = o.J;
  r.parameters["field"] = field.describe();
  r.parameters["box"] = o.box;
  r.parameters["site"] = site_json(site);
  r.parameters["method"] = to_string(o.method);
  r.columns = {"beta", "x", "exact", "method", "bound", "bound_method", "l1", "holds"};
  for (double beta : o.betas) {
    const ModelParams params(o.J, beta, field);
    const auto cmp = minus_bc_plus_probability_bound(box, params, site, o.method);
    r.rows.push_back({beta, peierls_ratio(beta, o.J), cmp.exact, to_string(o.method), cmp.bound, "closed form",
                      cmp.l1, cmp.holds});
    if (!cmp.holds) r.failures.push_back("exact probability exceeds the bound at beta = " + format_number(beta, 6));
  }
  r.summary["quantity"] = "mu^-(s_site = +1)";
  r.wall_seconds = clock.seconds();
  return r;
}

Report corollary(const CorollaryOptions& o) {
  Stopwatch clock;
  if (o.zero_window < 1) throw DomainError("zero window must be at least 1");
  const FieldSpec raw = FieldSpec::parse(o.gap.field);
  const Region window = make_box({0, 0}, o.zero_window);
  const FieldSpec zeroed = raw.with_zeroed(window);
  const ModelParams raw_params(o.gap.J, o.gap.beta, raw);
  const ModelParams zeroed_params(o.gap.J, o.gap.beta, zeroed);
  const FieldNorms raw_norms = field_norms(raw);
  const FieldNorms zeroed_norms = field_norms(zeroed);

  Report r;
  r.command = "corollary";
  r.parameters = common_parameters(o.gap.beta, o.gap.J, raw);
  r.parameters["zero_window"] = o.zero_window;
  r.parameters["box_min"] = o.gap.box_min;
  r.parameters["box_max"] = o.gap.box_max;
  r.parameters["site"] = site_json(site_or_center(o.gap.site));
  r.parameters["method"] = to_string(o.gap.method);

  const bool raw_ok = raw_norms.l1_finite && o.gap.J > 3.0 * raw_norms.l1;
  const bool zeroed_ok = zeroed_norms.l1_finite && o.gap.J > 3.0 * zeroed_norms.l1;
  r.summary["raw_field_norms"] = norms_json(raw_norms);
  r.summary["raw_J_gt_3l1"] = raw_ok;
  r.summary["zeroed_field"] = zeroed.describe();
  r.summary["zeroed_field_norms"] = norms_json(zeroed_norms);
  r.summary["zeroed_J_gt_3l1"] = zeroed_ok;
  if (!zeroed_ok)
    throw RegimeError("zeroing the " + std::to_string(o.zero_window) + "x" + std::to_string(o.zero_window) +
                      " window leaves J <= 3 ||h||_1 (3 ||h||_1 = " + format_number(3.0 * zeroed_norms.l1, 6) + ")");

  const GapColumn g_raw = gap_column(o.gap, raw_params);
  const GapColumn g_zero = gap_column(o.gap, zeroed_params);
  r.columns = {"side", "raw_gap", "zeroed_gap", "method", "error_bound"};
  for (std::size_t k = 0; k < g_raw.sides.size(); ++k)
    r.rows.push_back({g_raw.sides[k], g_raw.gap[k], g_zero.gap[k], to_string(o.gap.method), 0.0});
  check_column(g_raw, "raw", r);
  check_column(g_zero, "zeroed", r);
  r.summary["zeroed_trend"] = trend(g_zero, Regime::summable, zeroed_params);
  r.wall_seconds = clock.seconds();
  return r;
}

Report mc_gap(const McGapOptions& o) {
  Stopwatch clock;
  const ModelParams params(o.J, o.beta, FieldSpec::parse(o.field));
  const Region box = make_box({0, 0}, o.box);
  const Site site = site_or_center(o.site);
  o.chains.validate();

  Report r;
  r.command = "mc-gap";
  r.parameters = common_parameters(o.beta, o.J, params.field);
  r.parameters["box"] = o.box;
  r.parameters["site"] = site_json(site);
  r.parameters["sweeps"] = o.chains.sweeps;
  r.parameters["burn_in"] = o.chains.burn_in;
  r.parameters["chains"] = o.chains.chains;
  r.parameters["seed"] = o.chains.seed;
  r.parameters["thinning"] = o.chains.thinning;
  r.parameters["start"] = o.chains.start == StartState::hot ? "hot" : "cold";
  if (o.reference_box) r.parameters["reference_box"] = *o.reference_box;

  std::vector<TraceRow> trace;
  const SampledGap g = sample_gap(box, params, o.chains, site, o.trace_path.empty() ? nullptr : &trace);
  if (!o.trace_path.empty()) write_trace_csv(trace, o.trace_path);

  ordered_json ref_side = nullptr;
  ordered_json ref_gap = nullptr;
  ordered_json ref_method = nullptr;
  if (o.reference_box) {
    if (*o.reference_box > o.box) throw DomainError("reference box must not exceed the sampled box");
    const Region ref = make_box({0, 0}, *o.reference_box);
    if (!ref.contains(site)) throw DomainError("site lies outside the reference box");
    const double exact = magnetization_gap(ref, params, site, Method::transfer);
    ref_side = *o.reference_box;
    ref_gap = exact;
    ref_method = "transfer";
    // Rule of three: a flip probability never observed in n samples is
    // below 3/n, so each magnetization can hide up to 6/n.
    const double n = static_cast<double>(o.chains.chains) *
                     static_cast<double>((o.chains.sweeps - o.chains.burn_in) / o.chains.thinning);
    const double resolution = 12.0 / n;
    r.summary["reference_allowance"] = "3 std_error + 12 / samples = " + format_number(3.0 * g.std_error + resolution, 3);
    if (g.gap > exact + 3.0 * g.std_error + resolution)
      r.failures.push_back("sampled gap exceeds the nested exact gap beyond 3 standard errors plus resolution");
  }
  r.columns = {"side",  "gap",     "std_error", "m_plus",         "se_plus",       "m_minus",
               "se_minus", "method", "generator", "reference_side", "reference_gap", "reference_method"};
  r.rows.push_back({o.box, g.gap, g.std_error, g.plus.mean, g.plus.std_error, g.minus.mean, g.minus.std_error,
                    "sampled", g.plus.generator, ref_side, ref_gap, ref_method});
  if (g.gap + 3.0 * g.std_error < 0.0) r.failures.push_back("sampled gap is negative beyond 3 standard errors");
  r.summary["regime"] = to_string(classify(params));
  r.summary["error_bound"] = "std_error from between-chain variance";
  if (!o.trace_path.empty()) r.summary["trace"] = o.trace_path;
  r.wall_seconds = clock.seconds();
  return r;
}

}  // namespace ising::experiments
