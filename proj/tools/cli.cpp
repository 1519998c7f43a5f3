#include "cli.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "experiments.hpp"
#include "ising/error.hpp"

namespace ising::cli {

namespace ex = ising::experiments;

namespace {

Site parse_site(const std::string& text) {
  std::istringstream in(text);
  Site s;
  char comma = 0;
  if (!(in >> s.x >> comma >> s.y) || comma != ',' || !(in >> std::ws).eof())
    throw ParseError("site must look like x,y; got '" + text + "'");
  return s;
}

Method parse_method(const std::string& text) {
  if (text == "transfer") return Method::transfer;
  if (text == "brute") return Method::brute;
  throw ParseError("method must be transfer or brute; got '" + text + "'");
}

struct Output {
  std::string format;
  std::string path;
};

void add_output(CLI::App* cmd, Output& o) {
  cmd->add_option("--out", o.format, "Also write the report to --path")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--path", o.path, "Output file for --out");
}

void add_model(CLI::App* cmd, double& J, std::string& field) {
  cmd->add_option("--J", J, "Coupling constant")->capture_default_str();
  cmd->add_option("--field", field, "Field spec, e.g. powerlaw:A=0.02,p=3")->capture_default_str();
}

void add_gap(CLI::App* cmd, ex::ExactGapOptions& o, std::string& site, std::string& method) {
  cmd->add_option("--box-min", o.box_min, "Smallest box side")->capture_default_str();
  cmd->add_option("--box-max", o.box_max, "Largest box side")->capture_default_str();
  cmd->add_option("--beta", o.beta, "Inverse temperature")->required();
  add_model(cmd, o.J, o.field);
  cmd->add_option("--site", site, "Observed site x,y (default: box center)");
  cmd->add_option("--method", method, "transfer or brute")->capture_default_str();
}

int emit(const ex::Report& r, const Output& o, std::ostream& out) {
  ex::write_table(r, out);
  if (!o.format.empty()) {
    if (o.path.empty()) throw ParseError("--out needs --path");
    std::ofstream file(o.path);
    if (!file) throw Error("cannot write " + o.path);
    if (o.format == "csv")
      ex::write_csv(r, file);
    else
      file << ex::to_json(r).dump(2) << '\n';
  }
  return r.passed() ? kPass : kAssertionFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-volume Ising experiments with site-dependent fields"};
  app.name("ising");
  app.require_subcommand(1);
  app.set_version_flag("--version", ex::kVersion);

  Output output;
  std::string site_text;
  std::string method_text = "transfer";
  std::function<ex::Report()> command;

  ex::ExactGapOptions gap;
  auto* exact_gap = app.add_subcommand("exact-gap", "Exact +/- magnetization gap over nested boxes");
  add_gap(exact_gap, gap, site_text, method_text);
  add_output(exact_gap, output);
  exact_gap->callback([&] {
    command = [&] {
      if (!site_text.empty()) gap.site = parse_site(site_text);
      gap.method = parse_method(method_text);
      return ex::exact_gap(gap);
    };
  });

  ex::ContourVerifyOptions cv;
  auto* contour = app.add_subcommand("contour-verify", "Exhaustive checks of the contour representation");
  contour->add_option("--box", cv.box, "Box side")->required();
  contour->add_option("--beta-grid", cv.betas, "Comma-separated betas")->delimiter(',')->required();
  add_model(contour, cv.J, cv.field);
  contour->add_option("--dump", cv.dump_path, "Write every contour family as JSON");
  add_output(contour, output);
  contour->callback([&] { command = [&] { return ex::contour_verify(cv); }; });

  ex::PeierlsOptions pe;
  auto* peierls = app.add_subcommand("peierls", "Exact mu^-(s = +1) against the Peierls bound");
  peierls->add_option("--beta-grid", pe.betas, "Comma-separated betas")->delimiter(',')->required();
  add_model(peierls, pe.J, pe.field);
  peierls->add_option("--box", pe.box, "Box side")->capture_default_str();
  peierls->add_option("--site", site_text, "Observed site x,y (default: box center)");
  peierls->add_option("--method", method_text, "transfer or brute")->capture_default_str();
  add_output(peierls, output);
  peierls->callback([&] {
    command = [&] {
      if (!site_text.empty()) pe.site = parse_site(site_text);
      pe.method = parse_method(method_text);
      return ex::peierls(pe);
    };
  });

  ex::CorollaryOptions co;
  auto* corollary = app.add_subcommand("corollary", "Gap experiment after zeroing the field on a window");
  corollary->add_option("--zero-window", co.zero_window, "Side of the zeroed window around the origin")->required();
  add_gap(corollary, co.gap, site_text, method_text);
  add_output(corollary, output);
  corollary->callback([&] {
    command = [&] {
      if (!site_text.empty()) co.gap.site = parse_site(site_text);
      co.gap.method = parse_method(method_text);
      return ex::corollary(co);
    };
  });

  ex::McGapOptions mc;
  std::string start = "hot";
  int reference = 0;
  auto* mc_gap = app.add_subcommand("mc-gap", "Sampled +/- magnetization gap on a large box");
  mc_gap->add_option("--box", mc.box, "Box side")->required();
  mc_gap->add_option("--beta", mc.beta, "Inverse temperature")->required();
  add_model(mc_gap, mc.J, mc.field);
  mc_gap->add_option("--site", site_text, "Observed site x,y (default: box center)");
  mc_gap->add_option("--sweeps", mc.chains.sweeps, "Sweeps per chain")->capture_default_str();
  mc_gap->add_option("--burn-in", mc.chains.burn_in, "Discarded sweeps")->capture_default_str();
  mc_gap->add_option("--chains", mc.chains.chains, "Independent chains per boundary")->capture_default_str();
  mc_gap->add_option("--seed", mc.chains.seed, "Generator seed")->capture_default_str();
  mc_gap->add_option("--thinning", mc.chains.thinning, "Keep every n-th sweep")->capture_default_str();
  mc_gap->add_option("--start", start, "hot or cold")->check(CLI::IsMember({"hot", "cold"}))->capture_default_str();
  mc_gap->add_option("--reference-box", reference, "Exact transfer gap on this nested box for comparison");
  mc_gap->add_option("--trace", mc.trace_path, "Write per-sweep traces as CSV");
  add_output(mc_gap, output);
  mc_gap->callback([&] {
    command = [&] {
      if (!site_text.empty()) mc.site = parse_site(site_text);
      mc.chains.start = start == "cold" ? StartState::cold : StartState::hot;
      if (reference > 0) mc.reference_box = reference;
      return ex::mc_gap(mc);
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    return emit(command(), output, out);
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << "\n(use `ising mc-gap` for boxes beyond exact reach)\n";
    return kRegime;
  } catch (const RegimeError& e) {
    err << "regime error: " << e.what() << '\n';
    return kRegime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace ising::cli
