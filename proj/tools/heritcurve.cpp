// Command-line front end: fits exchangeable Gaussian mixtures to family
// trait data and emits machine-readable fits, model scans, correlation and
// heritability curves, tail limits, simulated datasets and bootstrap
// summaries.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "herit/bootstrap.hpp"
#include "herit/data.hpp"
#include "herit/delta.hpp"
#include "herit/errors.hpp"
#include "herit/fit.hpp"
#include "herit/heritability.hpp"
#include "herit/json_io.hpp"
#include "herit/sample.hpp"
#include "herit/stats.hpp"

namespace {

using herit::FamilyDesign;
using herit::Relationship;
using nlohmann::json;

// shortest round-trip decimal representation
std::string fmt(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw herit::data_error("cannot write " + out_path);
  out << text;
}

void write_json(const json& j, const std::string& out_path) {
  write_text(j.dump(2) + "\n", out_path);
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw herit::data_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw herit::data_error(path + ": invalid JSON (" + e.what() + ")");
  }
  return j;
}

std::vector<Relationship> relationships_of(FamilyDesign design) {
  return design == FamilyDesign::twins
             ? std::vector<Relationship>{Relationship::mz, Relationship::dz}
             : std::vector<Relationship>{Relationship::mc, Relationship::fc,
                                         Relationship::mf};
}

herit::BivariateMixture margin_of(const herit::FitResult& fit, Relationship rel) {
  return fit.design == FamilyDesign::twins ? bivariate_margin(fit.twins, rel)
                                           : trio_pair_margin(fit.trios, rel);
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitArgs {
  std::string design;
  std::string input;
  std::string out;
  int m = 1;
  bool standardize = false;
  int starts = 6;
  int max_iter = 2000;
  std::uint64_t seed = 1;
};

std::pair<double, double> pooled_quantiles(const std::vector<double>& values) {
  return {herit::quantile(values, 0.05), herit::quantile(values, 0.95)};
}

int run_fit(const FitArgs& args) {
  herit::FitConfig config;
  config.seed = args.seed;
  config.n_starts = args.starts;
  config.max_iterations = args.max_iter;

  herit::FitResult fit;
  std::vector<double> pooled;
  if (args.design == "twins") {
    if (args.standardize)
      throw std::invalid_argument("--standardize applies to trios only");
    const herit::TwinDataset dataset = herit::read_twins(args.input);
    if (dataset.dropped > 0)
      std::cerr << "note: dropped " << dataset.dropped << " unusable rows\n";
    const herit::TwinData data = dataset.to_matrices();
    for (const auto& r : dataset.records) {
      pooled.push_back(r.y1);
      pooled.push_back(r.y2);
    }
    fit = herit::fit(data, args.m, config);
  } else {
    herit::TrioDataset dataset = herit::read_trios(args.input);
    if (dataset.dropped > 0)
      std::cerr << "note: dropped " << dataset.dropped << " unusable rows\n";
    if (args.standardize) {
      dataset = herit::standardize_trios(dataset);
      std::cerr << "note: parental shift D = " << fmt(dataset.shift) << "\n";
    }
    for (const auto& r : dataset.records) {
      pooled.push_back(r.mother);
      pooled.push_back(r.father);
      pooled.push_back(r.child);
    }
    fit = herit::fit(dataset.to_matrices(), args.m, config);
  }

  const Eigen::VectorXd se = herit::natural_parameter_se(fit);
  const auto names = herit::natural_parameter_names(fit.design, fit.m);
  std::vector<std::pair<std::string, double>> se_pairs;
  for (std::size_t i = 0; i < names.size(); ++i)
    se_pairs.emplace_back(names[i], se(static_cast<Eigen::Index>(i)));

  write_json(herit::fit_to_json(fit, se_pairs, pooled_quantiles(pooled)), args.out);
  return 0;
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

struct ScanArgs {
  FitArgs base;
  int m_min = 1;
  int m_max = 3;
};

std::string scan_text_table(const herit::ScanTable& table) {
  std::ostringstream out;
  out << "   m  parameters      dAIC      dBIC\n";
  for (const auto& row : table.rows) {
    char line[128];
    if (row.ok) {
      std::snprintf(line, sizeof(line), "%4d  %10d  %8.1f  %8.1f%s\n", row.m,
                    row.q, row.delta_aic, row.delta_bic,
                    row.converged ? "" : "  (not converged)");
    } else {
      std::snprintf(line, sizeof(line), "%4d  %10d  %8s  %8s  (failed)\n", row.m,
                    row.q, "-", "-");
    }
    out << line;
  }
  if (table.recommended_m > 0)
    out << "selected m = " << table.recommended_m << " (lowest BIC)\n";
  return out.str();
}

int run_scan(const ScanArgs& args) {
  herit::FitConfig config;
  config.seed = args.base.seed;
  config.n_starts = args.base.starts;
  config.max_iterations = args.base.max_iter;

  herit::ScanTable table;
  Eigen::Index n_families = 0;
  if (args.base.design == "twins") {
    const herit::TwinData data = herit::read_twins(args.base.input).to_matrices();
    n_families = data.families();
    table = herit::model_scan(data, args.m_min, args.m_max, config);
  } else {
    herit::TrioDataset dataset = herit::read_trios(args.base.input);
    if (args.base.standardize) dataset = herit::standardize_trios(dataset);
    const herit::TrioData data = dataset.to_matrices();
    n_families = data.families();
    table = herit::model_scan(data, args.m_min, args.m_max, config);
  }

  std::cout << scan_text_table(table);

  if (!args.base.out.empty()) {
    json rows = json::array();
    for (const auto& row : table.rows)
      rows.push_back({{"m", row.m},
                      {"Q", row.q},
                      {"ok", row.ok},
                      {"converged", row.converged},
                      {"loglik", row.loglik},
                      {"aic", row.aic},
                      {"bic", row.bic},
                      {"delta_aic", row.delta_aic},
                      {"delta_bic", row.delta_bic},
                      {"message", row.message}});
    write_json(json{{"design", args.base.design},
                    {"n", n_families},
                    {"rows", rows},
                    {"recommended_m", table.recommended_m}},
               args.base.out);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// curves
// ---------------------------------------------------------------------------

struct CurvesArgs {
  std::string fit_path;
  std::string out;
  double grid_lo = 0.0, grid_hi = 0.0;
  int grid_n = 201;
  bool grid_set = false;
  std::string design_rule = "auto";
};

herit::ThetaFunctional rho_curve_functional(FamilyDesign design, Relationship rel,
                                            Eigen::VectorXd grid) {
  return [design, rel, grid](const herit::ParamVector& theta) {
    herit::BivariateMixture margin;
    if (design == FamilyDesign::twins)
      margin = bivariate_margin(herit::to_natural_twins(theta), rel);
    else
      margin = trio_pair_margin(herit::to_natural_trios(theta), rel);
    const double sd = std::sqrt(herit::global_moments(margin).variance);
    Eigen::VectorXd values(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i)
      values(i) = herit::correlation_at(margin, grid(i), sd);
    return values;
  };
}

int run_curves(const CurvesArgs& args) {
  const json doc = load_json(args.fit_path);
  const herit::FitResult fit = herit::fit_from_json(doc);
  const auto quantiles = herit::data_quantiles_from_json(doc);

  const herit::GlobalMoments global =
      fit.design == FamilyDesign::twins ? herit::global_moments(fit.twins)
                                        : herit::global_moments(fit.trios);
  Eigen::VectorXd grid;
  if (args.grid_set) {
    if (args.grid_n < 2 || args.grid_hi <= args.grid_lo)
      throw std::invalid_argument("invalid curve grid");
    grid = Eigen::VectorXd::LinSpaced(args.grid_n, args.grid_lo, args.grid_hi);
  } else {
    grid = herit::default_grid(global, args.grid_n);
  }

  // correlation curves with delta-method bands, one per relationship
  std::vector<herit::CurveSeries> rho_curves;
  for (Relationship rel : relationships_of(fit.design)) {
    herit::CurveSeries curve = correlation_curve(margin_of(fit, rel), grid);
    curve = herit::with_bands(
        curve,
        herit::delta_method_se(fit, rho_curve_functional(fit.design, rel, grid)));
    rho_curves.push_back(std::move(curve));
  }

  herit::DesignRule rule = herit::DesignRule::automatic;
  if (args.design_rule == "ace")
    rule = herit::DesignRule::ace;
  else if (args.design_rule == "ade")
    rule = herit::DesignRule::ade;
  else if (args.design_rule != "auto")
    throw std::invalid_argument("--design-rule must be auto, ace or ade");

  herit::HeritabilityCurves herit_curves;
  if (fit.design == FamilyDesign::twins)
    herit_curves = herit::heritability_curves_twins(fit.twins, grid, rule);
  else
    herit_curves = herit::heritability_curves_trio(fit.trios, grid);

  const FamilyDesign design = fit.design;
  const auto herit_functional = [design, grid, rule](int which) {
    return [design, grid, rule, which](const herit::ParamVector& theta) {
      herit::HeritabilityCurves curves;
      if (design == FamilyDesign::twins)
        curves = herit::heritability_curves_twins(herit::to_natural_twins(theta),
                                                  grid, rule);
      else
        curves =
            herit::heritability_curves_trio(herit::to_natural_trios(theta), grid);
      if (which == 0) return Eigen::VectorXd(curves.a2);
      if (which == 1) return Eigen::VectorXd(curves.second);
      return Eigen::VectorXd(curves.e2);
    };
  };
  const Eigen::VectorXd a2_se = herit::delta_method_se(fit, herit_functional(0));
  const Eigen::VectorXd second_se = herit::delta_method_se(fit, herit_functional(1));
  const Eigen::VectorXd e2_se = herit::delta_method_se(fit, herit_functional(2));

  if (herit_curves.has_negative_values)
    std::cerr << "note: some decomposition curves go negative; the local "
                 "moment equations can leave [0, 1]\n";

  std::ostringstream out;
  if (quantiles) {
    out << "# q05," << fmt(quantiles->first) << "\n";
    out << "# q95," << fmt(quantiles->second) << "\n";
  }
  out << "y";
  for (const auto& curve : rho_curves)
    out << "," << curve.name << "," << curve.name << "_se," << curve.name
        << "_lo," << curve.name << "_hi";
  const std::string second = herit_curves.second_name();
  out << ",a2,a2_se,a2_lo,a2_hi";
  out << "," << second << "," << second << "_se," << second << "_lo," << second
      << "_hi";
  out << ",e2,e2_se,e2_lo,e2_hi\n";

  auto band = [&](double value, double se) {
    out << "," << fmt(value) << "," << fmt(se) << "," << fmt(value - 1.96 * se)
        << "," << fmt(value + 1.96 * se);
  };
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    out << fmt(grid(i));
    for (const auto& curve : rho_curves) band(curve.value(i), curve.se(i));
    band(herit_curves.a2(i), a2_se(i));
    band(herit_curves.second(i), second_se(i));
    band(herit_curves.e2(i), e2_se(i));
    out << "\n";
  }
  write_text(out.str(), args.out);
  return 0;
}

// ---------------------------------------------------------------------------
// limits
// ---------------------------------------------------------------------------

json limit_side(const herit::TailLimitT<double>& side) {
  return json{{"component", side.dominant + 1},
              {"beta", side.slope},
              {"sigma2", side.variance},
              {"rho_tilde", side.rho_tilde}};
}

int run_limits(const std::string& fit_path, const std::string& out) {
  const herit::ModelDocument doc = herit::model_from_json(load_json(fit_path));
  json entries = json::array();
  auto add = [&](const herit::BivariateMixture& margin) {
    const herit::TailLimits limits = herit::tail_limits(margin);
    entries.push_back({{"relationship", to_string(margin.relationship)},
                       {"case", to_string(limits.tail_case)},
                       {"left", limit_side(limits.left)},
                       {"right", limit_side(limits.right)}});
  };
  if (doc.design == "twins") {
    add(bivariate_margin(doc.twins, Relationship::mz));
    add(bivariate_margin(doc.twins, Relationship::dz));
  } else if (doc.design == "trios") {
    add(trio_pair_margin(doc.trios, Relationship::mc));
    add(trio_pair_margin(doc.trios, Relationship::fc));
    add(trio_pair_margin(doc.trios, Relationship::mf));
  } else {
    add(doc.pair);
  }
  write_json(json{{"limits", entries}}, out);
  return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string model_path;
  std::string out;
  Eigen::Index n = 0;
  std::uint64_t seed = 1;
  bool labels = false;
};

int run_simulate(const SimulateArgs& args) {
  const herit::ModelDocument doc =
      herit::model_from_json(load_json(args.model_path));
  if (args.n < 1) throw std::invalid_argument("--n must be at least 1");

  std::ostringstream out;
  if (doc.design == "twins") {
    const herit::SampleBatch batch = herit::sample(doc.twins, args.n, args.seed);
    out << "y1,y2,zygosity" << (args.labels ? ",component\n" : "\n");
    for (Eigen::Index i = 0; i < batch.rows(); ++i) {
      out << fmt(batch.values(i, 0)) << "," << fmt(batch.values(i, 1)) << ","
          << (batch.zygosity(i) == 0 ? "MZ" : "DZ");
      if (args.labels) out << "," << batch.component(i) + 1;
      out << "\n";
    }
  } else if (doc.design == "trios") {
    const herit::SampleBatch batch = herit::sample(doc.trios, args.n, args.seed);
    out << "mother,father,child" << (args.labels ? ",component\n" : "\n");
    for (Eigen::Index i = 0; i < batch.rows(); ++i) {
      out << fmt(batch.values(i, 0)) << "," << fmt(batch.values(i, 1)) << ","
          << fmt(batch.values(i, 2));
      if (args.labels) out << "," << batch.component(i) + 1;
      out << "\n";
    }
  } else {
    const herit::SampleBatch batch = herit::sample(doc.pair, args.n, args.seed);
    out << "y1,y2" << (args.labels ? ",component\n" : "\n");
    for (Eigen::Index i = 0; i < batch.rows(); ++i) {
      out << fmt(batch.values(i, 0)) << "," << fmt(batch.values(i, 1));
      if (args.labels) out << "," << batch.component(i) + 1;
      out << "\n";
    }
  }
  write_text(out.str(), args.out);
  return 0;
}

// ---------------------------------------------------------------------------
// bootstrap
// ---------------------------------------------------------------------------

struct BootstrapArgs {
  std::string fit_path;
  std::string out;
  int b = 0;
  std::uint64_t seed = 1;
  std::vector<double> rho_at;
};

int run_bootstrap(const BootstrapArgs& args) {
  const json doc = load_json(args.fit_path);
  const herit::FitResult fit = herit::fit_from_json(doc);

  std::vector<herit::BootstrapFunctional> functionals;
  const auto names = herit::natural_parameter_names(fit.design, fit.m);
  for (std::size_t i = 0; i < names.size(); ++i) {
    functionals.push_back({names[i], [i](const herit::FitResult& f) {
                             return herit::natural_parameters(f)(
                                 static_cast<Eigen::Index>(i));
                           }});
  }
  for (Relationship rel : relationships_of(fit.design)) {
    functionals.push_back(
        {"rho_" + to_string(rel) + "_global", [rel](const herit::FitResult& f) {
           const auto g = f.design == FamilyDesign::twins
                              ? herit::global_moments(f.twins)
                              : herit::global_moments(f.trios);
           return g.rho.at(rel);
         }});
    for (double y : args.rho_at) {
      functionals.push_back({"rho_" + to_string(rel) + "(" + fmt(y) + ")",
                             [rel, y](const herit::FitResult& f) {
                               const auto margin = margin_of(f, rel);
                               const double sd = std::sqrt(
                                   herit::global_moments(margin).variance);
                               return herit::correlation_at(margin, y, sd);
                             }});
    }
  }

  herit::FitConfig config;
  config.seed = args.seed;
  const herit::BootstrapResult boot =
      herit::parametric_bootstrap(fit, args.b, functionals, config);

  json out_functionals = json::array();
  for (std::size_t j = 0; j < functionals.size(); ++j) {
    const auto idx = static_cast<Eigen::Index>(j);
    out_functionals.push_back({{"name", boot.names[j]},
                               {"sd", boot.sd(idx)},
                               {"lower", boot.lower(idx)},
                               {"upper", boot.upper(idx)}});
  }
  json replicate_rows = json::array();
  for (Eigen::Index i = 0; i < boot.replicate_parameters.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < boot.replicate_parameters.cols(); ++j)
      row.push_back(boot.replicate_parameters(i, j));
    replicate_rows.push_back(std::move(row));
  }
  write_json(json{{"B", boot.requested},
                  {"completed", boot.completed},
                  {"failed", boot.failed},
                  {"functionals", out_functionals},
                  {"parameter_names", boot.parameter_names},
                  {"replicate_parameters", replicate_rows},
                  {"seed", args.seed}},
             args.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Family-trait Gaussian mixture fitting and heritability curves"};
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* cmd_fit = app.add_subcommand("fit", "maximum-likelihood mixture fit");
  cmd_fit->add_option("--design", fit_args.design, "family design")
      ->required()
      ->check(CLI::IsMember({"twins", "trios"}));
  cmd_fit->add_option("--input", fit_args.input, "CSV input path")->required();
  cmd_fit->add_option("--m", fit_args.m, "number of mixture components")
      ->required();
  cmd_fit->add_flag("--standardize", fit_args.standardize,
                    "balance parental means (trios)");
  cmd_fit->add_option("--starts", fit_args.starts, "optimization starts");
  cmd_fit->add_option("--seed", fit_args.seed, "random seed");
  cmd_fit->add_option("--max-iter", fit_args.max_iter, "iteration cap");
  cmd_fit->add_option("--out", fit_args.out, "output JSON path (default stdout)");

  ScanArgs scan_args;
  CLI::App* cmd_scan =
      app.add_subcommand("scan", "fit a range of component counts");
  cmd_scan->add_option("--design", scan_args.base.design)
      ->required()
      ->check(CLI::IsMember({"twins", "trios"}));
  cmd_scan->add_option("--input", scan_args.base.input)->required();
  cmd_scan->add_option("--m-min", scan_args.m_min)->required();
  cmd_scan->add_option("--m-max", scan_args.m_max)->required();
  cmd_scan->add_flag("--standardize", scan_args.base.standardize);
  cmd_scan->add_option("--starts", scan_args.base.starts);
  cmd_scan->add_option("--seed", scan_args.base.seed);
  cmd_scan->add_option("--max-iter", scan_args.base.max_iter);
  cmd_scan->add_option("--out", scan_args.base.out, "JSON output path");

  CurvesArgs curves_args;
  CLI::App* cmd_curves =
      app.add_subcommand("curves", "correlation and heritability curves");
  cmd_curves->add_option("--fit", curves_args.fit_path, "fit JSON path")
      ->required();
  auto* lo = cmd_curves->add_option("--grid-lo", curves_args.grid_lo);
  auto* hi = cmd_curves->add_option("--grid-hi", curves_args.grid_hi);
  lo->needs(hi);
  hi->needs(lo);
  cmd_curves->add_option("--grid-n", curves_args.grid_n);
  cmd_curves->add_option("--design-rule", curves_args.design_rule,
                         "auto, ace or ade (twins)");
  cmd_curves->add_option("--out", curves_args.out, "CSV output path");

  std::string limits_fit, limits_out;
  CLI::App* cmd_limits =
      app.add_subcommand("limits", "tail limits per relationship");
  cmd_limits->add_option("--fit", limits_fit, "fit or model JSON path")
      ->required();
  cmd_limits->add_option("--out", limits_out);

  SimulateArgs sim_args;
  CLI::App* cmd_sim = app.add_subcommand("simulate", "draw synthetic datasets");
  cmd_sim->add_option("--model", sim_args.model_path, "model or fit JSON")
      ->required();
  cmd_sim->add_option("--n", sim_args.n, "families per zygosity / trios")
      ->required();
  cmd_sim->add_option("--seed", sim_args.seed);
  cmd_sim->add_flag("--labels", sim_args.labels, "append component labels");
  cmd_sim->add_option("--out", sim_args.out, "CSV output path");

  BootstrapArgs boot_args;
  CLI::App* cmd_boot = app.add_subcommand("bootstrap", "parametric bootstrap");
  cmd_boot->add_option("--fit", boot_args.fit_path, "fit JSON path")->required();
  cmd_boot->add_option("--B", boot_args.b, "replicates")->required();
  cmd_boot->add_option("--seed", boot_args.seed);
  cmd_boot->add_option("--rho-at", boot_args.rho_at,
                       "evaluate correlation curves at these trait values");
  cmd_boot->add_option("--out", boot_args.out, "JSON output path");

  try {
    app.parse(argc, argv);
    if (cmd_fit->parsed()) return run_fit(fit_args);
    if (cmd_scan->parsed()) return run_scan(scan_args);
    if (cmd_curves->parsed()) {
      curves_args.grid_set = lo->count() > 0;
      return run_curves(curves_args);
    }
    if (cmd_limits->parsed()) return run_limits(limits_fit, limits_out);
    if (cmd_sim->parsed()) return run_simulate(sim_args);
    if (cmd_boot->parsed()) return run_bootstrap(boot_args);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help and friends
    std::cerr << "error kind=usage code=2 message=\"" << e.what() << "\"\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error kind=usage code=2 message=\"" << e.what() << "\"\n";
    return 2;
  } catch (const herit::data_error& e) {
    std::cerr << "error kind=data code=3 message=\"" << e.what() << "\"\n";
    return 3;
  } catch (const herit::model_error& e) {
    std::cerr << "error kind=data code=3 message=\"" << e.what() << "\"\n";
    return 3;
  } catch (const herit::optimization_error& e) {
    std::cerr << "error kind=optimization code=4 message=\"" << e.what() << "\"\n";
    return 4;
  } catch (const herit::definiteness_error& e) {
    std::cerr << "error kind=optimization code=4 message=\"" << e.what() << "\"\n";
    return 4;
  } catch (const herit::inference_error& e) {
    std::cerr << "error kind=inference code=5 message=\"" << e.what() << "\"\n";
    return 5;
  } catch (const herit::bootstrap_error& e) {
    std::cerr << "error kind=inference code=5 message=\"" << e.what() << "\"\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error kind=internal code=1 message=\"" << e.what() << "\"\n";
    return 1;
  }
}
