#include "zcurve/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "zcurve/fit.hpp"
#include "zcurve/fit_io.hpp"
#include "zcurve/ingest.hpp"
#include "zcurve/model_space_io.hpp"
#include "zcurve/plot.hpp"
#include "zcurve/predictive.hpp"
#include "zcurve/simulate.hpp"

namespace zcurve::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int default_threads() {
  const char* env = std::getenv("ZCURVE_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024) throw UsageError(std::string("ZCURVE_THREADS must be a positive integer, got '") + env + "'");
  return static_cast<int>(v);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

fs::path sibling(const fs::path& path, const std::string& suffix) {
  fs::path p = path;
  return p.replace_extension(suffix);
}

struct IngestFlags {
  std::string y_column = "y";
  std::string se_column = "se";
  std::string delimiter = ",";
  bool no_header = false;

  void add(CLI::App* app) {
    app->add_option("--y-column", y_column, "Effect-size column")->capture_default_str();
    app->add_option("--se-column", se_column, "Standard-error column")->capture_default_str();
    app->add_option("--delimiter", delimiter, "Field delimiter (one character, or 'tab')")->capture_default_str();
    app->add_flag("--no-header", no_header, "Input has no header; columns are y, se");
  }

  IngestConfig config() const {
    IngestConfig cfg;
    cfg.y_column = y_column;
    cfg.se_column = se_column;
    if (delimiter == "tab") {
      cfg.delimiter = '\t';
    } else if (delimiter.size() == 1) {
      cfg.delimiter = delimiter[0];
    } else {
      throw UsageError("--delimiter must be a single character or 'tab'");
    }
    cfg.header = !no_header;
    return cfg;
  }
};

// ---------------------------------------------------------------------------
// simulate

struct SimulateFlags {
  int k = 0;
  double d = 0.3;
  double tau = 0.15;
  std::string bias = "none";
  std::uint64_t seed = 1;
  int n_min = 10;
  int n_max = 60;
  std::string out;
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out, std::ostream& err) {
  SimConfig cfg;
  cfg.k = f.k;
  cfg.d = f.d;
  cfg.tau = f.tau;
  cfg.seed = f.seed;
  cfg.n_min = f.n_min;
  cfg.n_max = f.n_max;
  cfg.survival = f.bias == "moderate" ? Survival::moderate() : Survival::none();
  cfg.label = f.out.empty() ? "simulation" : fs::path(f.out).stem().string();
  const auto sim = simulate_studies(cfg);
  const auto csv = write_table(sim.data);
  if (f.out.empty()) {
    out << csv;
    return exit_ok;
  }
  write_file(f.out, csv);
  const auto provenance = sibling(f.out, ".provenance.json");
  write_file(provenance, provenance_json(sim).dump(2) + "\n");
  fmt::print(err, "wrote {} ({} studies from {} candidates) and {}\n", f.out, sim.data.size(), sim.generated,
             provenance.string());
  return exit_ok;
}

// ---------------------------------------------------------------------------
// fit

struct FitFlags {
  std::string data;
  std::string space = "default";
  int chains = 4;
  int warmup = 2000;
  int iterations = 5000;
  std::uint64_t seed = 1;
  std::string out;
  int threads = 0;
  std::string direction = "positive";
  bool full = false;
  std::string metrics_ensemble = "bias";
  bool printed = false;
  std::size_t ensemble_draws = 10000;
  IngestFlags ingest;
};

ModelSpace load_space(const std::string& which) {
  if (which == "default") return default_model_space();
  return read_model_space(which);
}

int cmd_fit(const FitFlags& f, std::ostream& out, std::ostream& err) {
  const auto data = read_table(f.data, f.ingest.config());
  const auto space = load_space(f.space);
  FitConfig cfg;
  cfg.sampler.chains = f.chains;
  cfg.sampler.warmup = f.warmup;
  cfg.sampler.iterations = f.iterations;
  cfg.sampler.seed = f.seed;
  cfg.direction = f.direction == "negative" ? -1 : 1;
  cfg.max_stored_draws = f.full ? 0 : 10000;
  cfg.full_ensemble_metrics = f.metrics_ensemble == "full";
  cfg.metrics.formula = f.printed ? Formula::printed : Formula::corrected;
  cfg.ensemble_draws = f.ensemble_draws;
  cfg.threads = f.threads > 0 ? f.threads : default_threads();

  const auto fit = fit_ensemble(space, data, cfg);
  for (const auto& w : fit.warnings) fmt::print(err, "warning: {}\n", w);
  const auto text = write_fit(fit);
  if (f.out.empty()) {
    out << text;
  } else {
    write_file(f.out, text);
    fmt::print(err, "wrote {}\n", f.out);
  }
  return exit_ok;
}

// ---------------------------------------------------------------------------
// plot

struct PlotFlags {
  std::string fit;
  std::string data;
  std::string curves = "robma";
  bool extrapolate = false;
  double band = 0.95;
  bool no_band = false;
  std::string out;
  std::string data_out;
  std::size_t draws = 1000;
  double bin_width = 0.25;
  double z_min = -6.0;
  double z_max = 6.0;
  int points = 601;
  std::string title;
  int threads = 0;
  IngestFlags ingest;
};

const std::map<std::string, std::string>& aliases() {
  static const std::map<std::string, std::string> a{{"fe", "mu.tau0.none"},
                                                    {"re", "mu.tau.none"},
                                                    {"3psm", "mu.tau.S5"},
                                                    {"pet", "mu.tau.PET"},
                                                    {"peese", "mu.tau.PEESE"}};
  return a;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string available_curves(const FitResult& fit) {
  std::string names = "robma, robma_bias";
  for (const auto& [alias, label] : aliases()) {
    for (const auto& m : fit.models) {
      if (m.spec.label == label) names += ", " + alias;
    }
  }
  for (const auto& m : fit.models) names += ", " + m.spec.label;
  return names;
}

std::vector<PredictiveDraw> curve_draws(const FitResult& fit, const std::string& name, std::size_t count,
                                        std::ostream& err) {
  const int direction = fit.config.direction;
  const auto space = fit.space();
  if (name == "robma" || name == "robma_bias") {
    auto probs = fit.posterior_probs();
    if (name == "robma_bias") {
      probs = conditional_probs(space, probs, Component::bias);
      if (std::all_of(probs.begin(), probs.end(), [](double p) { return p == 0.0; })) {
        throw Error("curve 'robma_bias': no posterior mass on bias-adjusted models");
      }
    }
    const auto mixed = ensemble_draws(fit, probs, count, ensemble_seed(fit.config.sampler.seed));
    return predictive_draws(space, mixed, direction);
  }
  std::string label = name;
  if (auto it = aliases().find(name); it != aliases().end()) label = it->second;
  for (const auto& m : fit.models) {
    if (m.spec.label != label) continue;
    if (m.posterior_prob < 1e-300) {
      fmt::print(err, "warning: curve '{}' has posterior probability {:.3g}\n", name, m.posterior_prob);
    }
    return predictive_draws(m.spec, thin(m.draws, count), direction);
  }
  throw UsageError("unknown curve '" + name + "'; available: " + available_curves(fit));
}

int cmd_plot(const PlotFlags& f, std::ostream& /*out*/, std::ostream& err) {
  const auto fit = read_fit(f.fit);
  const auto data = read_table(f.data, f.ingest.config());
  const int threads = f.threads > 0 ? f.threads : default_threads();
  if (f.draws < 1) throw UsageError("--draws must be >= 1");

  HistogramConfig hcfg;
  hcfg.width = f.bin_width;
  hcfg.z_min = f.z_min;
  hcfg.z_max = f.z_max;
  const auto hist = histogram_bins(data, hcfg);

  GridConfig grid;
  grid.z_min = f.z_min;
  grid.z_max = f.z_max;
  grid.points = f.points;
  grid.level = f.band;

  std::vector<PlotCurve> curves;
  for (const auto& name : split(f.curves, ',')) {
    const auto draws = curve_draws(fit, name, f.draws, err);
    const auto pred = predictive_curve(draws, data, grid, fit.config.metrics.formula, threads);
    for (const auto& w : pred.warnings) fmt::print(err, "warning: curve '{}': {}\n", name, w);
    curves.push_back(PlotCurve{name, pred.curve.grid, pred.curve.fitted, false, !f.no_band});
    if (f.extrapolate) {
      const bool adjusted = std::any_of(draws.begin(), draws.end(),
                                        [](const PredictiveDraw& d) { return d.bias != BiasKind::none; });
      if (!adjusted) {
        fmt::print(err, "warning: curve '{}' has no bias-adjusted draws; extrapolated equals fitted\n", name);
      }
      curves.push_back(
          PlotCurve{name + "_extrapolated", pred.curve.grid, pred.curve.extrapolated, true, !f.no_band});
    }
  }

  PlotOptions options;
  options.title = f.title;
  const auto rendered = render_zcurve(hist, curves, options);
  const fs::path svg = f.out;
  const fs::path csv = f.data_out.empty() ? sibling(svg, ".csv") : fs::path(f.data_out);
  const fs::path bins = sibling(csv, ".bins.csv");
  write_file(svg, rendered.svg);
  write_file(csv, rendered.data_csv);
  write_file(bins, rendered.bins_csv);
  fmt::print(err, "wrote {}, {} and {}\n", svg.string(), csv.string(), bins.string());
  return exit_ok;
}

// ---------------------------------------------------------------------------
// report

std::string bf_text(const InclusionBayesFactor& bf) {
  switch (bf.flag) {
    case InclusionBayesFactor::Flag::infinite: return "inf (no posterior mass without the component)";
    case InclusionBayesFactor::Flag::zero: return "0 (no posterior mass with the component)";
    case InclusionBayesFactor::Flag::finite: break;
  }
  return fmt::format("{:.4g}", bf.value);
}

std::string interval_row(const std::string& name, const Interval& i, const char* spec) {
  return fmt::format("{:<18}{:>12}   [{}, {}]\n", name, fmt::format(fmt::runtime(spec), i.median),
                     fmt::format(fmt::runtime(spec), i.lower), fmt::format(fmt::runtime(spec), i.upper));
}

int cmd_report(const std::string& path, std::ostream& out) {
  const auto fit = read_fit(path);
  const double level = fit.config.metrics.level * 100.0;
  std::string r;
  r += fmt::format("Data: {} (N = {})\n", fit.data_label.empty() ? "-" : fit.data_label, fit.studies);
  r += fmt::format("Models: {}; seed {}; {} chains x {} iterations (warmup {})\n", fit.models.size(),
                   fit.config.sampler.seed, fit.config.sampler.chains, fit.config.sampler.iterations,
                   fit.config.sampler.warmup);
  r += fmt::format("Metrics ensemble: {}\n\n",
                   fit.metrics_ensemble == "bias" ? "bias-adjusted models" : "all models");
  r += fmt::format("{:<18}{:>12}   {:g}% CI\n", "Statistic", "Median", level);
  r += fmt::format("{:<18}{:>12.3f}\n", "ODR", fit.metrics.odr);
  r += interval_row("EDR", fit.metrics.edr, "{:.3f}");
  r += interval_row("FDR", fit.metrics.fdr, "{:.3f}");
  r += interval_row("N_missing", fit.metrics.n_missing, "{:.1f}");
  r += interval_row("mu", fit.mu, "{:.3f}");
  r += interval_row("tau", fit.tau, "{:.3f}");
  r += "\n";
  r += fmt::format("{:<18}{}\n", "BF_effect", bf_text(fit.bf_effect));
  r += fmt::format("{:<18}{}\n", "BF_heterogeneity", bf_text(fit.bf_heterogeneity));
  r += fmt::format("{:<18}{}\n", "BF_bias", bf_text(fit.bf_bias));
  r += "\n";
  r += fmt::format("{:<18}{:>10}{:>12}{:>14}{:>11}  {}\n", "Model", "Prior", "Posterior", "log ML", "error",
                   "method");
  for (const auto& m : fit.models) {
    r += fmt::format("{:<18}{:>10.4f}{:>12.4g}{:>14.4f}{:>11.2g}  {}\n", m.spec.label, m.spec.prior_prob,
                     m.posterior_prob, m.evidence.log_ml, m.evidence.error, to_string(m.evidence.method));
  }
  if (!fit.warnings.empty()) {
    r += "\nWarnings:\n";
    for (const auto& w : fit.warnings) r += "  " + w + "\n";
  }
  out << r;
  return exit_ok;
}

// ---------------------------------------------------------------------------

void print_error(std::ostream& err, const std::exception& e) {
  if (const auto* v = dynamic_cast<const ValidationError*>(&e); v && v->issues().size() > 1) {
    fmt::print(err, "error: invalid input:\n");
    for (const auto& issue : v->issues()) fmt::print(err, "  {}\n", issue);
    return;
  }
  fmt::print(err, "error: {}\n", e.what());
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian z-curve diagnostics for publication bias"};
  app.name("zcurve");
  app.require_subcommand(1);
  app.set_version_flag("--version", "zcurve 0.1.0");

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a literature of two-group studies");
  simulate->add_option("--k", sim.k, "Number of published studies")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--d", sim.d, "True mean effect (Cohen's d)")->capture_default_str();
  simulate->add_option("--tau", sim.tau, "Heterogeneity sd")->capture_default_str()->check(CLI::NonNegativeNumber);
  simulate->add_option("--bias", sim.bias, "Publication bias preset")
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "moderate"}));
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--n-min", sim.n_min, "Smallest total sample size")->capture_default_str();
  simulate->add_option("--n-max", sim.n_max, "Largest total sample size")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output CSV (stdout if omitted)");

  FitFlags fit;
  auto* fitcmd = app.add_subcommand("fit", "Fit the model ensemble to an effect-size table");
  fitcmd->add_option("data", fit.data, "CSV with y and se columns")->required();
  fitcmd->add_option("--space", fit.space, "'default' or a model-space JSON file")->capture_default_str();
  fitcmd->add_option("--chains", fit.chains, "Chains per model")->capture_default_str()->check(CLI::PositiveNumber);
  fitcmd->add_option("--warmup", fit.warmup, "Warmup iterations per chain")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  fitcmd->add_option("--iter", fit.iterations, "Retained iterations per chain")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  fitcmd->add_option("--seed", fit.seed, "Master seed")->capture_default_str();
  fitcmd->add_option("--out", fit.out, "Output fit JSON (stdout if omitted)");
  fitcmd->add_option("--threads", fit.threads, "Worker threads (default: ZCURVE_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  fitcmd->add_option("--direction", fit.direction, "Expected effect direction for one-sided selection")
      ->capture_default_str()
      ->check(CLI::IsMember({"positive", "negative"}));
  fitcmd->add_flag("--full", fit.full, "Store every posterior draw");
  fitcmd->add_option("--metrics-ensemble", fit.metrics_ensemble, "Ensemble for EDR/FDR/N_missing")
      ->capture_default_str()
      ->check(CLI::IsMember({"bias", "full"}));
  fitcmd->add_flag("--printed-formulas", fit.printed, "Use Normal*I and (1-I)N for extrapolation");
  fitcmd->add_option("--ensemble-draws", fit.ensemble_draws, "Model-averaged draws for summaries")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  fit.ingest.add(fitcmd);

  PlotFlags plot;
  auto* plotcmd = app.add_subcommand("plot", "Draw the z-curve plot");
  plotcmd->add_option("fit", plot.fit, "Fit JSON")->required();
  plotcmd->add_option("data", plot.data, "The CSV the fit was made from")->required();
  plotcmd->add_option("--curves", plot.curves, "Comma-separated curve names")->capture_default_str();
  plotcmd->add_flag("--extrapolate", plot.extrapolate, "Add extrapolated (bias-removed) curves");
  plotcmd->add_option("--band", plot.band, "Pointwise band level")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  plotcmd->add_flag("--no-band", plot.no_band, "Omit band polygons");
  plotcmd->add_option("--out", plot.out, "Output SVG")->required();
  plotcmd->add_option("--data-out", plot.data_out, "Plot-data CSV (default: next to the SVG)");
  plotcmd->add_option("--draws", plot.draws, "Draws per curve")->capture_default_str();
  plotcmd->add_option("--bin-width", plot.bin_width, "Target histogram bin width")->capture_default_str();
  plotcmd->add_option("--z-min", plot.z_min, "Lower end of the z axis")->capture_default_str();
  plotcmd->add_option("--z-max", plot.z_max, "Upper end of the z axis")->capture_default_str();
  plotcmd->add_option("--points", plot.points, "Curve grid points")->capture_default_str();
  plotcmd->add_option("--title", plot.title, "Figure title");
  plotcmd->add_option("--threads", plot.threads, "Worker threads")->check(CLI::PositiveNumber);
  plot.ingest.add(plotcmd);

  std::string report_path;
  auto* report = app.add_subcommand("report", "Print the summary table of a fit");
  report->add_option("fit", report_path, "Fit JSON")->required();

  std::string space_out;
  auto* space = app.add_subcommand("space", "Write the default model space as JSON");
  space->add_option("--out", space_out, "Output file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << "\n";
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "usage error: {}\n", e.what());
    fmt::print(err, "run 'zcurve --help' for usage\n");
    return exit_usage;
  }

  try {
    if (*simulate) return cmd_simulate(sim, out, err);
    if (*fitcmd) return cmd_fit(fit, out, err);
    if (*plotcmd) return cmd_plot(plot, out, err);
    if (*report) return cmd_report(report_path, out);
    if (*space) {
      const auto text = write_model_space(default_model_space());
      if (space_out.empty()) {
        out << text;
      } else {
        write_file(space_out, text);
      }
      return exit_ok;
    }
  } catch (const UsageError& e) {
    fmt::print(err, "usage error: {}\n", e.what());
    return exit_usage;
  } catch (const std::exception& e) {
    print_error(err, e);
    return exit_runtime;
  }
  return exit_usage;
}

}  // namespace zcurve::cli
