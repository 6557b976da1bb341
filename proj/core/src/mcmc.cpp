#include "zcurve/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "zcurve/parallel.hpp"
#include "zcurve/random.hpp"

namespace zcurve {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

struct ChainOutput {
  std::vector<double> rows;            // iterations x dimension
  std::vector<double> accepted;        // per coordinate, retained phase
  std::vector<double> warmup_accepted;  // per coordinate, warmup phase
};

ChainOutput run_chain(const PosteriorTarget& target, const SamplerConfig& cfg, int chain) {
  const auto dim = static_cast<std::size_t>(target.dimension());
  Engine rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(chain)));
  Theta scratch;

  const auto start = target.initial_point();
  std::vector<double> u = start;
  double current = -inf;
  for (int attempt = 0; attempt < 100 && !(current > -inf); ++attempt) {
    for (std::size_t k = 0; k < dim; ++k) u[k] = start[k] + cfg.init_jitter * standard_normal(rng);
    current = target.log_density(u, scratch);
  }
  if (!(current > -inf)) {
    u = start;
    current = target.log_density(u, scratch);
  }
  if (!(current > -inf)) {
    throw DiagnosticError("model '" + target.spec().label + "': log posterior is -inf at every starting point");
  }

  ChainOutput out;
  out.rows.reserve(static_cast<std::size_t>(cfg.iterations) * dim);
  out.accepted.assign(dim, 0.0);
  out.warmup_accepted.assign(dim, 0.0);
  std::vector<double> log_step(dim, 0.0);
  std::vector<double> window_accepted(dim, 0.0);
  int window_count = 0;
  int window_index = 0;

  const int total = cfg.warmup + cfg.iterations;
  for (int it = 0; it < total; ++it) {
    const bool warming = it < cfg.warmup;
    for (std::size_t k = 0; k < dim; ++k) {
      const double old = u[k];
      u[k] = old + std::exp(log_step[k]) * standard_normal(rng);
      const double proposed = target.log_density(u, scratch);
      const double log_ratio = proposed - current;
      const bool accept = proposed > -inf && (log_ratio >= 0.0 || std::log(uniform01(rng)) < log_ratio);
      if (accept) {
        current = proposed;
      } else {
        u[k] = old;
      }
      if (warming) {
        window_accepted[k] += accept;
        out.warmup_accepted[k] += accept;
      } else {
        out.accepted[k] += accept;
      }
    }
    if (warming && ++window_count == cfg.adaptation_window) {
      ++window_index;
      const double gain = 2.0 / std::sqrt(static_cast<double>(window_index));
      for (std::size_t k = 0; k < dim; ++k) {
        const double rate = window_accepted[k] / cfg.adaptation_window;
        log_step[k] += gain * (rate - cfg.target_acceptance);
        window_accepted[k] = 0.0;
      }
      window_count = 0;
    }
    if (!warming) {
      target.to_theta(u, scratch);
      const auto row = target.row(scratch);
      out.rows.insert(out.rows.end(), row.begin(), row.end());
    }
  }
  for (auto& a : out.accepted) a /= std::max(cfg.iterations, 1);
  return out;
}

}  // namespace

void SamplerConfig::validate() const {
  std::vector<std::string> issues;
  if (chains < 1) issues.emplace_back("chains must be >= 1");
  if (warmup < 0) issues.emplace_back("warmup must be >= 0");
  if (iterations < 1) issues.emplace_back("iterations must be > 0");
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0)) {
    issues.emplace_back("target acceptance must be in (0,1)");
  }
  if (adaptation_window < 1) issues.emplace_back("adaptation window must be >= 1");
  if (!(init_jitter >= 0.0)) issues.emplace_back("init jitter must be >= 0");
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

PosteriorDraws sample_posterior(const PosteriorTarget& target, const SamplerConfig& cfg) {
  cfg.validate();
  PosteriorDraws draws;
  draws.names = target.layout().names();
  draws.seed = cfg.seed;
  const auto dim = static_cast<std::size_t>(target.dimension());
  if (dim == 0) return draws;

  std::vector<ChainOutput> chains(static_cast<std::size_t>(cfg.chains));
  parallel_for(chains.size(), cfg.threads,
               [&](std::size_t c) { chains[c] = run_chain(target, cfg, static_cast<int>(c)); });

  if (cfg.warmup > 0) {
    for (std::size_t c = 0; c < chains.size(); ++c) {
      const auto& acc = chains[c].warmup_accepted;
      if (std::all_of(acc.begin(), acc.end(), [](double a) { return a == 0.0; })) {
        throw DiagnosticError("model '" + target.spec().label + "': chain " + std::to_string(c + 1) +
                              " rejected every warmup proposal (degenerate posterior)");
      }
    }
  }

  const auto n = static_cast<std::size_t>(cfg.iterations);
  draws.values.reserve(chains.size() * n * dim);
  for (std::size_t c = 0; c < chains.size(); ++c) {
    draws.values.insert(draws.values.end(), chains[c].rows.begin(), chains[c].rows.end());
    draws.chain_ids.insert(draws.chain_ids.end(), n, static_cast<int>(c));
  }

  for (std::size_t k = 0; k < dim; ++k) {
    std::vector<std::vector<double>> per_chain(chains.size(), std::vector<double>(n));
    double acceptance = 0.0;
    for (std::size_t c = 0; c < chains.size(); ++c) {
      for (std::size_t i = 0; i < n; ++i) per_chain[c][i] = chains[c].rows[i * dim + k];
      acceptance += chains[c].accepted[k];
    }
    ParameterDiagnostics diag;
    diag.name = draws.names[k];
    diag.acceptance = acceptance / static_cast<double>(chains.size());
    if (n >= 8) {
      if (per_chain.size() >= 2) {
        diag.rhat = rhat(per_chain);
      } else {
        const auto& only = per_chain.front();
        const std::vector<std::vector<double>> halves{
            {only.begin(), only.begin() + static_cast<long>(n / 2)},
            {only.begin() + static_cast<long>(n / 2), only.end()}};
        diag.rhat = rhat(halves);
      }
      diag.ess = ess(per_chain);
    } else {
      diag.rhat = std::numeric_limits<double>::quiet_NaN();
      diag.ess = static_cast<double>(n * chains.size());
    }
    if (diag.rhat > 1.05) {
      std::ostringstream msg;
      msg << "R-hat for " << diag.name << " is " << diag.rhat << " (> 1.05)";
      draws.warnings.push_back(msg.str());
    }
    draws.diagnostics.push_back(diag);
  }
  return draws;
}

PosteriorDraws sample_posterior(const ModelSpec& spec, const Dataset& data, const SamplerConfig& cfg,
                                int direction) {
  const PosteriorTarget target(spec, data, direction);
  return sample_posterior(target, cfg);
}

double rhat(std::span<const std::vector<double>> chains) {
  if (chains.size() < 2) throw ValidationError("R-hat needs at least 2 chains");
  std::size_t n = chains.front().size();
  for (const auto& c : chains) n = std::min(n, c.size());
  if (n < 4) throw ValidationError("R-hat needs at least 4 draws per chain");

  const std::size_t half = n / 2;
  std::vector<double> means;
  std::vector<double> variances;
  for (const auto& c : chains) {
    for (int part = 0; part < 2; ++part) {
      const auto first = c.begin() + static_cast<long>(part == 0 ? 0 : n - half);
      const double mean = std::accumulate(first, first + static_cast<long>(half), 0.0) / half;
      double ss = 0.0;
      for (auto it = first; it != first + static_cast<long>(half); ++it) ss += (*it - mean) * (*it - mean);
      means.push_back(mean);
      variances.push_back(ss / static_cast<double>(half - 1));
    }
  }
  const double m = static_cast<double>(means.size());
  const double len = static_cast<double>(half);
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / m;
  double between = 0.0;
  for (double mu : means) between += (mu - grand) * (mu - grand);
  between *= len / (m - 1.0);
  const double within = std::accumulate(variances.begin(), variances.end(), 0.0) / m;
  if (within <= 0.0) return between <= 0.0 ? 1.0 : inf;
  const double pooled = (len - 1.0) / len * within + between / len;
  return std::sqrt(pooled / within);
}

double ess(std::span<const double> draws) {
  const std::size_t n = draws.size();
  if (n < 8) throw ValidationError("ESS needs at least 8 draws");
  const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / static_cast<double>(n);
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = draws[i] - mean;
  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += centered[i] * centered[i + lag];
    return s / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) return 1.0;

  // Initial positive (and monotone) sequence of paired autocorrelations.
  double sum_pairs = 0.0;
  double previous_pair = inf;
  for (std::size_t t = 0; t + 1 < n; t += 2) {
    double pair = (autocov(t) + autocov(t + 1)) / c0;
    if (pair <= 0.0) break;
    pair = std::min(pair, previous_pair);
    sum_pairs += pair;
    previous_pair = pair;
  }
  const double tau = std::max(-1.0 + 2.0 * sum_pairs, 1.0 / std::log10(static_cast<double>(n)));
  return std::max(1.0, static_cast<double>(n) / tau);
}

double ess(std::span<const std::vector<double>> chains) {
  double total = 0.0;
  for (const auto& c : chains) total += ess(std::span<const double>(c));
  return total;
}

}  // namespace zcurve
