// Command-line front end: config-driven experiments emitting CSV files.
// See README.md for the subcommand reference and config keys.

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "landbubble/bubble.hpp"
#include "landbubble/closed_economy.hpp"
#include "landbubble/config.hpp"
#include "landbubble/csv.hpp"
#include "landbubble/economy.hpp"
#include "landbubble/errors.hpp"
#include "landbubble/open_economy.hpp"
#include "landbubble/wealth.hpp"

namespace lb = landbubble;
namespace fs = std::filesystem;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 12345;
  bool quiet = false;

  lb::config::KeyValueConfig load() const {
    if (config_path.empty()) return {};
    return lb::config::KeyValueConfig::parse_file(config_path);
  }

  std::string out_file(const std::string& name) const {
    return (fs::path(out_dir) / name).string();
  }

  void info(const std::string& line) const {
    if (!quiet) std::cout << line << "\n";
  }
};

double linear_rent(const lb::economy::EconomyParams& econ,
                   const lb::config::KeyValueConfig& cfg) {
  if (const auto* lin = std::get_if<lb::economy::TwoSectorLinearTechnology>(&econ.tech))
    return lin->D;
  return cfg.number("tech.D", 1.0);
}

// Rents and gross rates along a belief segment's permanent solution.
struct SegmentSeries {
  std::vector<double> rents;
  std::vector<double> prices;
  std::vector<double> rates;
};

SegmentSeries segment_series(const lb::economy::EconomyParams& econ,
                             const lb::closed_economy::PermanentSolution& sol) {
  SegmentSeries out;
  const std::size_t T = sol.zbar.size() - 1;
  out.rents.resize(T + 1);
  out.prices.resize(T + 1);
  out.rates.resize(T);
  for (std::size_t t = 0; t <= T; ++t) {
    auto prod = lb::economy::eval_production(econ.tech, sol.K[t]);
    out.rents[t] = prod.F_X;
    out.prices[t] =
        lb::closed_economy::wealth_price_maps(econ, {sol.K[t], sol.zbar[t]}).P;
    if (t < T)
      out.rates[t] =
          sol.zbar[t] * lb::economy::eval_production(econ.tech, sol.K[t + 1]).F_K;
  }
  return out;
}

// Fills the V column from each belief segment's own continuation and
// replaces the regime tags with Montrucchio verdicts on the segment series.
void attach_valuations(lb::closed_economy::EquilibriumPath& path) {
  for (std::size_t i = 0; i < path.schedule.size(); ++i) {
    const auto& econ = path.schedule[i].econ;
    const auto& sol = path.segment_solutions[i];
    auto series = segment_series(econ, sol);
    std::string label;
    try {
      auto verdict = lb::bubble::montrucchio_test(series.rents, series.prices);
      label = lb::bubble::to_string(verdict.classification);
    } catch (const lb::Error&) {
      label.clear();
    }
    const int start = path.schedule[i].start;
    for (auto& p : path.points) {
      if (p.t < start) continue;
      if (i + 1 < path.schedule.size() && p.t >= path.schedule[i + 1].start) continue;
      int tau = p.t - start;
      if (!label.empty()) p.regime = label;
      try {
        p.V = lb::bubble::fundamental_value(series.rents, series.rates, tau,
                                            lb::bubble::TailMode::geometric_extrapolate);
      } catch (const lb::Error&) {
        p.V.reset();
      }
    }
  }
}

void write_path_csv(const lb::closed_economy::EquilibriumPath& path, const std::string& file) {
  path.validate();
  lb::io::CsvBuilder csv("t,K,zbar,W,P,rent,R,price_rent,V,regime");
  for (const auto& p : path.points) {
    csv.cell(p.t).cell(p.K).cell(p.zbar).cell(p.W).cell(p.P).cell(p.rent).cell(p.R).cell(
        p.price_rent);
    if (p.V)
      csv.cell(*p.V);
    else
      csv.cell(std::string("nan"));
    csv.cell(p.regime);
    csv.end_row();
  }
  csv.write(file);
}

void require_converged(const lb::closed_economy::EquilibriumPath& path) {
  if (!path.converged)
    throw lb::NoConvergence("transition solver did not reach the required equilibrium error; best error = " +
                            lb::io::format_number(path.equilibrium_error));
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

void cmd_phase(const GlobalOpts& opts) {
  auto cfg = opts.load();
  auto econ = lb::config::economy_from_config(cfg);
  const auto* ces = std::get_if<lb::economy::CesTechnology>(&econ.tech);
  if (!ces) throw lb::ConfigError("phase: requires tech.kind = CES");
  auto inv_rho_grid = cfg.grid("grid.inv_rho", "0.25:0.25:4.0");
  auto lambda_grid = cfg.grid("grid.lambda", "1.0:0.25:2.5");
  for (double x : inv_rho_grid)
    if (!(x > 0.0)) throw lb::ConfigError("phase: grid.inv_rho values must be positive");

  auto threshold_at = [&](double inv_rho) {
    lb::economy::EconomyParams e = econ;
    lb::economy::CesTechnology tech = *ces;
    tech.rho = 1.0 / inv_rho;
    e.tech = tech;
    return lb::economy::leverage_threshold(e);
  };

  lb::io::CsvBuilder boundary("inv_rho,lambda_bar");
  for (double x : inv_rho_grid) boundary.cell(x).cell(threshold_at(x)).end_row();
  boundary.write(opts.out_file("phase_boundary.csv"));

  lb::io::CsvBuilder regimes("inv_rho,lambda,regime");
  for (double x : inv_rho_grid) {
    double lb_x = threshold_at(x);
    for (double lam : lambda_grid)
      regimes.cell(x).cell(lam).cell(std::string(lam > lb_x ? "bubbly" : "fundamental")).end_row();
  }
  regimes.write(opts.out_file("phase_regimes.csv"));
  opts.info("phase: wrote phase_boundary.csv, phase_regimes.csv");
}

void cmd_steady(const GlobalOpts& opts) {
  auto cfg = opts.load();
  auto econ = lb::config::economy_from_config(cfg);
  auto ss = lb::closed_economy::solve_steady_state(econ);
  lb::io::CsvBuilder csv("K,zbar,W,P,R,residual_K,residual_z");
  csv.cell(ss.K).cell(ss.zbar).cell(ss.W).cell(ss.P).cell(ss.R).cell(ss.residual_K).cell(ss.residual_z);
  csv.end_row();
  csv.write(opts.out_file("steady.csv"));
  opts.info("steady: K = " + lb::io::format_number(ss.K) +
            ", zbar = " + lb::io::format_number(ss.zbar));
}

void cmd_growth(const GlobalOpts& opts) {
  auto cfg = opts.load();
  auto econ = lb::config::economy_from_config(cfg);
  auto grid = cfg.grid("grid.lambda", "1.0:0.1:3.0");
  lb::io::CsvBuilder csv("lambda,G,v,residual,regime");
  for (double lam : grid) {
    lb::economy::EconomyParams e = econ;
    e.lambda = lam;
    auto g = lb::closed_economy::solve_growth_rate(e);
    csv.cell(lam).cell(g.G).cell(g.v).cell(g.residual).cell(
        std::string(g.expanding ? "bubbly" : "fundamental"));
    csv.end_row();
  }
  csv.write(opts.out_file("growth.csv"));
  opts.info("growth: wrote growth.csv");
}

std::vector<lb::closed_economy::ScheduleSegment> schedule_from_config(
    const lb::config::KeyValueConfig& cfg, const lb::economy::EconomyParams& base) {
  std::vector<lb::closed_economy::ScheduleSegment> schedule;
  const bool has_shock = cfg.has("shock.lambda") || cfg.has("shock.gamma");
  if (!has_shock) return {{0, base}};
  lb::economy::EconomyParams shocked = base;
  if (cfg.has("shock.lambda")) shocked.lambda = cfg.required_number("shock.lambda");
  if (cfg.has("shock.gamma"))
    shocked.dist = lb::economy::exponential_dist(cfg.required_number("shock.gamma"));
  try {
    shocked.validate();
  } catch (const lb::Error& e) {
    throw lb::ConfigError(std::string("invalid shock parameters: ") + e.what());
  }
  int start = static_cast<int>(cfg.integer("shock.start", 0));
  if (start < 0) throw lb::ConfigError("shock.start must be >= 0");
  if (start > 0) schedule.push_back({0, base});
  schedule.push_back({start, shocked});
  if (cfg.has("shock.end")) {
    int end = static_cast<int>(cfg.integer("shock.end", 0));
    if (end <= start) throw lb::ConfigError("shock.end must exceed shock.start");
    schedule.push_back({end, base});
  }
  return schedule;
}

double initial_capital(const lb::config::KeyValueConfig& cfg,
                       const lb::economy::EconomyParams& first_econ) {
  if (cfg.has("init.K0")) return cfg.required_number("init.K0");
  double lam_bar = lb::economy::leverage_threshold(first_econ);
  if (first_econ.lambda >= lam_bar)
    throw lb::ConfigError(
        "init.K0 is required when the first segment is bubbly (no steady state to start from)");
  return lb::closed_economy::solve_steady_state(first_econ).K;
}

void cmd_transition(const GlobalOpts& opts) {
  auto cfg = opts.load();
  auto econ = lb::config::economy_from_config(cfg);
  auto schedule = schedule_from_config(cfg, econ);
  int T = static_cast<int>(cfg.integer("horizon.T", 200));
  int J = static_cast<int>(cfg.integer("knots.J", 10));
  double K0 = initial_capital(cfg, schedule.front().econ);
  auto path = lb::closed_economy::solve_transition(schedule, K0, T, J);
  require_converged(path);
  attach_valuations(path);
  write_path_csv(path, opts.out_file("transition.csv"));
  opts.info("transition: wrote transition.csv (equilibrium error " +
            lb::io::format_number(path.equilibrium_error) + ")");
}

void cmd_fig2(const GlobalOpts& opts) {
  auto cfg = opts.load();
  auto base = lb::config::economy_from_config(cfg);
  const auto* ces = std::get_if<lb::economy::CesTechnology>(&base.tech);
  if (!ces || ces->rho != 1.0 || base.lambda != 1.0)
    throw lb::ConfigError("fig2: baseline must be Cobb-Douglas (tech.rho = 1) with lambda = 1");

  const int shock_start = static_cast<int>(cfg.integer("shock.start", 0));
  const int shock_end = static_cast<int>(cfg.integer("shock.end", 10));
  if (shock_start != 0) throw lb::ConfigError("fig2: shock.start must be 0");
  if (shock_end <= 0) throw lb::ConfigError("fig2: shock.end must be positive");
  const double shock_lambda = cfg.number("shock.lambda", 2.0);
  const double shock_gamma = cfg.number("shock.gamma", -std::log(0.15));
  const int T = static_cast<int>(cfg.integer("horizon.T", 40));
  const int J = static_cast<int>(cfg.integer("knots.J", 10));
  const int pre_periods = 5;

  auto ss = lb::closed_economy::solve_steady_state(base);
  auto rent_ss = lb::economy::eval_production(base.tech, ss.K).F_X;

  auto run_case = [&](const std::string& name, const lb::economy::EconomyParams& shocked) {
    std::vector<lb::closed_economy::ScheduleSegment> schedule{{0, shocked}, {shock_end, base}};
    auto path = lb::closed_economy::solve_transition(schedule, ss.K, T, J);
    require_converged(path);
    attach_valuations(path);
    write_path_csv(path, opts.out_file("fig2_" + name + "_path.csv"));

    // Normalized view: price and rent are 1 for every t < 0.
    lb::io::CsvBuilder norm("t,price,rent,price_rent,regime");
    for (int t = -pre_periods; t < 0; ++t)
      norm.cell(t).cell(1.0).cell(1.0).cell(1.0).cell(std::string("fundamental")).end_row();
    for (const auto& p : path.points) {
      norm.cell(p.t)
          .cell(p.P / ss.P)
          .cell(p.rent / rent_ss)
          .cell((p.P / ss.P) / (p.rent / rent_ss))
          .cell(p.regime)
          .end_row();
    }
    norm.write(opts.out_file("fig2_" + name + ".csv"));
  };

  lb::economy::EconomyParams lev = base;
  lev.lambda = shock_lambda;
  run_case("leverage", lev);

  lb::economy::EconomyParams prod = base;
  prod.dist = lb::economy::exponential_dist(shock_gamma);
  run_case("productivity", prod);
  opts.info("fig2: wrote fig2_leverage{,_path}.csv, fig2_productivity{,_path}.csv");
}

void cmd_trend(const GlobalOpts& opts) {
  auto cfg = opts.load();
  auto econ = lb::config::economy_from_config(cfg);
  double K0 = cfg.number("init.K0", 1.0);
  double D = linear_rent(econ, cfg);
  auto eq = lb::open_economy::solve_trend_stationary(econ, K0, D);
  lb::io::CsvBuilder csv("lambda,regime,R,G,zbar,alpha_coef,B,bubble_coef,fundamental_level,residual");
  csv.cell(econ.lambda)
      .cell(lb::open_economy::to_string(eq.regime))
      .cell(eq.R)
      .cell(eq.G)
      .cell(eq.zbar)
      .cell(eq.alpha_coef)
      .cell(eq.B)
      .cell(eq.bubble_coef)
      .cell(eq.fundamental_level)
      .cell(eq.residual);
  csv.end_row();
  csv.write(opts.out_file("trend.csv"));
  opts.info("trend: " + lb::open_economy::to_string(eq.regime) +
            " equilibrium, R = " + lb::io::format_number(eq.R));
}

void cmd_rates(const GlobalOpts& opts) {
  auto cfg = opts.load();
  auto econ = lb::config::economy_from_config(cfg);
  auto grid = cfg.grid("grid.lambda", "1.0:0.05:3.0");
  double K0 = cfg.number("init.K0", 1.0);
  double D = linear_rent(econ, cfg);
  auto curve = lb::open_economy::rate_curve(econ, grid, K0, D);
  lb::io::CsvBuilder csv("lambda,R,G,regime");
  for (const auto& p : curve)
    csv.cell(p.lambda).cell(p.R).cell(p.G).cell(lb::open_economy::to_string(p.regime)).end_row();
  csv.write(opts.out_file("rates.csv"));
  opts.info("rates: wrote rates.csv");
}

void cmd_pareto(const GlobalOpts& opts) {
  auto cfg = opts.load();
  auto econ = lb::config::economy_from_config(cfg);
  if (!econ.upsilon) econ.upsilon = cfg.number("upsilon", lb::wealth::kDefaultSurvival);
  auto grid = cfg.grid("grid.lambda", "1.0:0.1:3.0");
  double K0 = cfg.number("init.K0", 1.0);
  double D = linear_rent(econ, cfg);
  auto N = cfg.integer("mc.N", 0);
  int mcT = static_cast<int>(cfg.integer("mc.T", 1000));

  const bool with_mc = N > 0;
  lb::io::CsvBuilder csv(with_mc ? "lambda,regime,R,zeta,hill,ci_lo,ci_hi"
                                 : "lambda,regime,R,zeta");
  for (double lam : grid) {
    lb::economy::EconomyParams e = econ;
    e.lambda = lam;
    auto eq = lb::open_economy::solve_trend_stationary(e, K0, D);
    auto spec = lb::wealth::make_wealth_spec(e, eq);
    auto sol = lb::wealth::solve_pareto_exponent(spec);
    csv.cell(lam).cell(lb::open_economy::to_string(eq.regime)).cell(eq.R).cell(sol.zeta);
    if (with_mc) {
      auto panel = lb::wealth::simulate_wealth_panel(spec, N, mcT, opts.seed);
      auto ci = lb::wealth::hill_confidence(
          panel.hill, static_cast<std::int64_t>(std::ceil(0.01 * static_cast<double>(N))));
      csv.cell(panel.hill).cell(ci.first).cell(ci.second);
    }
    csv.end_row();
  }
  csv.write(opts.out_file("pareto.csv"));
  opts.info("pareto: wrote pareto.csv");
}

void cmd_simulate(const GlobalOpts& opts) {
  auto cfg = opts.load();
  auto econ = lb::config::economy_from_config(cfg);
  if (!econ.upsilon) econ.upsilon = cfg.number("upsilon", lb::wealth::kDefaultSurvival);
  double K0 = cfg.number("init.K0", 1.0);
  double D = linear_rent(econ, cfg);
  auto N = cfg.integer("mc.N", 100000);
  int mcT = static_cast<int>(cfg.integer("mc.T", 1000));

  auto eq = lb::open_economy::solve_trend_stationary(econ, K0, D);
  auto spec = lb::wealth::make_wealth_spec(econ, eq);
  auto sol = lb::wealth::solve_pareto_exponent(spec);
  auto panel = lb::wealth::simulate_wealth_panel(spec, N, mcT, opts.seed);

  lb::io::CsvBuilder csv("s");
  for (double s : panel.samples) csv.cell(s).end_row();
  csv.write(opts.out_file("simulate.csv"));

  auto ci = lb::wealth::hill_confidence(
      panel.hill, static_cast<std::int64_t>(std::ceil(0.01 * static_cast<double>(N))));
  lb::io::CsvBuilder summary("N,T,seed,regime,R,zeta,hill,ci_lo,ci_hi");
  summary.cell(N).cell(mcT).cell(static_cast<long long>(opts.seed))
      .cell(lb::open_economy::to_string(eq.regime))
      .cell(eq.R)
      .cell(sol.zeta)
      .cell(panel.hill)
      .cell(ci.first)
      .cell(ci.second);
  summary.end_row();
  summary.write(opts.out_file("simulate_summary.csv"));
  opts.info("simulate: hill = " + lb::io::format_number(panel.hill) +
            " (zeta = " + lb::io::format_number(sol.zeta) + ")");
}

void cmd_bubbletest(const GlobalOpts& opts, const std::string& input) {
  auto table = lb::io::CsvTable::read(input);
  auto rents = table.numbers("rent");
  auto prices = table.numbers("price");
  auto cfg = opts.load();
  lb::bubble::MontrucchioOptions mopts;
  mopts.margin = cfg.number("bubble.margin", 0.02);
  auto verdict = lb::bubble::montrucchio_test(rents, prices, mopts);

  std::optional<double> v0;
  if (table.column("rate") >= 0) {
    try {
      v0 = lb::bubble::fundamental_value(rents, table.numbers("rate"), 0,
                                         lb::bubble::TailMode::geometric_extrapolate);
    } catch (const lb::Error&) {
      v0.reset();
    }
  }

  lb::io::CsvBuilder csv("classification,fitted_ratio,tvc_estimate,margin,degenerate,n_periods,V0");
  csv.cell(lb::bubble::to_string(verdict.classification))
      .cell(verdict.fitted_ratio)
      .cell(verdict.tvc_estimate)
      .cell(verdict.margin)
      .cell(static_cast<int>(verdict.degenerate))
      .cell(static_cast<long long>(rents.size()));
  if (v0)
    csv.cell(*v0);
  else
    csv.cell(std::string("nan"));
  csv.end_row();
  csv.write(opts.out_file("bubbletest_verdict.csv"));

  if (!opts.quiet) {
    std::cout << "series length: " << rents.size() << "\n"
              << "classification: " << lb::bubble::to_string(verdict.classification)
              << (verdict.degenerate ? " (degenerate: zero dividends)" : "") << "\n"
              << "fitted rent/price ratio: " << lb::io::format_number(verdict.fitted_ratio) << "\n"
              << "transversality estimate (lim q_T P_T): "
              << lb::io::format_number(verdict.tvc_estimate) << "\n";
    if (v0)
      std::cout << "fundamental value V_0: " << lb::io::format_number(*v0)
                << " vs price P_0 = " << lb::io::format_number(prices.front()) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"landbubble: leverage, land-price regimes, and wealth tails"};
  app.require_subcommand(1);

  GlobalOpts opts;
  app.add_option("--config", opts.config_path, "Path to a key=value config file");
  app.add_option("--out", opts.out_dir, "Output directory (default: current)");
  app.add_option("--seed", opts.seed, "RNG seed for Monte Carlo subcommands");
  app.add_flag("--quiet", opts.quiet, "Suppress progress output");

  auto* phase = app.add_subcommand("phase", "Leverage-threshold phase diagram over 1/rho");
  auto* steady = app.add_subcommand("steady", "Closed-economy steady state (lambda < lambda_bar)");
  auto* growth = app.add_subcommand("growth", "Long-run growth rate G(lambda)");
  auto* transition = app.add_subcommand("transition", "Closed-economy transition path for a shock schedule");
  auto* fig2 = app.add_subcommand("fig2", "Leverage- and productivity-driven bubble experiments");
  auto* trend = app.add_subcommand("trend", "Open-economy trend-stationary equilibrium");
  auto* rates = app.add_subcommand("rates", "Interest rate vs leverage curve");
  auto* pareto = app.add_subcommand("pareto", "Wealth Pareto exponents over a leverage grid");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo wealth panel cross-section");
  auto* bubbletest = app.add_subcommand("bubbletest", "Classify a rent/price series as fundamental or bubbly");
  std::string bubbletest_input;
  bubbletest->add_option("--input", bubbletest_input, "CSV with columns t,rent,price[,rate]")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (phase->parsed()) cmd_phase(opts);
    if (steady->parsed()) cmd_steady(opts);
    if (growth->parsed()) cmd_growth(opts);
    if (transition->parsed()) cmd_transition(opts);
    if (fig2->parsed()) cmd_fig2(opts);
    if (trend->parsed()) cmd_trend(opts);
    if (rates->parsed()) cmd_rates(opts);
    if (pareto->parsed()) cmd_pareto(opts);
    if (simulate->parsed()) cmd_simulate(opts);
    if (bubbletest->parsed()) cmd_bubbletest(opts, bubbletest_input);
  } catch (const lb::Error& e) {
    std::cerr << "error[" << e.exit_code() << "]: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
