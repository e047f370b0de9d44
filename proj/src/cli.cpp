#include "levy/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "levy/errors.hpp"
#include "levy/exact_dist.hpp"
#include "levy/format.hpp"
#include "levy/harness.hpp"
#include "levy/report_io.hpp"

namespace levy::cli {

namespace fs = std::filesystem;

namespace {

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_list(text)) {
    if (v != std::floor(v)) throw ConfigError("expected an integer, got " + format_double(v));
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// Registers options on a subcommand and remembers how to write each one back
// as `key=value`, so the manifest carries the fully resolved configuration.
class Binder {
 public:
  explicit Binder(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& key, T& ref, const std::string& help) {
    entries_.push_back({key, [&ref]() -> std::optional<std::string> { return render(ref); }});
    if constexpr (std::is_same_v<T, bool>) {
      return app_->add_flag("--" + key, ref, help);
    } else {
      return app_->add_option("--" + key, ref, help);
    }
  }

  CLI::Option* add_list(const std::string& key, std::string& ref, const std::string& help) {
    return add(key, ref, help)->multi_option_policy(CLI::MultiOptionPolicy::Join)->delimiter(',');
  }

  CLI::App* app() const { return app_; }

  void write(std::ostream& os) const {
    os << '[' << app_->get_name() << "]\n";
    for (const auto& e : entries_) {
      if (auto v = e.value()) os << e.key << '=' << *v << '\n';
    }
  }

 private:
  static std::optional<std::string> render(const std::string& v) { return '"' + v + '"'; }
  static std::optional<std::string> render(double v) { return format_double(v); }
  static std::optional<std::string> render(bool v) { return std::string(v ? "true" : "false"); }
  template <class I>
    requires std::is_integral_v<I>
  static std::optional<std::string> render(I v) {
    return std::to_string(v);
  }
  template <class T>
  static std::optional<std::string> render(const std::optional<T>& v) {
    if (!v) return std::nullopt;
    return render(*v);
  }

  struct Entry {
    std::string key;
    std::function<std::optional<std::string>()> value;
  };
  CLI::App* app_;
  std::vector<Entry> entries_;
};

struct ModelOptions {
  double alpha = 1.0;
  std::string ell = "constant:1";
  double neg_ratio = 0.0;
  std::string cutoff = "auto";

  void bind(Binder& b) {
    b.add("alpha", alpha, "Tail index in (0,2)");
    b.add("ell", ell, "Slowly varying factor: constant:C, logpower:B, explogpower:B or loglog");
    b.add("neg-ratio", neg_ratio, "Negative tail as a multiple r of the positive tail");
    b.add("cutoff", cutoff, "Largest jump size: 1, inf or auto");
  }

  LevyMeasureSpec spec() const {
    std::optional<double> c;
    if (cutoff != "auto") c = parse_number(cutoff);
    return LevyMeasureSpec::make(alpha, SlowlyVarying::parse(ell), neg_ratio, c);
  }
};

struct RunOptions {
  ModelOptions model;
  std::string t_grid = "1e-2,1e-4";
  double q = 0.9;
  std::size_t replicates = 1000;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool serial = false;
  std::optional<double> eps;
  std::string eps_budget;
  std::string eps_mode = "banded";
  double band_q = 0.9;
  double floor_prob = 1e-6;
  std::string out_dir = "results";

  // simulate
  std::string x_grid = "0.5,1,2";
  std::string quantiles;
  // yz / de
  std::string centered = "auto";
  int interior_points = 8;
  std::size_t dump_jumps = 0;
  std::size_t dump_paths = 0;
  // validate-ineq
  std::string a_grid = "0.05,0.1,0.2";
  std::string b_grid = "0.1,0.2,0.4";
  std::string p_list = "1,2,5";
  double eps_frac = 0.5;
  std::string neg_x = "10,20,50";
  std::string neg_budget = "0.5";
};

enum class Command { MtExact, Simulate, Yz, De, Ineq, Ssv };

void bind_run(Binder& b, RunOptions& o, Command cmd, const std::string& default_budget) {
  o.eps_budget = default_budget;
  o.model.bind(b);
  b.add_list("t-grid", o.t_grid, "Report times: a:b (decades), a:b:n (log-spaced) or a comma list");
  b.add("q", o.q, "Geometric time-grid ratio in (0,1)");
  b.add("replicates", o.replicates, "Number of Monte Carlo replicates");
  b.add("seed", o.seed, "Master seed; a fresh one is drawn and recorded when omitted");
  b.add("threads", o.threads, "Worker cap (0: all cores)");
  b.add("serial", o.serial, "Use the serial reference loop");
  b.add("eps", o.eps, "Explicit uniform jump threshold (overrides --eps-budget)");
  b.add("eps-budget", o.eps_budget, "Truncation error budget relative to the norming scale (inf: exact law)");
  b.add("eps-mode", o.eps_mode, "Threshold layout: banded or uniform")
      ->check(CLI::IsMember({"banded", "uniform"}));
  b.add("band-q", o.band_q, "Ratio between consecutive threshold bands");
  b.add("floor-prob", o.floor_prob, "Levels below the Frechet quantile of this probability may be truncated");
  b.add("out-dir", o.out_dir, "Output directory");

  switch (cmd) {
    case Command::Simulate:
      b.add_list("x-grid", o.x_grid, "Levels z, checked at x = z (-log t)^{1/alpha}");
      b.add_list("quantiles", o.quantiles, "Exact-law quantile levels to check instead of --x-grid");
      b.add("dump-jumps", o.dump_jumps, "Write the jumps of the first N replicates");
      break;
    case Command::Yz:
    case Command::De:
      b.add("centered", o.centered, "Center the path by c(t): true, false or auto (alpha == 1)")
          ->check(CLI::IsMember({"auto", "true", "false"}));
      b.add("interior-points", o.interior_points, "Interior evaluation points per drift segment");
      b.add("dump-jumps", o.dump_jumps, "Write the jumps of the first N replicates");
      b.add("dump-paths", o.dump_paths, "Write Y, Z, M of the first N replicates");
      break;
    case Command::Ineq:
      b.add_list("a-grid", o.a_grid, "Truncation levels a");
      b.add_list("b-grid", o.b_grid, "Levels b");
      b.add_list("p-list", o.p_list, "Integer exponents p");
      b.add("eps-frac", o.eps_frac, "Jump threshold of the negative-part diagnostic, as a fraction");
      b.add_list("neg-x", o.neg_x, "Levels x of the negative-part diagnostic");
      b.add("neg-budget", o.neg_budget, "Error budget of the negative-part diagnostic");
      break;
    default:
      break;
  }
}

ExperimentConfig make_config(const RunOptions& o, Command cmd) {
  ExperimentConfig cfg;
  cfg.spec = o.model.spec();
  switch (cmd) {
    case Command::Simulate: cfg.kind = ExperimentKind::Mt; break;
    case Command::Yz: cfg.kind = ExperimentKind::Yz; break;
    case Command::De: cfg.kind = ExperimentKind::De; break;
    default: cfg.kind = ExperimentKind::Ineq; break;
  }
  cfg.report_times = parse_t_grid(o.t_grid);
  cfg.q = o.q;
  cfg.replicates = o.replicates;
  cfg.seed = o.seed.value_or(0);
  cfg.threads = o.threads;
  cfg.serial = o.serial;
  cfg.eps = o.eps;
  cfg.eps_budget = parse_number(o.eps_budget);
  cfg.eps_mode = o.eps_mode == "uniform" ? EpsMode::Uniform : EpsMode::Banded;
  cfg.band_q = o.band_q;
  cfg.floor_prob = o.floor_prob;
  cfg.x_grid = parse_list(o.x_grid);
  cfg.quantile_levels = parse_list(o.quantiles);
  cfg.centered = o.centered == "auto" ? cfg.spec.alpha == 1.0 : o.centered == "true";
  cfg.interior_points = o.interior_points;
  cfg.a_grid = parse_list(o.a_grid);
  cfg.b_grid = parse_list(o.b_grid);
  cfg.p_list = parse_int_list(o.p_list);
  cfg.eps_frac = o.eps_frac;
  cfg.neg_x = parse_list(o.neg_x);
  if (o.threads < 0) throw ConfigError("--threads must be >= 0");
  cfg.validate();
  return cfg;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  return os;
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
  return fs::path(dir);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

void write_manifest(const fs::path& dir, const Binder& binder, const std::string& config_path) {
  auto os = open_out(dir / "manifest.ini");
  os << "; levy-extremes " << kToolVersion << '\n'
     << "; written " << utc_timestamp() << '\n'
     << "; config " << (config_path.empty() ? "(none)" : config_path) << '\n'
     << "; re-run: levy-extremes --config manifest.ini " << binder.app()->get_name() << '\n';
  binder.write(os);
}

void print_report(std::ostream& out, const ExperimentReport& rep, const fs::path& dir) {
  out << to_string(rep.kind) << ": " << rep.replicates << " replicates, seed " << rep.seed << ", eps_min "
      << format_double(rep.eps_min) << ", expected jumps " << format_double(rep.expected_jumps) << '\n';
  for (const auto& n : rep.notes) out << "note: " << n << '\n';
  for (const auto& f : rep.failures) out << "FAIL: " << f << '\n';
  out << (rep.passed() ? "PASS" : "FAIL") << " (outputs in " << dir.string() << ")\n";
}

int run_simulation(Command cmd, RunOptions& o, const Binder& binder, const std::string& config_path,
                   std::ostream& out) {
  if (!o.seed) o.seed = std::random_device{}() | (std::uint64_t{std::random_device{}()} << 32);
  const ExperimentConfig cfg = make_config(o, cmd);
  const fs::path dir = prepare_dir(o.out_dir);
  write_manifest(dir, binder, config_path);

  if (cmd == Command::Ineq) {
    const auto rep = run_inequality_validation(cfg);
    {
      auto os = open_out(dir / "ineq.csv");
      write_ineq_csv(os, rep);
    }
    std::optional<ExperimentReport> negpart;
    if (cfg.spec.neg_ratio > 0.0) {
      ExperimentConfig neg = cfg;
      neg.kind = ExperimentKind::NegPart;
      neg.eps_budget = parse_number(o.neg_budget);
      negpart = run_negative_part_diagnostic(neg);
      auto os = open_out(dir / "negpart.csv");
      write_negpart_csv(os, *negpart);
    }
    {
      auto os = open_out(dir / "summary.json");
      os << summary_json(rep);
    }
    print_report(out, rep, dir);
    if (negpart) print_report(out, *negpart, dir);
    return rep.passed() ? 0 : 1;
  }

  const auto rep = run_experiment(cfg);
  {
    auto os = open_out(dir / "stats.csv");
    write_stats_csv(os, rep);
  }
  {
    auto os = open_out(dir / "summary.json");
    os << summary_json(rep);
  }
  if (o.dump_jumps > 0 || o.dump_paths > 0) {
    const ReplicateContext ctx(cfg);
    const std::size_t n = std::min(cfg.replicates, std::max(o.dump_jumps, o.dump_paths));
    for (std::size_t i = 0; i < n; ++i) {
      const auto js = ctx.jumps(i);
      if (i < o.dump_jumps) {
        auto os = open_out(dir / ("jumps_" + std::to_string(i) + ".csv"));
        write_jumps_csv(os, js);
      }
      if (i < o.dump_paths) {
        auto os = open_out(dir / ("paths_" + std::to_string(i) + ".csv"));
        const auto ex = ctx.extremes(js);
        write_paths_csv(os, ex);
      }
    }
  }
  print_report(out, rep, dir);
  return rep.passed() ? 0 : 1;
}

struct ExactOptions {
  ModelOptions model;
  std::string t = "0.01";
  std::string x = "0.5,1,2";
  std::string out_dir;
};

int run_mt_exact(const ExactOptions& o, std::ostream& out) {
  const auto spec = o.model.spec();
  const NormingScale scale(spec);
  const auto ts = parse_t_grid(o.t);
  const auto xs = parse_list(o.x);
  if (ts.empty() || xs.empty()) throw ConfigError("mt-exact needs --t and --x");
  if (ts.size() == 1 && xs.size() == 1) {
    out << format_double(mt_cdf_exact(scale, ts[0], xs[0])) << '\n';
  } else {
    out << "t,x,F\n";
    for (double t : ts) {
      for (double x : xs) out << format_double(t) << ',' << format_double(x) << ',' << format_double(mt_cdf_exact(scale, t, x)) << '\n';
    }
  }
  if (!o.out_dir.empty()) {
    const fs::path dir = prepare_dir(o.out_dir);
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const auto curve = mt_cdf_curve(scale, ts[k], xs);
      auto os = open_out(dir / (ts.size() == 1 ? std::string("cdf.csv") : "cdf_" + std::to_string(k) + ".csv"));
      write_cdf_csv(os, curve);
    }
  }
  return 0;
}

struct SsvOptions {
  std::string ell = "loglog";
  double delta = 2.0;
  std::string t_grid = "1e-4:1e-16";
  std::string out_dir;
};

int run_ssv(const SsvOptions& o, std::ostream& out) {
  const auto ell = SlowlyVarying::parse(o.ell);
  const auto ts = parse_t_grid(o.t_grid);
  if (!(o.delta > 0.0)) throw ConfigError("--delta must be positive");
  const auto dev = ssv_diagnostic(ell, o.delta, ts);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out << "t=" << format_double(ts[i]) << "  sup_deviation=" << format_double(dev[i]) << '\n';
  }
  out << ell.to_string() << ": " << (ssv_verdict(dev) ? "super-slowly varying" : "NOT super-slowly varying")
      << '\n';
  if (!o.out_dir.empty()) {
    auto os = open_out(prepare_dir(o.out_dir) / "ssv.csv");
    write_ssv_csv(os, ts, dev);
  }
  return 0;
}

// CLI11 reads the config file only through an app-level option placed before
// the subcommand; accept it anywhere by moving it to the front.
std::vector<std::string> hoist_config(const std::vector<std::string>& args) {
  std::vector<std::string> front;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      front.push_back(args[i]);
      front.push_back(args[++i]);
    } else if (args[i].rfind("--config=", 0) == 0) {
      front.push_back(args[i]);
    } else {
      rest.push_back(args[i]);
    }
  }
  front.insert(front.end(), rest.begin(), rest.end());
  return front;
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number(item));
  return out;
}

std::vector<double> parse_t_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_list(text);
  const auto parts = split(text, ':');
  if (parts.size() != 2 && parts.size() != 3) throw ConfigError("bad time grid '" + text + "'");
  const double a = parse_number(parts[0]);
  const double b = parse_number(parts[1]);
  if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("time grid endpoints must be positive");
  const double la = std::log10(a);
  const double lb = std::log10(b);
  std::vector<double> out;
  if (parts.size() == 3) {
    const double n = parse_number(parts[2]);
    if (n < 2 || n != std::floor(n)) throw ConfigError("time grid needs an integer count >= 2");
    for (int k = 0; k < n; ++k) out.push_back(std::pow(10.0, la + (lb - la) * k / (n - 1)));
    out.front() = a;
    out.back() = b;
    return out;
  }
  const double span = std::abs(la - lb);
  if (std::abs(span - std::round(span)) > 1e-9) throw ConfigError("a:b grids need endpoints a whole number of decades apart");
  const int steps = static_cast<int>(std::round(span));
  const double dir = lb < la ? -1.0 : 1.0;
  const bool whole = std::abs(la - std::round(la)) < 1e-12;
  for (int k = 0; k <= steps; ++k) {
    out.push_back(whole ? std::pow(10.0, std::round(la) + dir * k) : a * std::pow(10.0, dir * k));
  }
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Small-time extremes of Levy processes", "levy-extremes"};
  app.set_version_flag("--version", kToolVersion);
  app.set_config("--config", "", "Configuration file with one [subcommand] section per experiment", false);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  ExactOptions exact;
  auto* mt = app.add_subcommand("mt-exact", "Exact law of the maximum jump after time t");
  Binder mt_b(mt);
  exact.model.bind(mt_b);
  mt_b.add_list("t", exact.t, "Times in (0,1)");
  mt_b.add_list("x", exact.x, "Levels x");
  mt_b.add("out-dir", exact.out_dir, "Write cdf.csv here");

  RunOptions sim_o, yz_o, de_o, ineq_o;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo check of the maximum-jump law");
  auto* yz = app.add_subcommand("yz", "Scaled suprema Y, Z, M and their Frechet limits");
  auto* de = app.add_subcommand("de", "Growth of P(Y = Z) as t decreases");
  auto* ineq = app.add_subcommand("validate-ineq", "Empirical check of the exponential bounds");
  Binder sim_b(sim), yz_b(yz), de_b(de), ineq_b(ineq);
  bind_run(sim_b, sim_o, Command::Simulate, "inf");
  bind_run(yz_b, yz_o, Command::Yz, "0.5");
  bind_run(de_b, de_o, Command::De, "0.5");
  bind_run(ineq_b, ineq_o, Command::Ineq, "0.5");
  de_o.t_grid = "1e-2,1e-4,1e-6";
  ineq_o.t_grid = "0.02,0.01,0.005";
  ineq_o.model.neg_ratio = 0.5;

  SsvOptions ssv_o;
  auto* ssv = app.add_subcommand("ssv-check", "Numerical super-slow-variation diagnostic");
  ssv->add_option("--ell", ssv_o.ell, "Slowly varying factor");
  ssv->add_option("--delta", ssv_o.delta, "Largest exponent Delta");
  ssv->add_option("--t-grid", ssv_o.t_grid, "Times: a:b, a:b:n or a comma list")
      ->multi_option_policy(CLI::MultiOptionPolicy::Join)
      ->delimiter(',');
  ssv->add_option("--out-dir", ssv_o.out_dir, "Write ssv.csv here");

  auto args = hoist_config(raw_args);
  std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return e.get_exit_code() == 0 ? code : 2;
  }

  std::string config_path;
  if (auto* c = app.get_config_ptr(); c && c->count() > 0) config_path = c->as<std::string>();

  try {
    if (mt->parsed()) return run_mt_exact(exact, out);
    if (ssv->parsed()) return run_ssv(ssv_o, out);
    if (sim->parsed()) return run_simulation(Command::Simulate, sim_o, sim_b, config_path, out);
    if (yz->parsed()) return run_simulation(Command::Yz, yz_o, yz_b, config_path, out);
    if (de->parsed()) return run_simulation(Command::De, de_o, de_b, config_path, out);
    if (ineq->parsed()) return run_simulation(Command::Ineq, ineq_o, ineq_b, config_path, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace levy::cli
