#include "csthresh/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "csthresh/errors.hpp"
#include "csthresh/parallel.hpp"

namespace csthresh::cli {

using json = nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_grid(std::string_view spec) {
  const std::string s(spec);
  const auto p1 = s.find(':');
  const auto p2 = p1 == std::string::npos ? std::string::npos : s.find(':', p1 + 1);
  if (p2 == std::string::npos || s.find(':', p2 + 1) != std::string::npos) {
    throw DomainError("grid must look like start:stop:step, got '" + s + "'");
  }
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
  try {
    std::size_t used = 0;
    const std::string a = s.substr(0, p1);
    const std::string b = s.substr(p1 + 1, p2 - p1 - 1);
    const std::string c = s.substr(p2 + 1);
    start = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    stop = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    step = std::stod(c, &used);
    if (used != c.size()) throw std::invalid_argument(c);
  } catch (const std::logic_error&) {
    throw DomainError("grid has a non-numeric field: '" + s + "'");
  }
  if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(stop)) {
    throw DomainError("grid step must be positive and bounds finite");
  }
  const double span = (stop - start) / step;
  if (span < -0.5) throw DomainError("grid '" + s + "' is empty");
  const auto count = static_cast<std::size_t>(std::floor(span + 0.5)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + static_cast<double>(i) * step;
  return out;
}

Eigen::MatrixXd read_matrix(std::istream& in) {
  long m = 0;
  long n = 0;
  if (!(in >> m >> n) || m <= 0 || n <= 0) {
    throw DomainError("matrix header must be two positive integers 'm n'");
  }
  Eigen::MatrixXd A(m, n);
  for (long i = 0; i < m; ++i) {
    for (long j = 0; j < n; ++j) {
      if (!(in >> A(i, j))) throw DomainError("matrix file ended early or has a bad entry");
    }
  }
  std::string extra;
  if (in >> extra) throw DomainError("matrix file has trailing data");
  return A;
}

Eigen::MatrixXd read_matrix_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open matrix file " + path);
  return read_matrix(f);
}

std::string curve_csv(const std::vector<CurvePoint>& points) {
  std::ostringstream o;
  o << "kind,beta,theta_hat,alpha_min,eps,flags\n";
  for (const auto& p : points) {
    o << to_string(p.kind) << ',' << format_double(p.beta) << ',' << format_double(p.theta_hat)
      << ',' << format_double(p.alpha_min) << ',' << format_double(p.eps) << ',' << p.flags()
      << '\n';
  }
  return o.str();
}

namespace {

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string curve_json(const std::vector<CurvePoint>& points) {
  json arr = json::array();
  for (const auto& p : points) {
    arr.push_back({{"kind", std::string(to_string(p.kind))},
                   {"beta", p.beta},
                   {"theta_hat", nullable(p.theta_hat)},
                   {"alpha_min", nullable(p.alpha_min)},
                   {"eps", p.eps},
                   {"residual", p.residual},
                   {"flags", p.flags()}});
  }
  return arr.dump(2) + "\n";
}

std::string curve_svg(const std::vector<CurvePoint>& points) {
  constexpr double kSize = 400.0;
  constexpr double kPad = 20.0;
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize + 2 * kPad << "\" height=\""
    << kSize + 2 * kPad << "\">\n";
  o << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\"" << kSize << "\" height=\""
    << kSize << "\" fill=\"none\" stroke=\"#999\"/>\n";
  o << "<polyline fill=\"none\" stroke=\"black\" points=\"";
  bool first = true;
  // alpha on the horizontal axis, beta vertical, both on [0, 1].
  for (const auto& p : points) {
    if (!std::isfinite(p.alpha_min)) continue;
    const double x = kPad + std::clamp(p.alpha_min, 0.0, 1.0) * kSize;
    const double y = kPad + (1.0 - std::clamp(p.beta, 0.0, 1.0)) * kSize;
    o << (first ? "" : " ") << x << ',' << y;
    first = false;
  }
  o << "\"/>\n</svg>\n";
  return o.str();
}

std::string phase_csv(const std::vector<PhaseCell>& cells) {
  std::ostringstream o;
  o << "alpha,beta,n,trials,successes,lp_failures,seed\n";
  for (const auto& c : cells) {
    o << format_double(c.alpha) << ',' << format_double(c.beta) << ',' << c.n << ',' << c.trials
      << ',' << c.successes << ',' << c.lp_failures << ',' << c.seed << '\n';
  }
  return o.str();
}

std::string phase_json(const std::vector<PhaseCell>& cells) {
  json arr = json::array();
  for (const auto& c : cells) {
    arr.push_back({{"alpha", c.alpha},
                   {"beta", c.beta},
                   {"n", c.n},
                   {"m", c.m},
                   {"k", c.k},
                   {"trials", c.trials},
                   {"successes", c.successes},
                   {"lp_failures", c.lp_failures},
                   {"seed", c.seed}});
  }
  return arr.dump(2) + "\n";
}

std::string width_json(const WidthReport& r) {
  const json j = {{"kind", std::string(to_string(r.kind))},
                  {"n", r.n},
                  {"k", r.k},
                  {"m", r.m},
                  {"samples", r.samples},
                  {"seed", r.seed},
                  {"c_mode", std::string(to_string(r.c_mode))},
                  {"mean_B_over_sqrt_n", r.mean_B_over_sqrt_n},
                  {"std_err", r.std_err},
                  {"gordon_budget", r.gordon_budget},
                  {"pass", r.pass},
                  {"no_feasible_samples", r.no_feasible_samples}};
  return j.dump(2) + "\n";
}

namespace {

struct Common {
  std::string format = "csv";
  std::string out_path;
  int threads = 0;
};

void emit(const std::string& text, const Common& c, std::ostream& out) {
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out_path, std::ios::binary);
  if (!f) throw DomainError("cannot write " + c.out_path);
  f << text;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot write " + path);
  f << text;
}

void add_common(CLI::App* sub, Common& c, bool allow_format) {
  if (allow_format) {
    sub->add_option("--format", c.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  }
  sub->add_option("--out", c.out_path, "Write output to this file instead of stdout");
}

const std::vector<std::string> kKinds = {"strong", "sectional", "weak", "weak-nonneg", "nonneg"};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Recovery thresholds for l1 minimization: curves, widths, phase diagrams"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: CS_THRESH_THREADS or all cores)");

  // curve
  Common curve_c;
  std::string curve_kind;
  std::string curve_beta;
  std::string curve_svg_path;
  SolverConfig curve_cfg;
  auto* curve_cmd = app.add_subcommand("curve", "Threshold curve alpha_min(beta)");
  curve_cmd->add_option("--kind", curve_kind, "Threshold kind")
      ->required()
      ->check(CLI::IsMember(kKinds));
  curve_cmd->add_option("--beta", curve_beta, "Grid start:stop:step")->required();
  curve_cmd->add_option("--eps", curve_cfg.eps, "Slack epsilon in [0, 1)")->capture_default_str();
  curve_cmd->add_option("--theta-tol", curve_cfg.theta_tol, "Root tolerance")->capture_default_str();
  curve_cmd->add_option("--svg", curve_svg_path, "Also write an SVG polyline");
  add_common(curve_cmd, curve_c, true);

  // invert
  Common inv_c;
  std::string inv_kind;
  double inv_alpha = 0.0;
  SolverConfig inv_cfg;
  auto* inv_cmd = app.add_subcommand("invert", "Largest beta reachable at a given alpha");
  inv_cmd->add_option("--kind", inv_kind, "Threshold kind")->required()->check(CLI::IsMember(kKinds));
  inv_cmd->add_option("--alpha", inv_alpha, "Undersampling ratio m/n in (0, 1]")->required();
  inv_cmd->add_option("--eps", inv_cfg.eps, "Slack epsilon in [0, 1)")->capture_default_str();
  inv_cmd->add_option("--theta-tol", inv_cfg.theta_tol, "Root tolerance")->capture_default_str();
  add_common(inv_cmd, inv_c, true);

  // width
  Common width_c;
  std::string width_kind;
  std::size_t width_n = 0;
  std::size_t width_k = 0;
  std::size_t width_samples = 200;
  std::size_t width_m = 0;
  std::uint64_t width_seed = 1;
  std::string width_mode = "exact";
  auto* width_cmd = app.add_subcommand("width", "Monte Carlo width bound vs the sqrt(m) budget");
  width_cmd->add_option("--kind", width_kind, "Threshold kind")->required()->check(CLI::IsMember(kKinds));
  width_cmd->add_option("--n", width_n, "Ambient dimension")->required();
  width_cmd->add_option("--k", width_k, "Sparsity")->required();
  width_cmd->add_option("--m", width_m, "Number of measurements")->required();
  width_cmd->add_option("--samples", width_samples, "Gaussian samples")->capture_default_str();
  width_cmd->add_option("--seed", width_seed, "Master seed")->capture_default_str();
  width_cmd->add_option("--c-mode", width_mode, "exact or population")
      ->check(CLI::IsMember({"exact", "population"}))
      ->capture_default_str();
  add_common(width_cmd, width_c, false);

  // phase
  Common phase_c;
  std::size_t phase_n = 0;
  std::string phase_alpha;
  std::string phase_beta;
  std::size_t phase_trials = 0;
  std::string phase_model;
  std::uint64_t phase_seed = 1;
  auto* phase_cmd = app.add_subcommand("phase", "Empirical l1 recovery phase diagram");
  phase_cmd->add_option("--n", phase_n, "Ambient dimension")->required();
  phase_cmd->add_option("--alpha", phase_alpha, "Grid start:stop:step for m/n")->required();
  phase_cmd->add_option("--beta", phase_beta, "Grid start:stop:step for k/n")->required();
  phase_cmd->add_option("--trials", phase_trials, "Trials per cell")->required();
  phase_cmd->add_option("--model", phase_model, "Signal model")->required()->check(CLI::IsMember(kKinds));
  phase_cmd->add_option("--seed", phase_seed, "Master seed")->capture_default_str();
  add_common(phase_cmd, phase_c, true);

  // check-nsp
  Common nsp_c;
  std::string nsp_path;
  std::size_t nsp_k = 0;
  std::string nsp_variant = "strong";
  auto* nsp_cmd = app.add_subcommand("check-nsp", "Exact null-space property check for small A");
  nsp_cmd->add_option("--matrix", nsp_path, "Matrix file: 'm n' then m rows")->required();
  nsp_cmd->add_option("--k", nsp_k, "Sparsity")->required();
  nsp_cmd->add_option("--variant", nsp_variant, "strong, sectional, weak or nonneg")
      ->check(CLI::IsMember({"strong", "sectional", "weak", "nonneg"}))
      ->capture_default_str();
  add_common(nsp_cmd, nsp_c, true);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();  // program name
    app.parse(std::move(rev));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const int workers = resolve_threads(threads);

  try {
    if (curve_cmd->parsed()) {
      curve_cfg.threads = workers;
      const auto grid = parse_grid(curve_beta);
      const auto points = curve(parse_kind(curve_kind), grid, curve_cfg);
      emit(curve_c.format == "json" ? curve_json(points) : curve_csv(points), curve_c, out);
      if (!curve_svg_path.empty()) write_file(curve_svg_path, curve_svg(points));
      const bool failed =
          std::any_of(points.begin(), points.end(), [](const CurvePoint& p) { return p.no_root; });
      if (failed) {
        err << "error: no root for some grid points (flagged no_root)\n";
        return kExitSolver;
      }
      return kExitOk;
    }
    if (inv_cmd->parsed()) {
      const ThresholdKind kind = parse_kind(inv_kind);
      const double beta = invert_alpha(kind, inv_alpha, inv_cfg);
      const CurvePoint p = alpha_bound(kind, beta, inv_cfg);
      std::string text;
      if (inv_c.format == "json") {
        text = json({{"kind", std::string(to_string(kind))},
                     {"alpha", inv_alpha},
                     {"beta", beta},
                     {"theta_hat", p.theta_hat},
                     {"alpha_min", p.alpha_min},
                     {"eps", inv_cfg.eps}})
                   .dump(2) +
               "\n";
      } else {
        text = "kind,alpha,beta,theta_hat,alpha_min,eps\n" + std::string(to_string(kind)) + "," +
               format_double(inv_alpha) + "," + format_double(beta) + "," +
               format_double(p.theta_hat) + "," + format_double(p.alpha_min) + "," +
               format_double(inv_cfg.eps) + "\n";
      }
      emit(text, inv_c, out);
      return kExitOk;
    }
    if (width_cmd->parsed()) {
      const WidthReport r =
          width_monte_carlo(parse_kind(width_kind), width_n, width_k, width_samples, width_seed,
                            parse_c_mode(width_mode), width_m, workers);
      emit(width_json(r), width_c, out);
      return kExitOk;
    }
    if (phase_cmd->parsed()) {
      const auto cells = phase_diagram(phase_n, parse_grid(phase_alpha), parse_grid(phase_beta),
                                       phase_trials, parse_kind(phase_model), phase_seed, workers);
      emit(phase_c.format == "json" ? phase_json(cells) : phase_csv(cells), phase_c, out);
      return kExitOk;
    }
    if (nsp_cmd->parsed()) {
      const Eigen::MatrixXd A = read_matrix_file(nsp_path);
      const NspResult r = nsp_variant == "strong"
                              ? nsp_check_strong(A, nsp_k)
                              : nsp_check_fixed_support(A, nsp_k, parse_nsp_variant(nsp_variant));
      std::ostringstream o;
      if (nsp_c.format == "json") {
        json j = {{"variant", nsp_variant}, {"k", nsp_k}, {"verdict", std::string(r.verdict())}};
        if (r.witness) {
          j["witness"] = {{"support", r.witness->support},
                          {"signs", r.witness->signs},
                          {"w", std::vector<double>(r.witness->w.data(),
                                                    r.witness->w.data() + r.witness->w.size())},
                          {"value", r.witness->value}};
        }
        o << j.dump(2) << "\n";
      } else {
        o << r.verdict() << "\n";
        if (r.witness) {
          o << "support:";
          for (auto i : r.witness->support) o << ' ' << i;
          o << "\nsigns:";
          for (int s : r.witness->signs) o << ' ' << s;
          o << "\nw:";
          for (Eigen::Index i = 0; i < r.witness->w.size(); ++i) {
            o << ' ' << format_double(r.witness->w(i));
          }
          o << "\nvalue: " << format_double(r.witness->value) << "\n";
        }
      }
      emit(o.str(), nsp_c, out);
      return kExitOk;
    }
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitUsage;
}

}  // namespace csthresh::cli
