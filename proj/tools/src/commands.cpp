#include "commands.hpp"

#include <Eigen/Core>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "gvpj/errors.hpp"
#include "gvpj/prediction.hpp"
#include "gvpj/verification.hpp"

#ifndef GVPJ_VERSION
#define GVPJ_VERSION "unknown"
#endif

namespace gvpj::cli {
namespace {

using nlohmann::json;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::filesystem::path output_file(const RunConfig& cfg, const std::filesystem::path& name) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.out_dir.string() + ": " + ec.message());
  return name.is_absolute() ? name : cfg.out_dir / name;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out << text;
  if (!out) throw IoError("write failed for " + file.string());
}

json model_json(const RunConfig& cfg) {
  json m{{"family", cfg.model.family}, {"H", cfg.model.H}};
  if (cfg.model.family == "ccmfbm") {
    m["a"] = cfg.model.a;
    m["b"] = cfg.model.b;
  }
  if (cfg.model.family == "mfbm") m["wh_cache"] = cfg.model.wh_cache.string();
  return m;
}

json versions() {
  return {{"gvpj", GVPJ_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)}};
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

double parse_number(const std::string& s, const std::filesystem::path& file, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw DomainError(file.string() + ":" + std::to_string(line) + ": not a number: '" + s + "'");
  }
  return v;
}

}  // namespace

void write_path_csv(const std::filesystem::path& file, const MixedPath& p) {
  std::string text = "time,G,J,X\n";
  const auto& t = p.X.grid.times();
  for (std::size_t i = 0; i < t.size(); ++i) {
    text += num(t[i]) + "," + num(p.G.values[i]) + "," + num(p.J.values[i]) + "," + num(p.X.values[i]) + "\n";
  }
  write_text(file, text);
}

MixedPath read_path_csv(const std::filesystem::path& file, const TimeGrid& grid, double through) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open path file " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(file.string() + ": empty file");
  if (split(line) != std::vector<std::string>{"time", "G", "J", "X"}) {
    throw DomainError(file.string() + ": header must be time,G,J,X");
  }
  const std::size_t need = grid.node_index(through);
  std::vector<double> G, J, X;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != 4) throw DomainError(file.string() + ":" + std::to_string(lineno) + ": expected 4 columns");
    const std::size_t i = G.size();
    if (i >= grid.size()) throw DomainError(file.string() + ": more rows than the configured grid has times");
    const double t = parse_number(cells[0], file, lineno);
    if (std::abs(t - grid.times()[i]) > 1e-12 * std::max(1.0, grid.horizon())) {
      throw DomainError(file.string() + ":" + std::to_string(lineno) + ": time " + cells[0] +
                        " does not match the configured grid (expected " + num(grid.times()[i]) + ")");
    }
    G.push_back(parse_number(cells[1], file, lineno));
    J.push_back(parse_number(cells[2], file, lineno));
    X.push_back(parse_number(cells[3], file, lineno));
    if (std::abs(X.back() - (G.back() + J.back())) > 1e-12 * std::max(1.0, std::abs(X.back()))) {
      throw DomainError(file.string() + ":" + std::to_string(lineno) + ": X differs from G + J");
    }
  }
  if (G.size() < need) {
    throw DomainError(file.string() + ": path ends before the conditioning time u = " + num(through));
  }
  // Values after u do not enter the prediction; pad so the path spans the grid.
  const auto pad = [&](std::vector<double>& v) { v.resize(grid.size(), v.empty() ? 0.0 : v.back()); };
  pad(G);
  pad(J);
  pad(X);
  MixedPath p;
  p.G = SamplePath(grid, G);
  p.J = SamplePath(grid, J);
  p.X = SamplePath(grid, X);
  return p;
}

void cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  const TimeGrid grid = cfg.time_grid();
  const auto model = make_model(cfg);
  const MixedPath p = simulate_mixed(model, cfg.jumps, grid, cfg.seed);
  const std::filesystem::path path_out = output_file(cfg, cfg.path_file);
  write_path_csv(path_out, p);

  json manifest{{"format", "gvpj-manifest-1"},
                {"command", "simulate"},
                {"seed", cfg.seed},
                {"model", model_json(cfg)},
                {"jumps", {{"lambda", cfg.jumps.lambda()}, {"law", cfg.jumps.describe()}}},
                {"grid", {{"T", cfg.grid.T}, {"n", cfg.grid.n}}},
                {"config", cfg.echo},
                {"versions", versions()},
                {"outputs", {{"path", path_out.string()}}},
                {"jump_count", p.jump_times.size()}};
  write_text(output_file(cfg, "manifest.json"), manifest.dump(2) + "\n");
  log << "simulate: " << grid.size() << " points, " << p.jump_times.size() << " jumps -> " << path_out.string()
      << "\n";
}

void cmd_predict(const RunConfig& cfg, const std::filesystem::path& path_file, std::ostream& log) {
  const TimeGrid grid = cfg.time_grid();
  const auto model = make_model(cfg);
  const auto op = std::make_shared<const DiscreteOperator>(build_operator(model, grid));
  const auto& pc = cfg.prediction;
  const MixedPath obs = read_path_csv(path_file, grid, pc.u);

  DensityOptions opts;
  opts.cells = pc.cells;
  opts.sd_multiplier = pc.width;
  opts.tail_tol = pc.tail_tol;
  opts.psi = pc.psi;
  const PredictionLaw law = mixed_conditional_density(op, cfg.jumps, obs, pc.u, pc.t, opts);

  json out{{"format", "gvpj-prediction-1"},
           {"u", law.u},
           {"t", law.t},
           {"m_hat", law.m_hat},
           {"r_hat_tt", law.r_hat_tt},
           {"lambda_term_mean", law.lambda_term_mean},
           {"lambda_term_var", law.lambda_term_var},
           {"N_max", law.n_max},
           {"mass_defect", law.mass_defect},
           {"poisson_tail", law.poisson_tail},
           {"gaussian_mean", law.gaussian_mean},
           {"gaussian_var", law.gaussian_var}};
  write_text(output_file(cfg, "prediction.json"), out.dump(2) + "\n");

  // Cells at their centers and atoms at their locations, merged by x; the
  // cdf column is the running sum of the mass column.
  const DiscreteDistribution& d = law.density;
  std::string csv = "x,mass,cdf\n";
  double cum = 0.0;
  std::size_t a = 0;
  const auto emit = [&](double x, double m) {
    if (m <= 0.0) return;
    cum += m;
    csv += num(x) + "," + num(m) + "," + num(cum) + "\n";
  };
  for (std::size_t i = 0; i < d.grid().size; ++i) {
    const double x = d.grid().center(i);
    for (; a < d.atoms().size() && d.atoms()[a].x <= x; ++a) emit(d.atoms()[a].x, d.atoms()[a].mass);
    emit(x, d.cell_mass()[i]);
  }
  for (; a < d.atoms().size(); ++a) emit(d.atoms()[a].x, d.atoms()[a].mass);
  write_text(output_file(cfg, "density.csv"), csv);
  log << "predict: m_hat = " << num(law.m_hat) << ", r_hat_tt = " << num(law.r_hat_tt) << ", N_max = " << law.n_max
      << "\n";
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
  SuiteOptions o;
  o.tolerance_scale = cfg.verify.tolerance_scale;
  o.mc_paths = cfg.verify.mc_paths;
  o.seed = cfg.verify.seed;
  o.threads = cfg.threads;
  const VerificationReport r = run_verification_suite(o);
  write_text(output_file(cfg, "verify.json"), r.to_json() + "\n");
  std::size_t failed = 0;
  for (const CheckResult& c : r.checks) {
    if (!c.pass) {
      ++failed;
      log << "FAIL " << c.id << ": " << num(c.formula) << " vs " << num(c.oracle) << " (tol " << num(c.tolerance)
          << ")\n";
    }
  }
  log << "verify: " << r.checks.size() - failed << "/" << r.checks.size() << " checks passed\n";
  return r.all_passed() ? kOk : kNumerical;
}

void cmd_solve_wh(const RunConfig& cfg, std::ostream& log) {
  require(cfg.model.family == "mfbm", "solve-wh: model.family must be mfbm");
  bool loaded = false;
  const auto model = make_model(cfg, &loaded);
  const WhSolution& sol = static_cast<const MfbmModel&>(*model).solution();
  constexpr double kMaxResidual = 1e-8;
  if (!(sol.residual_L <= kMaxResidual && sol.residual_q <= kMaxResidual)) {
    throw NumericalError("solve-wh: residual " + num(std::max(sol.residual_L, sol.residual_q)) + " exceeds " +
                         num(kMaxResidual));
  }
  json summary{{"format", "gvpj-wh-summary-1"},
               {"H", sol.H},
               {"T", sol.grid.horizon()},
               {"n", sol.grid.size()},
               {"residual_L", sol.residual_L},
               {"residual_q", sol.residual_q},
               {"loaded_from_cache", loaded},
               {"cache", cfg.model.wh_cache.string()}};
  write_text(output_file(cfg, "wh_summary.json"), summary.dump(2) + "\n");
  log << "solve-wh: " << (loaded ? "loaded cache " : "solved and cached in ") << cfg.model.wh_cache.string()
      << " (residuals " << num(sol.residual_L) << ", " << num(sol.residual_q) << ")\n";
}

}  // namespace gvpj::cli
