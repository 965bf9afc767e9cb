#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <set>

#include "gvpj/errors.hpp"
#include "gvpj/wiener_hopf.hpp"

namespace gvpj::cli {
namespace {

namespace pt = boost::property_tree;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "model.family",       "model.H",         "model.a",          "model.b",
      "model.wh_cache",     "jumps.lambda",    "jumps.dist",       "jumps.mean",
      "jumps.variance",     "jumps.x1",        "jumps.p",          "jumps.x2",
      "jumps.lo",           "jumps.hi",        "grid.T",           "grid.n",
      "prediction.u",       "prediction.t",    "prediction.width", "prediction.cells",
      "prediction.tail_tol", "prediction.psi", "verify.tolerance_scale", "verify.mc_paths",
      "verify.seed",        "run.seed",        "run.threads",      "output.dir",
      "output.path"};
  return keys;
}

class Settings {
 public:
  void set(const std::string& key, const std::string& value) {
    if (!known_keys().contains(key)) throw DomainError("config: unknown key '" + key + "'");
    values_[key] = value;
  }

  bool has(const std::string& key) const { return values_.contains(key); }

  std::string str(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double real(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& s = it->second;
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) {
      throw DomainError("config: " + key + " = '" + s + "' is not a number");
    }
    return v;
  }

  std::uint64_t integer(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& s = it->second;
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) {
      throw DomainError("config: " + key + " = '" + s + "' is not a nonnegative integer");
    }
    return v;
  }

  const std::map<std::string, std::string>& all() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

void check(bool ok, const std::string& key, const std::string& why) {
  if (!ok) throw DomainError("config: " + key + " " + why);
}

JumpSpec parse_jumps(const Settings& s) {
  const double lambda = s.real("jumps.lambda", 0.0);
  check(lambda >= 0.0 && std::isfinite(lambda), "jumps.lambda", "must be finite and >= 0");
  const std::string dist = s.str("jumps.dist", "normal");
  try {
    if (dist == "normal") return {lambda, NormalJumps{s.real("jumps.mean", 0.0), s.real("jumps.variance", 1.0)}};
    if (dist == "two_point")
      return {lambda, TwoPointJumps{s.real("jumps.x1", -1.0), s.real("jumps.p", 0.5), s.real("jumps.x2", 1.0)}};
    if (dist == "uniform") return {lambda, UniformJumps{s.real("jumps.lo", 0.0), s.real("jumps.hi", 1.0)}};
  } catch (const DomainError& e) {
    throw DomainError(std::string("config: jumps: ") + e.what());
  }
  throw DomainError("config: jumps.dist must be normal, two_point or uniform (got '" + dist + "')");
}

}  // namespace

RunConfig load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides) {
  Settings s;
  if (!file.empty()) {
    pt::ptree tree;
    try {
      pt::read_ini(file.string(), tree);
    } catch (const pt::ini_parser_error& e) {
      if (!std::filesystem::exists(file)) throw IoError("cannot read config " + file.string());
      throw DomainError(std::string("config: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
      if (body.empty()) throw DomainError("config: key '" + section + "' outside a section");
      for (const auto& [key, value] : body) s.set(section + "." + key, value.data());
    }
  }
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw DomainError("--set expects section.key=value, got '" + o + "'");
    s.set(o.substr(0, eq), o.substr(eq + 1));
  }

  RunConfig c;
  c.model.family = s.str("model.family", c.model.family);
  c.model.H = s.real("model.H", c.model.H);
  c.model.a = s.real("model.a", c.model.a);
  c.model.b = s.real("model.b", c.model.b);
  c.model.wh_cache = s.str("model.wh_cache", c.model.wh_cache.string());
  check(c.model.family == "fbm" || c.model.family == "ccmfbm" || c.model.family == "mfbm", "model.family",
        "must be fbm, ccmfbm or mfbm");
  check(c.model.H > 0.0 && c.model.H < 1.0, "model.H", "must lie in (0,1)");
  if (c.model.family != "fbm") check(c.model.H > 0.5, "model.H", "must exceed 1/2 for " + c.model.family);
  if (c.model.family == "ccmfbm") {
    check(c.model.a != 0.0 && std::isfinite(c.model.a), "model.a", "must be finite and nonzero");
    check(std::isfinite(c.model.b), "model.b", "must be finite");
  }

  c.jumps = parse_jumps(s);

  c.grid.T = s.real("grid.T", c.grid.T);
  c.grid.n = s.integer("grid.n", c.grid.n);
  check(c.grid.T > 0.0 && std::isfinite(c.grid.T), "grid.T", "must be finite and positive");
  check(c.grid.n >= 1 && c.grid.n <= kMaxGridSize, "grid.n", "must lie in [1, " + std::to_string(kMaxGridSize) + "]");

  auto& p = c.prediction;
  // Default horizons scale with T so that they stay grid nodes.
  p.u = s.real("prediction.u", p.u * c.grid.T);
  p.t = s.real("prediction.t", p.t * c.grid.T);
  p.width = s.real("prediction.width", p.width);
  p.cells = s.integer("prediction.cells", p.cells);
  p.tail_tol = s.real("prediction.tail_tol", p.tail_tol);
  const std::string psi = s.str("prediction.psi", "triangular_solve");
  check(psi == "triangular_solve" || psi == "closed_form", "prediction.psi", "must be triangular_solve or closed_form");
  p.psi = psi == "closed_form" ? PsiMethod::closed_form : PsiMethod::triangular_solve;
  check(0.0 <= p.u && p.u <= p.t && p.t <= c.grid.T, "prediction.u/t", "must satisfy 0 <= u <= t <= T");
  const TimeGrid g = c.time_grid();
  for (const auto& [key, v] : {std::pair{"prediction.u", p.u}, std::pair{"prediction.t", p.t}}) {
    try {
      (void)g.node_index(v);
    } catch (const DomainError&) {
      throw DomainError(std::string("config: ") + key + " must be a grid node (multiple of T/n)");
    }
  }
  check(p.width > 0.0, "prediction.width", "must be positive");
  check(p.cells >= 16, "prediction.cells", "must be at least 16");
  check(p.tail_tol > 0.0 && p.tail_tol < 1.0, "prediction.tail_tol", "must lie in (0,1)");
  if (p.psi == PsiMethod::closed_form) check(c.model.family == "fbm", "prediction.psi", "closed_form needs model.family = fbm");

  c.verify.tolerance_scale = s.real("verify.tolerance_scale", c.verify.tolerance_scale);
  c.verify.mc_paths = s.integer("verify.mc_paths", c.verify.mc_paths);
  c.verify.seed = s.integer("verify.seed", c.verify.seed);
  check(c.verify.tolerance_scale >= 0.0, "verify.tolerance_scale", "must be >= 0");
  check(c.verify.mc_paths >= 1, "verify.mc_paths", "must be positive");

  c.seed = s.integer("run.seed", c.seed);
  c.threads = static_cast<unsigned>(s.integer("run.threads", c.threads));
  check(c.threads >= 1 && c.threads <= 256, "run.threads", "must lie in [1, 256]");
  c.out_dir = s.str("output.dir", c.out_dir.string());
  c.path_file = s.str("output.path", c.path_file.string());
  c.echo = s.all();
  return c;
}

std::shared_ptr<const VolterraModel> make_model(const RunConfig& cfg, bool* loaded) {
  if (loaded) *loaded = false;
  if (cfg.model.family == "fbm") return std::make_shared<FbmModel>(cfg.model.H);
  if (cfg.model.family == "ccmfbm") return std::make_shared<CcmfbmModel>(cfg.model.a, cfg.model.b, cfg.model.H);
  const TimeGrid g = cfg.time_grid();
  std::shared_ptr<WhSolution> sol;
  if (wh_cache_matches(cfg.model.wh_cache, cfg.model.H, g)) {
    sol = std::make_shared<WhSolution>(load_wh_solution(cfg.model.wh_cache));
    if (loaded) *loaded = true;
  } else {
    sol = std::make_shared<WhSolution>(solve_wiener_hopf(g, cfg.model.H));
    save_wh_solution(*sol, cfg.model.wh_cache);
  }
  return std::make_shared<MfbmModel>(sol);
}

}  // namespace gvpj::cli
