#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gvpj/discrete_operators.hpp"
#include "gvpj/jumps.hpp"
#include "gvpj/models.hpp"
#include "gvpj/time_grid.hpp"

namespace gvpj::cli {

inline constexpr std::size_t kMaxGridSize = 4096;

struct ModelConfig {
  std::string family = "fbm";  // fbm | ccmfbm | mfbm
  double H = 0.75;
  double a = 1.0;
  double b = 0.5;
  std::filesystem::path wh_cache = "wh_cache";
};

struct GridConfig {
  double T = 1.0;
  std::size_t n = 128;
};

struct PredictionConfig {
  double u = 0.5;
  double t = 0.75;
  double width = 8.0;  // half-width of the Gaussian window, in sd
  std::size_t cells = 8192;
  double tail_tol = 1e-8;
  PsiMethod psi = PsiMethod::triangular_solve;
};

struct VerifyConfig {
  double tolerance_scale = 1.0;
  std::size_t mc_paths = 100000;
  std::uint64_t seed = 20240601;
};

struct RunConfig {
  ModelConfig model;
  JumpSpec jumps;
  GridConfig grid;
  PredictionConfig prediction;
  VerifyConfig verify;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::filesystem::path out_dir = ".";
  std::filesystem::path path_file = "path.csv";

  // Effective key/value settings, for the manifest echo.
  std::map<std::string, std::string> echo;

  TimeGrid time_grid() const { return TimeGrid::uniform(grid.T, grid.n); }
};

// Reads an INI file (empty path: defaults only), applies `section.key=value`
// overrides on top, and validates every field. Unknown keys are rejected.
// Throws DomainError with the offending field name, IoError for unreadable files.
RunConfig load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides);

// Builds the model; mfbm loads the Wiener-Hopf cache when it matches and
// otherwise solves (and stores the bundle). `loaded` reports which happened.
std::shared_ptr<const VolterraModel> make_model(const RunConfig& cfg, bool* loaded = nullptr);

}  // namespace gvpj::cli
