#pragma once

#include <filesystem>
#include <ostream>

#include "config.hpp"
#include "gvpj/simulation.hpp"

namespace gvpj::cli {

// Exit codes shared by every command.
enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2, kIo = 3 };

// Writes <out>/path.csv (or output.path) and <out>/manifest.json.
void cmd_simulate(const RunConfig& cfg, std::ostream& log);

// Reads the decomposed path file, writes <out>/prediction.json and <out>/density.csv.
void cmd_predict(const RunConfig& cfg, const std::filesystem::path& path_file, std::ostream& log);

// Runs the verification suite and writes <out>/verify.json. Returns kOk or kNumerical.
int cmd_verify(const RunConfig& cfg, std::ostream& log);

// Solves (or loads) the Wiener-Hopf bundle into model.wh_cache and writes <out>/wh_summary.json.
void cmd_solve_wh(const RunConfig& cfg, std::ostream& log);

// Path CSV with header time,G,J,X.
void write_path_csv(const std::filesystem::path& file, const MixedPath& p);

// Reads a path CSV on `grid`. The file may stop at any grid node at or after
// `through`; later values are padded with the last row (they are never used).
MixedPath read_path_csv(const std::filesystem::path& file, const TimeGrid& grid, double through);

}  // namespace gvpj::cli
