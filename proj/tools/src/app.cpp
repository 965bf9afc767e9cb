#include "app.hpp"

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "gvpj/errors.hpp"

namespace gvpj::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian Volterra processes with compound Poisson jumps: simulation, prediction, verification"};
  app.require_subcommand(1);

  std::string config_file;
  std::vector<std::string> sets;
  std::string out_dir;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  app.add_option("-c,--config", config_file, "INI configuration file");
  app.add_option("--set", sets, "Override a setting: section.key=value (repeatable)");
  app.add_option("-o,--out", out_dir, "Output directory (output.dir)");
  app.add_option("--seed", seed, "Random seed (run.seed)");
  app.add_option("--threads", threads, "Monte Carlo threads (run.threads)");

  auto* simulate = app.add_subcommand("simulate", "Simulate one mixed path; writes the path CSV and a manifest");
  auto* predict = app.add_subcommand("predict", "Conditional law of X_t given the path up to u");
  std::string path_file;
  predict->add_option("-p,--path", path_file, "Path CSV (time,G,J,X); defaults to output.path in the output dir");
  auto* verify = app.add_subcommand("verify", "Run the verification suite; nonzero exit on any failure");
  auto* solve_wh = app.add_subcommand("solve-wh", "Solve and cache the mixed-fBm Wiener-Hopf system");
  for (auto* sub : {simulate, predict, verify, solve_wh}) sub->fallthrough();

  std::vector<const char*> argv;
  argv.push_back("gvpj");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    // Command-line flags win over the file and over --set.
    if (!out_dir.empty()) sets.push_back("output.dir=" + out_dir);
    if (app.count("--seed")) sets.push_back("run.seed=" + std::to_string(seed));
    if (app.count("--threads")) sets.push_back("run.threads=" + std::to_string(threads));
    const RunConfig cfg = load_config(config_file, sets);

    if (*simulate) cmd_simulate(cfg, out);
    if (*predict) {
      const std::filesystem::path p = path_file.empty() ? cfg.out_dir / cfg.path_file : std::filesystem::path(path_file);
      cmd_predict(cfg, p, out);
    }
    if (*verify) return cmd_verify(cfg, out);
    if (*solve_wh) cmd_solve_wh(cfg, out);
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace gvpj::cli
