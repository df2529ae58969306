#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "demi/cli.hpp"
#include "demi/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Principal half-eigenvalues of nonlocal Bellman operators"};
  std::string command;
  std::string target;
  std::string config_path;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool ellipticity = false;
  app.add_option("command", command,
                 "solve | eig | certify | sandwich | sweep | probe | antimax | bifurcate | verify-all")
      ->required();
  app.add_option("target", target, "probe kind: max | antimax | isolation | sandwich | sweep | boundary");
  app.add_option("--config", config_path, "JSON experiment configuration");
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", seed, "overrides the configured seed");
  app.add_option("--threads", threads, "worker threads");
  app.add_flag("--ellipticity", ellipticity, "sweep the lower ellipticity bound");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : demi::ExitConfig;
  }

  demi::ExperimentConfig cfg;
  try {
    std::string text = "{}";
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw demi::Error(demi::ErrorCode::ConfigParseError, "cannot open " + config_path);
      std::ostringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    cfg = demi::parse_config(text);
  } catch (const demi::Error& e) {
    std::cerr << e.what() << "\n";
    return demi::ExitConfig;
  }
  if (seed) cfg.seed = *seed;
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
  return demi::run(command, target, ellipticity, cfg, out, std::cerr);
}
