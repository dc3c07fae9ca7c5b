#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "runner.hpp"

using namespace qe;
using namespace qe::cli;

namespace {

struct CommonOpts {
  std::string config, out;
  int threads = 0;
  double tail_target = 0.0;
  bool timing = false;
};

int run(Experiment e, const CommonOpts& o) {
  ExperimentConfig c = o.config.empty() ? default_config(e) : load_config(o.config, e);
  if (o.tail_target > 0.0) c.policy.truncation.tail_target = o.tail_target;
  if (o.timing) c.timing_column = true;
  std::string out = !o.out.empty() ? o.out : !c.output_path.empty() ? c.output_path : default_output_path(e);
  int threads = o.threads > 0 ? o.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  ResultTable t = run_experiment(c, threads);
  std::string table = format_table(t, c.timing_column);
  std::ofstream f(out);
  if (!f) throw ConfigError("output path not writable: " + out);
  f << table;
  std::ofstream m(out + ".manifest.json");
  if (!m) throw ConfigError("output path not writable: " + out + ".manifest.json");
  m << make_manifest(c, t, threads).dump(2) << "\n";

  std::size_t failed = 0;
  for (auto& r : t.rows) failed += r.pass ? 0 : 1;
  for (auto& n : t.notes)
    if (n.rfind("error", 0) == 0) std::cerr << n << "\n";
  std::printf("%s: %zu rows, %zu failed -> %s\n", t.experiment.c_str(), t.rows.size(), failed, out.c_str());
  return t.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eisenstein quantum-limit experiments"};
  app.require_subcommand(1);
  CommonOpts opts;

  struct Sub {
    const char* name;
    Experiment e;
    const char* help;
  };
  const Sub subs[] = {
      {"identities", Experiment::identities, "closed-form identity suite"},
      {"eisenstein-check", Experiment::eisenstein_check, "Fourier expansion vs orbit sum, eigen-equation residual"},
      {"mu-scan", Experiment::mu_scan, "pairings mu_{r',r''} over an (r, dr) grid"},
      {"quasimode-scan", Experiment::quasimode_scan, "quasimode pairings mu_h against the main term"},
      {"ehrenfest", Experiment::ehrenfest, "window mass of profiles, two routes"},
      {"rankin-selberg", Experiment::rankin_selberg, "Rankin-Selberg factorization for the discriminant form"},
  };
  std::vector<std::pair<CLI::App*, Experiment>> cmds;
  for (auto& s : subs) {
    CLI::App* sc = app.add_subcommand(s.name, s.help);
    sc->add_option("--config", opts.config, "JSON config file")->check(CLI::ExistingFile);
    sc->add_option("--out", opts.out, "results table path (manifest goes next to it)");
    sc->add_option("--threads", opts.threads, "sweep workers (default: hardware threads)")->check(CLI::PositiveNumber);
    sc->add_option("--tail-target", opts.tail_target, "absolute Fourier tail target")->check(CLI::PositiveNumber);
    sc->add_flag("--timing", opts.timing, "add a wall-time column to the table");
    cmds.emplace_back(sc, s.e);
  }

  PredictionArgs pa;
  std::string shape = "gaussian";
  double psi_lo = 1.0, psi_hi = 2.0;
  CLI::App* pred = app.add_subcommand("predict", "print theta, kernels, main term and Ehrenfest mass");
  pred->add_option("--rj", pa.rj, "center r_j")->check(CLI::PositiveNumber);
  pred->add_option("--dr", pa.delta_r, "one or more dr values (|dr| <= 1)");
  pred->add_option("--width", pa.width, "profile width; 0 skips the mass");
  pred->add_option("--profile", shape, "gaussian or bump")->check(CLI::IsMember({"gaussian", "bump"}));
  pred->add_option("--nodes", pa.nodes, "profile nodes");
  pred->add_option("--psi-lo", psi_lo, "bump support start");
  pred->add_option("--psi-hi", psi_hi, "bump support end");

  CLI11_PARSE(app, argc, argv);

  try {
    if (pred->parsed()) {
      pa.shape = shape == "bump" ? ProfileShape::bump : ProfileShape::gaussian;
      pa.psi = BumpSpec::smooth(psi_lo, psi_hi);
      pa.psi.validate();
      std::cout << format_prediction(pa);
      return 0;
    }
    for (auto& [sc, e] : cmds)
      if (sc->parsed()) return run(e, opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
