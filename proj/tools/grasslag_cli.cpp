#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "grasslag/runner.hpp"

namespace {

struct Opts {
  std::string preset = "eq1";
  std::string config;
  size_t n = 200;
  uint64_t seed = 1;
  size_t starts = 2000;
  double tol_scale = 1.0;
  size_t m_fiber = 64;
  std::string out = ".";
};

void add_coeff_options(CLI::App* sc, Opts& o) {
  auto* p = sc->add_option("--preset", o.preset, "coefficient preset")
                ->check(CLI::IsMember({"eq1", "eq7", "eq8"}))
                ->capture_default_str();
  auto* c = sc->add_option("--config", o.config,
                           "key=value file defining c0..c5 (and optional run settings)");
  p->excludes(c);
  c->excludes(p);
}

bool given(CLI::App* sc, const std::string& name) {
  auto* opt = sc->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

grasslag::RunConfig resolve(CLI::App* sc, const Opts& o) {
  grasslag::RunConfig cfg;
  bool from_file = !o.config.empty();
  if (from_file) {
    cfg = grasslag::parse_config_file(o.config);
  } else {
    cfg.cv = grasslag::CoefficientVector::preset(o.preset);
    cfg.preset = o.preset;
  }
  if (!from_file || given(sc, "--n")) cfg.n = o.n;
  if (!from_file || given(sc, "--seed")) cfg.seed = o.seed;
  if (!from_file || given(sc, "--starts")) cfg.starts = o.starts;
  if (!from_file || given(sc, "--tol-scale")) cfg.tol_scale = o.tol_scale;
  if (!from_file || given(sc, "--m-fiber")) cfg.m_fiber = o.m_fiber;
  if (!from_file || given(sc, "--out")) cfg.out_dir = o.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quartic hypersurfaces in the Grassmannian of 2-planes in 4-space: "
               "atlas certification, smoothness search, real locus sampling and checks"};
  app.require_subcommand(1);

  Opts atlas_o, smooth_o, sample_o, verify_o, fib_o;
  fib_o.n = 20;
  bool hook_corrupt = false, hook_off_locus = false;

  CLI::App* sc_atlas = app.add_subcommand("atlas-check",
                                          "certify transition Jacobian determinants exactly");
  sc_atlas->add_option("--out", atlas_o.out, "output directory")->capture_default_str();
  sc_atlas->add_flag("--hook-corrupt-transition", hook_corrupt)->group("");

  CLI::App* sc_smooth =
      app.add_subcommand("smoothness", "multistart search for singular chart points");
  add_coeff_options(sc_smooth, smooth_o);
  sc_smooth->add_option("--starts", smooth_o.starts, "starts per chart")->capture_default_str();
  sc_smooth->add_option("--seed", smooth_o.seed, "RNG seed")->capture_default_str();
  sc_smooth->add_option("--out", smooth_o.out, "output directory")->capture_default_str();

  CLI::App* sc_sample = app.add_subcommand("sample", "sample the normalized real locus");
  add_coeff_options(sc_sample, sample_o);
  sc_sample->add_option("--n", sample_o.n, "number of points")->capture_default_str();
  sc_sample->add_option("--seed", sample_o.seed, "RNG seed")->capture_default_str();
  sc_sample->add_option("--out", sample_o.out, "output directory")->capture_default_str();

  CLI::App* sc_verify =
      app.add_subcommand("verify", "run the geometric checks on sampled locus points");
  add_coeff_options(sc_verify, verify_o);
  sc_verify->add_option("--n", verify_o.n, "number of points")->capture_default_str();
  sc_verify->add_option("--seed", verify_o.seed, "RNG seed")->capture_default_str();
  sc_verify->add_option("--tol-scale", verify_o.tol_scale, "scale factor on check tolerances")
      ->capture_default_str();
  sc_verify->add_option("--out", verify_o.out, "output directory")->capture_default_str();
  sc_verify->add_flag("--hook-off-locus", hook_off_locus)->group("");

  CLI::App* sc_fib = app.add_subcommand("fibration", "sample circle fibers over base lines");
  add_coeff_options(sc_fib, fib_o);
  sc_fib->add_option("--n", fib_o.n, "number of bases")->capture_default_str();
  sc_fib->add_option("--m-fiber", fib_o.m_fiber, "points per fiber")->capture_default_str();
  sc_fib->add_option("--seed", fib_o.seed, "RNG seed")->capture_default_str();
  sc_fib->add_option("--out", fib_o.out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    if (sc_atlas->parsed()) {
      grasslag::RunConfig cfg;
      cfg.out_dir = atlas_o.out;
      return grasslag::cmd_atlas_check(std::cout, cfg, hook_corrupt);
    }
    if (sc_smooth->parsed())
      return grasslag::cmd_smoothness(std::cout, resolve(sc_smooth, smooth_o));
    if (sc_sample->parsed()) return grasslag::cmd_sample(std::cout, resolve(sc_sample, sample_o));
    if (sc_verify->parsed()) {
      grasslag::VerifyHooks hooks;
      hooks.inject_off_locus = hook_off_locus;
      return grasslag::cmd_verify(std::cout, resolve(sc_verify, verify_o), hooks);
    }
    if (sc_fib->parsed()) return grasslag::cmd_fibration(std::cout, resolve(sc_fib, fib_o));
  } catch (const grasslag::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 3;
}
