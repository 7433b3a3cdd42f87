#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string bin() {
  const char* b = std::getenv("GRASSLAG_BIN");
  REQUIRE(b != nullptr);
  return b;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("grasslag_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const fs::path& log) {
  std::string cmd = "\"" + bin() + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(bool(f));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

size_t line_count(const std::string& s) {
  size_t n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("argument errors exit with code 3") {
  auto d = scratch("argerr");
  CHECK(run("", d / "log0") == 3);                       // a subcommand is required
  CHECK(run("frobnicate", d / "log1") == 3);             // unknown subcommand
  CHECK(run("sample --bogus 1", d / "log2") == 3);       // unknown flag
  CHECK(run("sample --preset eq2", d / "log3") == 3);    // unknown preset
  CHECK(run("sample --n 0 --out \"" + (d / "o").string() + "\"", d / "log4") == 3);
  CHECK(run("smoothness --starts 0 --out \"" + (d / "o2").string() + "\"", d / "log5") == 3);
  CHECK(run("--help", d / "help") == 0);
  CHECK(contains(slurp(d / "help"), "atlas-check"));
}

TEST_CASE("atlas certification command") {
  auto d = scratch("atlas");
  CHECK(run("atlas-check --out \"" + d.string() + "\"", d / "log") == 0);
  std::string rep = slurp(d / "report.json");
  CHECK(contains(rep, "\"pass\": true"));
  CHECK(contains(rep, "atlas_first_type_det_eq_inv_z1^4"));
  CHECK(contains(slurp(d / "log"), "determinant identities hold"));

  auto d2 = scratch("atlas_bad");
  CHECK(run("atlas-check --hook-corrupt-transition --out \"" + d2.string() + "\"", d2 / "log") ==
        1);
  CHECK(contains(slurp(d2 / "report.json"), "\"pass\": false"));
}

TEST_CASE("smoothness search reports the singular points it finds") {
  auto d = scratch("smooth");
  int code = run("smoothness --preset eq1 --starts 60 --seed 3 --out \"" + d.string() + "\"",
                 d / "log");
  CHECK(code == 1);
  std::string rep = slurp(d / "report.json");
  CHECK(contains(rep, "\"pass\": false"));
  CHECK(contains(rep, "singular chart points exist"));
  CHECK(contains(rep, "\"witness_total\""));
  CHECK(contains(rep, "\"elapsed_seconds\""));
}

TEST_CASE("sampling writes deterministic data files") {
  auto d1 = scratch("sample1");
  CHECK(run("sample --preset eq1 --n 12 --seed 9 --out \"" + d1.string() + "\"", d1 / "log") == 0);
  std::string csv1 = slurp(d1 / "locus.csv");
  CHECK(line_count(csv1) == 13);  // header plus one row per point
  CHECK(csv1.substr(0, 30) == "eta0,eta1,eta2,eta3,eta4,eta5\n");
  std::string rec1 = slurp(d1 / "records.jsonl");
  CHECK(line_count(rec1) == 12);

  auto d2 = scratch("sample2");
  CHECK(run("sample --preset eq1 --n 12 --seed 9 --out \"" + d2.string() + "\"", d2 / "log") == 0);
  CHECK(slurp(d2 / "locus.csv") == csv1);
  CHECK(slurp(d2 / "records.jsonl") == rec1);

  auto d3 = scratch("sample3");
  CHECK(run("sample --preset eq1 --n 12 --seed 10 --out \"" + d3.string() + "\"", d3 / "log") == 0);
  CHECK(slurp(d3 / "locus.csv") != csv1);
}

TEST_CASE("sampling output does not depend on the thread count") {
  auto d1 = scratch("thr1");
  setenv("GRASSLAG_THREADS", "1", 1);
  CHECK(run("sample --preset eq1 --n 30 --seed 4 --out \"" + d1.string() + "\"", d1 / "log") == 0);
  auto d7 = scratch("thr7");
  setenv("GRASSLAG_THREADS", "7", 1);
  CHECK(run("sample --preset eq1 --n 30 --seed 4 --out \"" + d7.string() + "\"", d7 / "log") == 0);
  unsetenv("GRASSLAG_THREADS");
  CHECK(slurp(d1 / "locus.csv") == slurp(d7 / "locus.csv"));
  CHECK(slurp(d1 / "records.jsonl") == slurp(d7 / "records.jsonl"));
}

TEST_CASE("the eq8 sample also writes the alternate normalization") {
  auto d = scratch("eq8");
  CHECK(run("sample --preset eq8 --n 10 --seed 2 --out \"" + d.string() + "\"", d / "log") == 0);
  CHECK(fs::exists(d / "locus.csv"));
  CHECK(fs::exists(d / "locus_alt.csv"));
  std::string rep = slurp(d / "report.json");
  CHECK(contains(rep, "alternate_split"));
  CHECK(contains(rep, "rescaled_max_residual"));
  CHECK(contains(rep, "no equivalence of measures is claimed"));

  auto d1 = scratch("eq1plain");
  CHECK(run("sample --preset eq1 --n 10 --seed 2 --out \"" + d1.string() + "\"", d1 / "log") == 0);
  CHECK(!fs::exists(d1 / "locus_alt.csv"));
}

TEST_CASE("verification command") {
  auto d = scratch("verify");
  CHECK(run("verify --preset eq1 --n 50 --seed 6 --out \"" + d.string() + "\"", d / "log") == 0);
  std::string rep = slurp(d / "report.json");
  CHECK(contains(rep, "\"pass\": true"));
  CHECK(contains(rep, "locus_residual"));
  CHECK(contains(rep, "symplectic_restriction"));
  CHECK(contains(rep, "volume_phase_spread"));
  CHECK(contains(rep, "canonical_form_invariance"));
  CHECK(contains(rep, "quaternion_coset_closure"));
  std::string log = slurp(d / "log");
  CHECK(contains(log, "[PASS] locus_residual"));
  CHECK(contains(log, "all checks passed"));

  auto dh = scratch("verify_hook");
  CHECK(run("verify --preset eq1 --n 50 --seed 6 --hook-off-locus --out \"" + dh.string() + "\"",
            dh / "log") == 1);
  CHECK(contains(slurp(dh / "report.json"), "\"pass\": false"));
  CHECK(contains(slurp(dh / "log"), "[FAIL] locus_residual"));
}

TEST_CASE("verification skips the quotient checks away from the symmetric system") {
  auto d = scratch("verify7");
  CHECK(run("verify --preset eq7 --n 40 --seed 8 --out \"" + d.string() + "\"", d / "log") == 0);
  std::string rep = slurp(d / "report.json");
  CHECK(contains(rep, "\"pass\": true"));
  CHECK(contains(rep, "skipped: the rotation-group quotient"));
  CHECK(!contains(rep, "quaternion_coset_closure"));
}

TEST_CASE("fibration command") {
  auto d = scratch("fib");
  CHECK(run("fibration --n 4 --m-fiber 12 --seed 5 --out \"" + d.string() + "\"", d / "log") == 0);
  std::string rep = slurp(d / "report.json");
  CHECK(contains(rep, "\"pass\": true"));
  CHECK(contains(rep, "fiber_shared_base"));
  CHECK(contains(rep, "fiber_coset_closure"));
  std::string csv = slurp(d / "fibers.csv");
  CHECK(line_count(csv) == 4 * 12 + 1);

  auto db = scratch("fib_bad");
  CHECK(run("fibration --preset eq7 --n 4 --out \"" + db.string() + "\"", db / "log1") == 3);
  CHECK(run("fibration --n 4 --m-fiber 2 --out \"" + db.string() + "\"", db / "log2") == 3);
}

TEST_CASE("config files replace presets") {
  auto d = scratch("config");
  fs::path cfg = d / "run.cfg";
  {
    std::ofstream f(cfg);
    f << "# seven-coefficient system\n"
      << "c0 = 1\nc1 = -1\nc2 = -1\nc3 = -1\nc4 = -1\nc5 = -2\n"
      << "n = 14\nseed = 21\n";
  }
  auto dc = scratch("config_run");
  CHECK(run("sample --config \"" + cfg.string() + "\" --out \"" + dc.string() + "\"", dc / "log") ==
        0);
  CHECK(contains(slurp(dc / "report.json"), "\"preset\": \"custom\""));

  auto dp = scratch("preset_run");
  CHECK(run("sample --preset eq7 --n 14 --seed 21 --out \"" + dp.string() + "\"", dp / "log") == 0);
  CHECK(slurp(dc / "locus.csv") == slurp(dp / "locus.csv"));

  // command line overrides a file setting
  auto dov = scratch("config_override");
  CHECK(run("sample --config \"" + cfg.string() + "\" --n 5 --out \"" + dov.string() + "\"",
            dov / "log") == 0);
  CHECK(line_count(slurp(dov / "locus.csv")) == 6);

  // --preset and --config exclude each other
  CHECK(run("sample --preset eq1 --config \"" + cfg.string() + "\"", d / "log_excl") == 3);
}

TEST_CASE("malformed config files exit with code 3") {
  auto d = scratch("badcfg");
  auto write = [&](const std::string& name, const std::string& text) {
    fs::path p = d / name;
    std::ofstream f(p);
    f << text;
    return p;
  };
  std::string ok = "c0 = 1\nc1 = 1\nc2 = 1\nc3 = -1\nc4 = -1\nc5 = -1\n";

  auto missing = write("missing.cfg", "c0 = 1\nc1 = 1\nc2 = 1\nc3 = -1\nc4 = -1\n");
  CHECK(run("sample --config \"" + missing.string() + "\"", d / "l1") == 3);
  auto unknown = write("unknown.cfg", ok + "widgets = 3\n");
  CHECK(run("sample --config \"" + unknown.string() + "\"", d / "l2") == 3);
  auto dup = write("dup.cfg", ok + "n = 5\nn = 6\n");
  CHECK(run("sample --config \"" + dup.string() + "\"", d / "l3") == 3);
  auto badrat = write("badrat.cfg", "c0 = 1/0\nc1 = 1\nc2 = 1\nc3 = -1\nc4 = -1\nc5 = -1\n");
  CHECK(run("sample --config \"" + badrat.string() + "\"", d / "l4") == 3);
  auto noeq = write("noeq.cfg", ok + "just a dangling line\n");
  CHECK(run("sample --config \"" + noeq.string() + "\"", d / "l5") == 3);
  auto badn = write("badn.cfg", ok + "n = -4\n");
  CHECK(run("sample --config \"" + badn.string() + "\"", d / "l6") == 3);
  auto zero = write("zerocoeff.cfg", "c0 = 0\nc1 = 1\nc2 = 1\nc3 = -1\nc4 = -1\nc5 = -1\n");
  CHECK(run("sample --config \"" + zero.string() + "\"", d / "l7") == 3);
  CHECK(run("sample --config \"" + (d / "absent.cfg").string() + "\"", d / "l8") == 3);
}
