#include "ddlab/cli.hpp"
#include "ddlab/config.hpp"
#include "ddlab/error.hpp"
#include "ddlab/svg.hpp"
#include "ddlab/table.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace ddlab;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ddlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("ddlab_cli_" + tag + "_" + std::to_string(std::rand()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const InvalidArgument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config text: comments, whitespace and errors naming the key") {
  const auto kv = parse_config_text("# header\n  model.d = 40  # trailing\n\ntrain.eta=0.05\n", "x.cfg");
  REQUIRE(kv.size() == 2);
  CHECK(kv[0].first == "model.d");
  CHECK(kv[0].second == "40");
  CHECK(kv[1].second == "0.05");

  CHECK(error_of([] { parse_config_text("model.d = 1\nmodel.d = 2\n", "x.cfg"); }).find("model.d") !=
        std::string::npos);
  CHECK_THROWS_AS(parse_config_text("no equals sign here\n", "x.cfg"), InvalidArgument);

  Settings s;
  s.declare("model.d", "100");
  s.declare("train.eta", "0.1");
  CHECK(error_of([&] { s.set("model.q", "3", "x.cfg"); }).find("model.q") != std::string::npos);
  s.set("model.d", "abc", "x.cfg");
  CHECK(error_of([&] { s.integer("model.d"); }).find("model.d") != std::string::npos);
  s.set("train.eta", "-1e", "x.cfg");
  CHECK(error_of([&] { s.real("train.eta"); }).find("train.eta") != std::string::npos);
}

TEST_CASE("csv round trip keeps every bit and the config echo rebuilds the run") {
  OutputTable t;
  t.command = "theory-curve";
  t.name = "theory_curve";
  t.config = {{"model.d", "100"}, {"train.eta", "0.1"}};
  t.data.columns = {"t", "R", "L_G"};
  t.data.rows = {{0.0, 0.0, 0.5}, {1.0, 1.0 / 3.0, 0.1 + 0.2}, {1e7, std::numeric_limits<double>::infinity(), 1e-300}};
  const std::string text = write_csv(t);
  const OutputTable back = parse_csv(text);
  CHECK(back.command == t.command);
  CHECK(back.name == t.name);
  CHECK(back.config == t.config);
  CHECK(back.data.columns == t.data.columns);
  REQUIRE(back.data.rows.size() == t.data.rows.size());
  for (std::size_t r = 0; r < t.data.rows.size(); ++r)
    for (std::size_t c = 0; c < 3; ++c) CHECK(back.data.rows[r][c] == t.data.rows[r][c]);
  CHECK(write_csv(back) == text);
  CHECK(text.find("# config model.d = 100\n") != std::string::npos);
}

TEST_CASE("json output nulls non-finite values") {
  OutputTable t;
  t.command = "heatmap";
  t.name = "heatmap";
  t.data.columns = {"x"};
  t.data.rows = {{std::nan("")}, {2.0}};
  const std::string j = write_json(t);
  CHECK(j.find("null") != std::string::npos);
  CHECK(j.find("\"heatmap\"") != std::string::npos);
}

TEST_CASE("svg: empty tables rejected, one rect per heatmap cell, phase axes labelled") {
  DataTable empty;
  empty.columns = {"t", "L_G"};
  CHECK_THROWS_AS(render_svg(empty, SvgKind::lines), InvalidArgument);

  DataTable heat;
  heat.columns = {"inv_lambda", "t", "L_G"};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) heat.rows.push_back({double(i), std::pow(10.0, j), 0.1 * (i + j)});
  const std::string svg = render_svg(heat, SvgKind::heatmap);
  std::size_t rects = 0;
  for (std::size_t at = svg.find("<rect"); at != std::string::npos; at = svg.find("<rect", at + 1)) ++rects;
  CHECK(rects == 12);

  DataTable background;
  background.columns = {"R", "Q", "L_G"};
  background.rows = {{0.0, 0.0, 0.5}, {1.0, 0.0, -0.5}, {0.0, 1.0, 1.0}, {1.0, 1.0, 0.0}};
  DataTable traj;
  traj.columns = {"kappa", "t", "R", "Q", "L_G"};
  traj.rows = {{10.0, 0.0, 0.0, 0.0, 0.5}, {10.0, 1.0, 0.5, 0.3, 0.15}};
  SvgOptions o;
  o.background = &background;
  const std::string phase = render_svg(traj, SvgKind::phase, o);
  CHECK(phase.find(">R<") != std::string::npos);
  CHECK(phase.find(">Q<") != std::string::npos);
  CHECK(phase.find("<polyline") != std::string::npos);
}

TEST_CASE("exit codes: success, config error, failure") {
  TempDir dir("codes");
  const CliRun ok = cli({"theory-curve", "--kappa", "10", "--t-grid", "log:1:100:5", "--out", dir.path.string()});
  CHECK(ok.code == 0);
  CHECK(fs::exists(dir.path / "theory_curve.csv"));

  const CliRun bad_key = cli({"theory-curve", "--seeds", "3", "--out", dir.path.string()});
  CHECK(bad_key.code == 1);
  CHECK(bad_key.err.find("--seeds") != std::string::npos);

  const CliRun bad_value = cli({"theory-curve", "--kappa", "0.5", "--out", dir.path.string()});
  CHECK(bad_value.code == 1);
  CHECK(bad_value.err.find("kappa") != std::string::npos);

  const fs::path cfg = dir.path / "x.cfg";
  std::ofstream(cfg) << "model.d = 40\nmodel.bogus = 1\n";
  const CliRun unknown = cli({"theory-curve", "--config", cfg.string(), "--out", dir.path.string()});
  CHECK(unknown.code == 1);
  CHECK(unknown.err.find("model.bogus") != std::string::npos);

  const fs::path blocker = dir.path / "not_a_dir";
  std::ofstream(blocker) << "x";
  const CliRun io = cli({"theory-curve", "--t-grid", "log:1:100:5", "--out", (blocker / "sub").string()});
  CHECK(io.code == 2);

  CHECK(cli({"nonsense"}).code == 1);
}

TEST_CASE("rerunning from the config echo reproduces the file") {
  TempDir dir("echo");
  const fs::path a = dir.path / "a", b = dir.path / "b";
  REQUIRE(cli({"simulate", "--d", "12", "--p", "8", "--n", "18", "--seeds", "3", "--t-grid", "log:1:1e4:8", "--out",
               a.string()})
              .code == 0);
  const std::string first = slurp(a / "simulate.csv");
  const OutputTable parsed = parse_csv(first);
  const fs::path cfg = dir.path / "echo.cfg";
  {
    std::ofstream f(cfg);
    for (const auto& [k, v] : parsed.config) f << k << " = " << v << "\n";
  }
  REQUIRE(cli({"simulate", "--config", cfg.string(), "--out", b.string()}).code == 0);
  CHECK(slurp(b / "simulate.csv") == first);
}

TEST_CASE("outputs do not depend on the thread budget") {
  TempDir dir("threads");
  const fs::path a = dir.path / "a", b = dir.path / "b";
  const std::vector<std::string> common = {"simulate", "--d", "12", "--p", "8", "--n", "18", "--seeds", "7",
                                           "--t-grid", "log:1:1e5:9"};
  auto with = [&](const fs::path& out, const char* threads) {
    std::vector<std::string> args = common;
    args.insert(args.end(), {"--out", out.string(), "--threads", threads});
    return cli(args).code;
  };
  REQUIRE(with(a, "1") == 0);
  REQUIRE(with(b, "5") == 0);
  CHECK(slurp(a / "simulate.csv") == slurp(b / "simulate.csv"));
}

TEST_CASE("selfcheck passes") {
  const CliRun r = cli({"selfcheck"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}
