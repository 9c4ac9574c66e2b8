#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "lpigrad/bench/config.hpp"
#include "lpigrad/bench/experiment.hpp"
#include "lpigrad/errors.hpp"

using namespace lpigrad;
using namespace lpigrad::bench;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("lpigrad_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

// File contents with the trailing wall-clock column removed from every line.
std::string without_last_column(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string out;
  for (std::string line; std::getline(in, line);) out += line.substr(0, line.rfind(',')) + '\n';
  return out;
}

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

ExperimentConfig small_reference(const std::filesystem::path& out) {
  ExperimentConfig c = parse_config_json(reference_config_json());
  c.output_dir = out.string();
  c.iterations = 25;
  return c;
}

}  // namespace

TEST_CASE("minimal config gets the defaults") {
  const auto c = parse_config_text(R"({"methods": [{"name": "gd"}]})");
  REQUIRE(c.methods.size() == 1);
  CHECK(c.methods[0].step == 1.0);
  CHECK(c.methods[0].batch == 500);
  CHECK(c.methods[0].beta == 0.99);
  CHECK(c.methods[0].momentum == 0.2);
  CHECK(c.problem.n == 1000);
  CHECK(c.problem.margin == 0.01);
  CHECK(c.problem.noise_std == 0.05);
  CHECK(c.iterations == 200);

  const auto s = parse_config_text(R"({"methods": ["gd", "fgm_lpi"]})");
  CHECK(s.methods[1].mode == "fixed_momentum");
}

TEST_CASE("config errors") {
  CHECK(error_of(R"({"methods": [{"name": "adam"}]})").find("adam") != std::string::npos);
  CHECK(error_of(R"({"methods": ["gd"], "iteratons": 3})").find("iteratons") != std::string::npos);
  CHECK(error_of(R"({"methods": [{"name": "gd", "stepsize": 1}]})").find("stepsize") != std::string::npos);
  CHECK(error_of(R"({"methods": [{"name": "lpi_gd", "grid_cardinality": 0}]})").find("grid_cardinality") != std::string::npos);
  CHECK(error_of(R"({"methods": [{"name": "gd", "step": "big"}]})").find("step") != std::string::npos);
  CHECK(error_of(R"({"methods": []})").find("methods") != std::string::npos);
  CHECK(error_of(R"({"methods": [{"name": "catalyst_lpi", "mode": "fast"}]})").find("mode") != std::string::npos);
  CHECK(error_of("{\n  \"methods\": [\n    \"gd\",\n  ]\n}").find(":4:") != std::string::npos);
  CHECK_THROWS_AS(parse_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("reference config expands to the published search") {
  const auto c = parse_config_json(reference_config_json());
  const auto prob = make_problem(c);
  const auto run_cells = expand_cells(c, prob, RunMode::run);
  CHECK(run_cells.size() == 5);
  const auto search = expand_cells(c, prob, RunMode::search);
  const auto lpi = std::count_if(search.begin(), search.end(), [](const Cell& x) { return x.method == "lpi_gd"; });
  CHECK(lpi == 30);

  // the shipped file is the same document
  std::ifstream in(std::string(LPIGRAD_SOURCE_DIR) + "/configs/reference.json");
  REQUIRE(in);
  CHECK(nlohmann::json::parse(in) == reference_config_json());
}

TEST_CASE("zero iterations give single-row traces") {
  const auto dir = fresh_dir("k0");
  ExperimentConfig c = small_reference(dir);
  c.iterations = 0;
  const auto result = run_experiment(c, RunOptions{});
  CHECK(result.failures() == 0);
  for (const auto& cell : result.cells) {
    REQUIRE(cell.trace);
    CHECK(cell.trace->records.size() == 1);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("experiments are deterministic across runs and thread counts") {
  const auto d1 = fresh_dir("det1");
  const auto d2 = fresh_dir("det2");
  RunOptions serial;
  serial.mode = RunMode::search;
  RunOptions parallel = serial;
  parallel.threads = 4;
  const auto r1 = run_experiment(small_reference(d1), serial);
  const auto r2 = run_experiment(small_reference(d2), parallel);
  CHECK(r1.cells.size() == 34);
  CHECK(without_last_column(d1 / "summary.csv") == without_last_column(d2 / "summary.csv"));
  for (const auto& entry : std::filesystem::directory_iterator(d1 / "traces"))
    CHECK(without_last_column(entry.path()) == without_last_column(d2 / "traces" / entry.path().filename()));

  // summary oracle calls match each trace's last row
  for (const auto& cell : r1.cells) CHECK(cell.row.total_oracle_calls == cell.trace->back().oracle_calls);
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
}

TEST_CASE("a failing cell does not disturb the others") {
  const auto d1 = fresh_dir("iso1");
  const auto d2 = fresh_dir("iso2");
  ExperimentConfig good = small_reference(d1);
  ExperimentConfig mixed = small_reference(d2);
  MethodSpec boom;
  boom.name = "gd";
  boom.label = "gd_diverging";
  boom.step = 50.0;
  mixed.methods.push_back(boom);

  const auto a = run_experiment(good, RunOptions{});
  const auto b = run_experiment(mixed, RunOptions{});
  CHECK(a.failures() == 0);
  CHECK(b.failures() == 1);
  const auto& failed = b.cells.back();
  CHECK(failed.row.status.rfind("error:NonFinite", 0) == 0);
  CHECK_FALSE(failed.trace);
  for (const auto& entry : std::filesystem::directory_iterator(d1 / "traces"))
    CHECK(without_last_column(entry.path()) == without_last_column(d2 / "traces" / entry.path().filename()));

  const auto rows = read_summary(d2 / "summary.csv");
  CHECK(rows.size() == 6);
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
}

TEST_CASE("unbuildable grids fail only their cells") {
  const auto dir = fresh_dir("sing");
  ExperimentConfig c;
  c.output_dir = dir.string();
  c.iterations = 3;
  c.interpolation.bandwidth = 0.02;  // wider than the data margin
  MethodSpec gd;
  gd.name = gd.label = "gd";
  MethodSpec lpi;
  lpi.name = lpi.label = "lpi_gd";
  c.methods = {gd, lpi};
  const auto r = run_experiment(c, RunOptions{});
  CHECK(r.failures() == 1);
  CHECK(r.cells[0].row.ok());
  CHECK(r.cells[1].row.status.rfind("error:DomainViolation", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("summary ordering") {
  std::vector<SummaryRow> rows;
  for (std::string m : {"lpi_gd", "gd"})
    for (int card : {800, 100, 250})
      for (double init : {1.0, 0.0, 0.4}) {
        SummaryRow r;
        r.method = m;
        r.grid_cardinality = card;
        r.init = init;
        r.final_objective = card + init;
        rows.push_back(r);
      }
  const auto dir = fresh_dir("order");
  std::filesystem::create_directories(dir);
  emit_summary(rows, dir / "a.csv");
  std::shuffle(rows.begin(), rows.end(), std::mt19937_64(3));
  emit_summary(rows, dir / "b.csv");
  CHECK(without_last_column(dir / "a.csv") == without_last_column(dir / "b.csv"));
  const auto back = read_summary(dir / "a.csv");
  REQUIRE(back.size() == 18);
  CHECK(back.front().method == "gd");
  CHECK(back.front().grid_cardinality == 100);
  CHECK(back.front().init == 0.0);

  emit_summary({rows.front()}, dir / "one.csv");
  std::ifstream in(dir / "one.csv");
  int lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("weight cache files for a config") {
  const auto dir = fresh_dir("wc");
  ExperimentConfig c = small_reference(dir / "out");
  const auto files = build_weight_cache(c, RunMode::search, dir / "cache");
  CHECK(files.size() == 5);
  for (const auto& f : files) CHECK(std::filesystem::exists(f));
  RunOptions o;
  o.cache_dir = dir / "cache";
  const auto with_cache = run_experiment(c, o);
  c.output_dir = (dir / "out2").string();
  const auto without = run_experiment(c, RunOptions{});
  for (std::size_t i = 0; i < with_cache.cells.size(); ++i)
    CHECK(with_cache.cells[i].row.final_objective == without.cells[i].row.final_objective);
  std::filesystem::remove_all(dir);
}
