#include <doctest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "bakeoff/plots.hpp"
#include "support.hpp"

using namespace bakeoff;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

const std::string kBar = "stroke=\"black\" stroke-width=\"4.00\"";

}  // namespace

TEST_CASE("table round trip") {
  const auto dir = testing_support::temp_dir("plots_table");
  const Table t{{"a", "b"}, {"x y", "0.5"}, {"", "3"}};
  write_table(t, dir / "t.csv");
  CHECK(read_table(dir / "t.csv") == t);
  CHECK_THROWS(write_table({{"a"}, {"x,y"}}, dir / "bad.csv"));
}

TEST_CASE("critical difference diagram") {
  const auto dir = testing_support::temp_dir("plots_cd");
  const std::vector<std::string> names{"A", "B", "C", "D"};
  const RankSummary ranks{{1.2, 2.1, 3.0, 3.7}};

  emit_cd_diagram(names, ranks, CliqueSet{{0, 1, 2, 3}, {{0, 1, 2, 3}}}, dir / "one");
  const std::string one = slurp(dir / "one.svg");
  CHECK(count(one, kBar) == 1);
  for (const auto& n : names) CHECK(one.find(">" + n + " (") != std::string::npos);
  CHECK(slurp(dir / "one.txt").find("A B C D") != std::string::npos);

  emit_cd_diagram(names, ranks, CliqueSet{{0, 1, 2, 3}, {{0}, {1}, {2}, {3}}}, dir / "none");
  CHECK(count(slurp(dir / "none.svg"), kBar) == 0);

  emit_cd_diagram(names, ranks, CliqueSet{{0, 1, 2, 3}, {{0, 1}, {1, 2, 3}}}, dir / "two");
  CHECK(count(slurp(dir / "two.svg"), kBar) == 2);
  const Table t = read_table(dir / "two.csv");
  REQUIRE(t.size() == 7);
  CHECK(t[5] == std::vector<std::string>{"clique", "A|B", "1.200000", "2.100000"});

  // Label anchor lines start at the rank's axis position.
  const std::string svg = slurp(dir / "one.svg");
  const std::regex tick("<line x1=\"([0-9.]+)\" y1=\"160.00\" x2=\"\\1\"");
  std::vector<double> xs;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), tick); it != std::sregex_iterator(); ++it) {
    xs.push_back(std::stod((*it)[1]));
  }
  REQUIRE(xs.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(xs[i] == doctest::Approx(cd_axis_x(ranks.mean_ranks[i], 4)).epsilon(1e-3));
  const double slope = (xs[3] - xs[0]) / (3.7 - 1.2);
  for (std::size_t i = 0; i < 4; ++i) CHECK(xs[i] == doctest::Approx(xs[0] + slope * (ranks.mean_ranks[i] - 1.2)).epsilon(1e-3));
  CHECK(cd_axis_x(2.5, 4) - cd_axis_x(1.5, 4) == doctest::Approx(cd_axis_x(3.5, 4) - cd_axis_x(2.5, 4)));
  CHECK(cd_axis_x(1, 4) < cd_axis_x(4, 4));

  CHECK_THROWS(emit_cd_diagram({"A"}, ranks, CliqueSet{}, dir / "bad"));
}

TEST_CASE("scatter has the diagonal and one mark per dataset") {
  const auto dir = testing_support::temp_dir("plots_scatter");
  emit_scatter({"d1", "d2", "d3"}, {0.71, 0.82, 0.93}, {0.70, 0.85, 0.90}, "A", "B", dir / "s");
  const std::string svg = slurp(dir / "s.svg");
  CHECK(count(svg, "<circle") == 3);
  CHECK(count(svg, "stroke-dasharray") == 1);
  const Table t = read_table(dir / "s.csv");
  CHECK(t[0] == std::vector<std::string>{"label", "A", "B"});
  CHECK(t[2] == std::vector<std::string>{"d2", "0.820000", "0.850000"});
  CHECK_THROWS(emit_scatter({"d1"}, {0.5, 0.6}, {0.5, 0.6}, "A", "B", dir / "bad"));
}

TEST_CASE("histogram bins") {
  const auto dir = testing_support::temp_dir("plots_hist");
  emit_histogram(std::vector<double>(7, 0.0325), 0.01, dir / "h");
  Table t = read_table(dir / "h.csv");
  REQUIRE(t.size() == 2);
  CHECK(t[1] == std::vector<std::string>{"0.030000", "0.040000", "7"});
  CHECK(count(slurp(dir / "h.svg"), "lightsteelblue") == 1);

  emit_histogram({-0.015, -0.005, 0.0, 0.004, 0.019, 0.011}, 0.01, dir / "h2");
  t = read_table(dir / "h2.csv");
  REQUIRE(t.size() == 5);
  CHECK(t[1][0] == "-0.020000");
  CHECK(t[1][2] == "1");
  CHECK(t[2][2] == "1");
  CHECK(t[3][0] == "0.000000");
  CHECK(t[3][2] == "2");
  CHECK(t[4][1] == "0.020000");
  CHECK(t[4][2] == "2");
  std::size_t total = 0;
  for (std::size_t r = 1; r < t.size(); ++r) total += std::stoul(t[r][2]);
  CHECK(total == 6);
  CHECK_THROWS(emit_histogram({}, 0.01, dir / "bad"));
  CHECK_THROWS(emit_histogram({0.1}, 0.0, dir / "bad"));
}

TEST_CASE("sharpshooter figure") {
  const auto dir = testing_support::temp_dir("plots_sharp");
  const auto s = sharpshooter({{1.1, 1.2}, {0.9, 0.8}, {1.1, 0.9}, {0.9, 1.1}});
  emit_sharpshooter({"a", "b", "c", "d"}, s, dir / "ss");
  const Table t = read_table(dir / "ss.csv");
  REQUIRE(t.size() == 5);
  CHECK(t[1][3] == "TP");
  CHECK(t[4][3] == "FN");
  const std::string svg = slurp(dir / "ss.svg");
  CHECK(count(svg, "seagreen") == 2);
  CHECK(count(svg, "firebrick") == 2);
}

TEST_CASE("parameter frequency") {
  const auto dir = testing_support::temp_dir("plots_freq");
  emit_param_frequency(std::vector<std::string>(30, "500"), dir / "p");
  Table t = read_table(dir / "p.csv");
  REQUIRE(t.size() == 2);
  CHECK(t[1] == std::vector<std::string>{"500", "30", "1"});
  CHECK(std::stod(t[1][2]) == 1.0);

  emit_param_frequency({"1000", "50", "200", "50", "1000", "1000"}, dir / "q");
  t = read_table(dir / "q.csv");
  REQUIRE(t.size() == 4);
  CHECK(t[1][0] == "50");
  CHECK(t[2][0] == "200");
  CHECK(t[3][0] == "1000");
  double sum = 0;
  for (std::size_t r = 1; r < t.size(); ++r) sum += std::stod(t[r][2]);
  CHECK(sum == doctest::Approx(1.0));
  CHECK(std::stod(t[3][2]) == doctest::Approx(0.5));
}

TEST_CASE("figures are rendered from their sidecar data alone") {
  const auto dir = testing_support::temp_dir("plots_pure");
  emit_cd_diagram({"A", "B", "C"}, RankSummary{{1.5, 1.5, 3.0}}, CliqueSet{{0, 1, 2}, {{0, 1}, {2}}}, dir / "cd");
  emit_scatter({"x", "y"}, {0.5, 0.6}, {0.55, 0.65}, "A", "B", dir / "sc");
  emit_histogram({0.01, 0.02, -0.03}, 0.01, dir / "hi");
  emit_param_frequency({"a", "b", "a"}, dir / "pf");
  emit_sharpshooter({"x"}, sharpshooter({{1.2, 0.9}}), dir / "sh");
  const std::vector<std::pair<std::string, std::string (*)(const Table&)>> figs{
      {"cd", render_cd_svg}, {"sc", render_scatter_svg}, {"hi", render_histogram_svg},
      {"pf", render_param_frequency_svg}, {"sh", render_sharpshooter_svg}};
  for (const auto& [stem, render] : figs) {
    CAPTURE(stem);
    const Table t = read_table(dir / (stem + ".csv"));
    CHECK(render(t) == slurp(dir / (stem + ".svg")));
    CHECK(render(t) == render(t));
  }
  CHECK(render_cd_text(read_table(dir / "cd.csv")) == slurp(dir / "cd.txt"));
}
