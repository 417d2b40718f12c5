#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cmlc/dataset.hpp"
#include "cmlc/io.hpp"
#include "test_support.hpp"

using namespace cmlc;

namespace {

const std::string kDataDir = TEST_DATA_DIR;

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("cmlc_io_" + name))
      .string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("measure files: counting form") {
  const auto measure = read_measure_file(kDataDir + "/additive_k3.measure");
  const auto* profile = std::get_if<CountingProfile>(&measure);
  REQUIRE(profile != nullptr);
  CHECK(profile->label_count() == 3);
  CHECK(profile->at_count(1) == doctest::Approx(1.0 / 3));
}

TEST_CASE("measure files: capacity form with defaulted subsets") {
  const auto measure = read_measure_file(kDataDir + "/subset01_k3.measure");
  const auto* cap = std::get_if<Capacity>(&measure);
  REQUIRE(cap != nullptr);
  CHECK((*cap)[full_mask(3)] == 1.0);
  CHECK((*cap)[0b011] == 0.0);
  CHECK(validate_capacity(*cap).ok());
}

TEST_CASE("measure files: moebius round trip preserves masses") {
  testutil::Rng rng(2023);
  const auto moeb = moebius_of(testutil::random_capacity(rng, 5));
  const auto path = temp_path("roundtrip.measure");
  write_measure_file(path, moeb);
  const auto loaded = read_measure_file(path);
  const auto* back = std::get_if<MoebiusRepresentation>(&loaded);
  REQUIRE(back != nullptr);
  REQUIRE(back->masses().size() == moeb.masses().size());
  for (const auto& [subset, mass] : moeb.masses())
    CHECK(back->mass(subset) == mass);  // 17 significant digits round-trip
  std::remove(path.c_str());
}

TEST_CASE("measure files: errors carry line context") {
  CHECK_THROWS_AS(read_measure_file(kDataDir + "/mixed_forms.measure"),
                  ParseError);
  CHECK_THROWS_AS(read_measure_file(temp_path("missing.measure")), ParseError);

  const auto bad_profile = temp_path("bad_profile.measure");
  spit(bad_profile, "K=2\ncounting: 0 0.9 0.5\n");
  CHECK_THROWS_AS(read_measure_file(bad_profile), ValidationError);
  std::remove(bad_profile.c_str());

  const auto no_k = temp_path("no_k.measure");
  spit(no_k, "counting: 0 1\n");
  CHECK_THROWS_AS(read_measure_file(no_k), ParseError);
  std::remove(no_k.c_str());

  const auto bad_version = temp_path("v2.measure");
  spit(bad_version, "format=2\nK=2\ncounting: 0 0.5 1\n");
  CHECK_THROWS_AS(read_measure_file(bad_version), ParseError);
  std::remove(bad_version.c_str());
}

TEST_CASE("distribution files") {
  const auto d = read_distribution_file(kDataDir + "/three_label.dist");
  CHECK(d.label_count() == 3);
  CHECK(d.mass(0b000) == 0.25);
  CHECK(d.mass(0b011) == 0.1875);  // labels 1 and 2 relevant
  CHECK(d.mass(0b001) == 0.0);

  const auto path = temp_path("dist_roundtrip.dist");
  write_distribution_file(path, d);
  const auto back = read_distribution_file(path);
  for (const auto& [labeling, p] : d.support()) CHECK(back.mass(labeling) == p);
  std::remove(path.c_str());

  const auto off = temp_path("off.dist");
  spit(off, "K=2\n0 0 0.5\n1 1 0.4\n");
  CHECK_THROWS_AS(read_distribution_file(off), ValidationError);
  const auto lenient =
      read_distribution_file(off, LabelDistribution::Mode::Lenient);
  CHECK(lenient.renormalized());
  CHECK(lenient.mass(0b00) == doctest::Approx(5.0 / 9));
  std::remove(off.c_str());
}

TEST_CASE("loss spec strings") {
  CHECK(std::holds_alternative<HammingSpec>(parse_loss_spec("hamming")));
  CHECK(std::holds_alternative<Subset01Spec>(parse_loss_spec("subset01")));
  CHECK(std::holds_alternative<FMeasureSpec>(parse_loss_spec("fmeasure")));
  CHECK(std::get<PolynomialSpec>(parse_loss_spec("poly:2.5")).alpha == 2.5);
  CHECK(std::get<BinomialSpec>(parse_loss_spec("binom:3")).k == 3);
  CHECK(std::holds_alternative<CountingSpec>(parse_loss_spec(
      "counting:@" + kDataDir + "/increment_weights_k6.measure")));
  CHECK(std::holds_alternative<CapacitySpec>(parse_loss_spec(
      "measure:@" + kDataDir + "/subset01_k3.measure")));
  CHECK_THROWS_AS(parse_loss_spec("poly:0.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_loss_spec("binom:x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_loss_spec("nonsense"), std::invalid_argument);
  CHECK_THROWS_AS(parse_loss_spec("counting:@" + kDataDir +
                                  "/subset01_k3.measure"),
                  std::invalid_argument);
  // Invalid capacity behind measure:@ is rejected before use.
  CHECK_THROWS_AS(parse_loss_spec("measure:@" + kDataDir +
                                  "/nonmonotone_k3.measure"),
                  ValidationError);
}

TEST_CASE("prediction CSV: load, validate, save round trip") {
  const auto ps = load_predictions(kDataDir + "/worked_example.csv");
  CHECK(ps.label_count == 6);
  CHECK(ps.size() == 1);
  CHECK(ps.method == "worked_example");
  CHECK(ps.dataset == "data");
  CHECK(ps.truth[0][1] == 1);
  CHECK(ps.scores[0][2] == 0.9);

  const auto path = temp_path("roundtrip.csv");
  save_predictions(path, ps);
  const auto back = load_predictions(path, ps.method, ps.dataset);
  REQUIRE(back.size() == ps.size());
  REQUIRE(back.label_count == ps.label_count);
  for (int n = 0; n < ps.size(); ++n)
    for (int i = 0; i < ps.label_count; ++i) {
      CHECK(back.truth[static_cast<std::size_t>(n)][i] ==
            ps.truth[static_cast<std::size_t>(n)][i]);
      CHECK(back.scores[static_cast<std::size_t>(n)][i] ==
            ps.scores[static_cast<std::size_t>(n)][i]);
    }
  std::remove(path.c_str());
}

TEST_CASE("prediction CSV: schema violations name the line") {
  try {
    load_predictions(kDataDir + "/bad_score.csv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("column 4") != std::string::npos);
  }
  CHECK_THROWS_AS(load_predictions(kDataDir + "/bad_truth.csv"), ParseError);

  const auto short_row = temp_path("short_row.csv");
  spit(short_row, "y_1,y_2,s_1,s_2\n0,1,0.5\n");
  CHECK_THROWS_AS(load_predictions(short_row), ParseError);
  std::remove(short_row.c_str());

  const auto bad_header = temp_path("bad_header.csv");
  spit(bad_header, "a,b,c,d\n0,1,0.5,0.5\n");
  CHECK_THROWS_AS(load_predictions(bad_header), ParseError);
  std::remove(bad_header.c_str());
}

TEST_CASE("compute_meta") {
  PredictionSet ps;
  ps.method = "m";
  ps.dataset = "d";
  ps.label_count = 2;
  ps.truth.emplace_back(std::vector<int>{1, 0});
  ps.truth.emplace_back(std::vector<int>{0, 1});
  ps.scores.emplace_back(std::vector<double>{1.0, 0.0});
  ps.scores.emplace_back(std::vector<double>{0.0, 1.0});
  auto meta = compute_meta(ps);
  CHECK(meta.instances == 2);
  CHECK(meta.labels == 2);
  CHECK(meta.cardinality == doctest::Approx(1.0));
  CHECK(meta.unique_label_combinations == 2);
  CHECK(meta.label_to_instance_ratio == doctest::Approx(1.0));

  // Instance order does not matter.
  std::swap(ps.truth[0], ps.truth[1]);
  const auto swapped = compute_meta(ps);
  CHECK(swapped.unique_label_combinations == meta.unique_label_combinations);
  CHECK(swapped.cardinality == meta.cardinality);

  PredictionSet zeros;
  zeros.label_count = 3;
  for (int n = 0; n < 4; ++n) {
    zeros.truth.emplace_back(std::vector<int>{0, 0, 0});
    zeros.scores.emplace_back(std::vector<double>{0.0, 0.0, 0.0});
  }
  const auto zmeta = compute_meta(zeros);
  CHECK(zmeta.cardinality == 0.0);
  CHECK(zmeta.unique_label_combinations == 1);
}

TEST_CASE("compute_meta at emotions-like scale") {
  // 593 instances over 6 labels with 1109 relevant labels in total, i.e.
  // cardinality 1109/593 = 1.8701...
  PredictionSet ps;
  ps.dataset = "synthetic-emotions";
  ps.label_count = 6;
  testutil::Rng rng(593);
  for (int n = 0; n < 593; ++n) {
    std::vector<int> row(6, 0);
    row[static_cast<std::size_t>(testutil::uniform_int(rng, 0, 5))] = 1;
    if (n < 516) {
      int second = testutil::uniform_int(rng, 0, 5);
      while (row[static_cast<std::size_t>(second)] == 1)
        second = testutil::uniform_int(rng, 0, 5);
      row[static_cast<std::size_t>(second)] = 1;
    }
    ps.truth.emplace_back(row);
    std::vector<double> s(6, 0.0);
    ps.scores.emplace_back(s);
  }
  const auto meta = compute_meta(ps);
  CHECK(meta.instances == 593);
  CHECK(meta.labels == 6);
  CHECK(meta.cardinality == doctest::Approx(1109.0 / 593));
  CHECK(std::abs(meta.cardinality - 1.87) <= 0.005);
  CHECK(meta.label_to_instance_ratio == doctest::Approx(6.0 / 593));
}

TEST_CASE("write_results is byte-stable") {
  std::vector<ResultRow> rows = {{1.0, "A", "demo", 0.25},
                                 {1.0, "B", "demo", 0.125},
                                 {2.0, "A", "demo", 1.0 / 3.0}};
  const auto p1 = temp_path("r1.csv");
  const auto p2 = temp_path("r2.csv");
  write_results(p1, rows);
  write_results(p2, rows);
  const auto text = slurp(p1);
  CHECK(text == slurp(p2));
  CHECK(text ==
        "# format=1\nparameter,method,dataset,mean_loss\n"
        "1,A,demo,0.25\n1,B,demo,0.125\n2,A,demo,0.333333\n");
  const auto empty = temp_path("r0.csv");
  write_results(empty, {});
  CHECK(slurp(empty) == "# format=1\nparameter,method,dataset,mean_loss\n");
  std::remove(p1.c_str());
  std::remove(p2.c_str());
  std::remove(empty.c_str());
}
