#include <cmath>
#include <doctest.h>
#include <map>
#include <sstream>

#include "pec/analysis.hpp"
#include "pec/caching.hpp"
#include "pec/csv.hpp"
#include "pec/experiments.hpp"

using namespace pec;
using namespace pec::exp;

namespace {

struct Parsed {
  std::map<std::string, std::string> echo;
  std::vector<std::string> header;
  std::vector<std::map<std::string, std::string>> rows;
};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

Parsed parse(const std::string& text) {
  Parsed p;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      p.echo[line.substr(2, eq - 2)] = line.substr(eq + 1);
    } else if (p.header.empty()) {
      p.header = split(line, ',');
    } else {
      const auto cells = split(line, ',');
      REQUIRE(cells.size() == p.header.size());
      std::map<std::string, std::string> row;
      for (std::size_t i = 0; i < cells.size(); ++i) row[p.header[i]] = cells[i];
      p.rows.push_back(std::move(row));
    }
  }
  return p;
}

double at(const std::map<std::string, std::string>& row, const std::string& col) { return std::stod(row.at(col)); }

ExperimentConfig config(int id) {
  ExperimentConfig c;
  c.id = id;
  c.trials = 2000;
  return c;
}

}  // namespace

TEST_CASE("reruns are byte-identical and carry the config echo") {
  for (int id = 1; id <= 6; ++id) {
    const std::string a = run_experiment(config(id));
    CHECK(a == run_experiment(config(id)));
    const auto p = parse(a);
    CHECK(p.echo.at("experiment").rfind(std::to_string(id), 0) == 0);
    CHECK(p.echo.count("units"));
    CHECK(p.echo.at("m") == "256");
    CHECK(p.echo.at("seed") == "1");
    CHECK(!p.header.empty());
    CHECK(!p.rows.empty());
  }
}

TEST_CASE("invalid configurations are rejected") {
  auto bad = config(7);
  CHECK_THROWS_AS(run_experiment(bad), std::invalid_argument);
  bad = config(1);
  bad.eps = {0.1, 1.5};
  CHECK_THROWS_AS(run_experiment(bad), std::invalid_argument);
  bad = config(1);
  bad.delta = 0.0;
  CHECK_THROWS_AS(run_experiment(bad), std::invalid_argument);
  bad = config(3);
  bad.kappa = {0};
  CHECK_THROWS_AS(run_experiment(bad), std::invalid_argument);
  bad = config(6);
  bad.r = {600};
  CHECK_THROWS_AS(run_experiment(bad), std::invalid_argument);
  bad = config(6);
  bad.trials = 0;
  CHECK_THROWS_AS(run_experiment(bad), std::invalid_argument);
}

TEST_CASE("single-query penalty rows") {
  const auto p = parse(run_experiment(config(1)));
  CHECK(p.rows.size() == 14);
  std::map<std::pair<std::string, std::string>, double> ratio;
  for (const auto& row : p.rows) {
    ratio[{row.at("eps"), row.at("kappa")}] = at(row, "ratio_exact");
    CHECK(at(row, "ratio_exact") == doctest::Approx(at(row, "sigma_unc_bits") / at(row, "sigma_code_bits")));
    CHECK(at(row, "sigma_code_bits") == 8.0 * at(row, "r_star"));
  }
  CHECK(std::fabs(ratio[{"0.1", "50"}] - 6.12) <= 0.03);
  CHECK(std::fabs(ratio[{"0.1", "5000"}] - 9.49) <= 0.03);
  CHECK(std::fabs(ratio[{"0.2", "50"}] - 3.57) <= 0.03);
  CHECK(std::fabs(ratio[{"0.2", "5000"}] - 4.83) <= 0.03);
  for (const auto& row : p.rows) {
    if (row.at("eps") == "0.1" && row.at("kappa") == "5000") {
      CHECK(at(row, "ratio_refined") == doctest::Approx(9.45).epsilon(0.005));
    }
  }
}

TEST_CASE("exponent rows") {
  const auto p = parse(run_experiment(config(2)));
  CHECK(p.rows.size() == 18);
  for (const auto& row : p.rows) {
    CHECK(at(row, "kl_bits") == doctest::Approx(analysis::kl_bernoulli(at(row, "alpha"), 0.3)));
    if (row.at("kappa") == "5000") {
      CHECK(at(row, "br_rel_err") <= 0.02);
      CHECK(std::fabs(at(row, "psi_minus_half_log2_kappa") - at(row, "c_alpha")) <= 0.05);
    }
  }
}

TEST_CASE("dispersion rows") {
  const auto p = parse(run_experiment(config(3)));
  for (const auto& row : p.rows) {
    if (row.at("panel") != "dispersion") continue;
    const double kappa = at(row, "kappa");
    CHECK(at(row, "delta_c") == doctest::Approx((at(row, "r") - 0.2 * kappa) / std::sqrt(kappa)));
    CHECK(at(row, "unc_second_order_bits") == 0.0);
    CHECK(at(row, "pe_exact") <= 0.1);
    if (kappa >= 500) CHECK(std::fabs(at(row, "delta_c") - 0.513) <= 1 / std::sqrt(kappa));
  }
}

TEST_CASE("depth-resilience rows") {
  const auto p = parse(run_experiment(config(4)));
  REQUIRE(p.rows.size() == 4);
  const std::vector<double> want{4.00, 6.80, 11.67, 25.29};
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::fabs(at(p.rows[i], "depth_ratio") - want[i]) <= 0.01);
  CHECK(p.rows[3].at("d_max_chain") == "177");
  CHECK(p.rows[3].at("d_max_merge") == "7");
}

TEST_CASE("multi-query rows agree with a joint plan over the real query family") {
  const auto p = parse(run_experiment(config(5)));
  REQUIRE(p.rows.size() == multi_query_configs().size());
  for (const auto& row : p.rows) {
    const int L = std::stoi(row.at("L"));
    const double alpha = at(row, "alpha");
    const auto queries = common_core_queries(L, 500, alpha);
    const auto plan = plan_joint(queries, 0.2, 0.1, 8192);
    CHECK(static_cast<double>(plan.n_eff) == at(row, "n_eff"));
    CHECK(plan.overlap_index == doctest::Approx(at(row, "omega")));
    CHECK(static_cast<double>(plan.coded->r) == at(row, "r_star"));
    const double ratio = static_cast<double>(plan.unc->facts.size()) / static_cast<double>(plan.coded->r);
    CHECK(ratio == doctest::Approx(at(row, "ratio_exact")).epsilon(1e-12));
    CHECK(at(row, "refined_rel_err") <= 0.02);
  }
}

TEST_CASE("monte carlo rows reproduce the exact table values") {
  const auto p = parse(run_experiment(config(6)));
  const std::vector<double> want{0.856, 0.473, 0.100, 0.012, 0.893, 0.488, 0.200,
                                 0.984, 0.837, 0.451, 0.116, 0.832, 0.657, 0.300};
  REQUIRE(p.rows.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(std::round(at(p.rows[i], "pe_exact") * 1000) / 1000 == doctest::Approx(want[i]).epsilon(1e-12));
    CHECK(at(p.rows[i], "trials") == 2000);
  }
  auto cfg = config(6);
  cfg.r = {50, 99};
  const auto q = parse(run_experiment(cfg));
  CHECK(q.rows.size() == 2 + 3 + 2 + 3);
  CHECK(q.rows[0].at("param") == "r=50");
  CHECK(q.rows[3].at("param") == "N=3");
  CHECK(q.rows[5].at("param") == "r=50");
}

TEST_CASE("common-core query family") {
  const auto qs = common_core_queries(3, 10, 0.3);
  REQUIRE(qs.size() == 3);
  for (const auto& q : qs) {
    CHECK(q.size() == 10);
    CHECK(std::vector<Index>(q.begin(), q.begin() + 3) == std::vector<Index>{1, 2, 3});
  }
  CHECK(qs[1][3] == 11);
  CHECK(qs[2].back() == 3 + 21);
  CHECK_THROWS_AS(common_core_queries(0, 10, 0.3), std::invalid_argument);
}

TEST_CASE("csv number formatting round-trips") {
  CHECK(csv::num(0.1) == "0.1");
  CHECK(csv::num(25.285714285714285) == "25.285714285714285");
  CHECK(csv::num(INFINITY) == "inf");
  CHECK(std::stod(csv::num(1.0 / 3)) == 1.0 / 3);
}
