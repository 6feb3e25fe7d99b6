#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "cpb/io.hpp"
#include "cpb/rng.hpp"

// End-to-end checks against the built binary (path injected by CMake).

namespace {

const std::string kBinary = CPB_CLI_PATH;

std::string work_dir() {
  static const std::string dir = [] {
    std::string d = "/tmp/cpb_cli_test_" + std::to_string(::getpid());
    if (std::system(("mkdir -p " + d).c_str()) != 0) d = "/tmp";
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string command = kBinary + " " + args + " >" + work_dir() +
                              "/stdout.txt 2>" + work_dir() + "/stderr.txt";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out << bytes;
}

// Small complete daily-flow fixture with a level shift for the last years.
std::string make_daily_fixture(int first_year, int years, int change_after) {
  cpb::RngStream rng(2718);
  std::ostringstream out;
  out << "date,flow\n";
  for (int y = 0; y < years; ++y) {
    cpb::CalendarDate date{first_year + y, 1, 1};
    while (date.year == first_year + y) {
      const double base = y < change_after ? 10.0 : 14.0;
      out << cpb::format_date(date) << ','
          << (base + std::abs(rng.next_gaussian())) << '\n';
      date = cpb::next_day(date);
    }
  }
  return out.str();
}

std::string make_series_fixture(int first_year, int n, int change_after) {
  cpb::RngStream rng(3141);
  std::ostringstream out;
  out << "year,value\n";
  for (int i = 0; i < n; ++i) {
    const double base = i < change_after ? 1000.0 : 1800.0;
    out << (first_year + i) << ',' << (base + 300.0 * rng.next_gaussian()) << '\n';
  }
  return out.str();
}

}  // namespace

TEST_CASE("help exits zero, usage errors exit two") {
  CHECK(run("--help") == 0);
  CHECK(run("cusum --help") == 0);
  CHECK(run("") == 2);                      // missing subcommand
  CHECK(run("cusum") == 2);                 // missing required flags
  CHECK(run("frobnicate") == 2);            // unknown subcommand
  CHECK(run("table --id 9 --out x") == 2);  // out-of-range table id
  CHECK(run("cvm --input a --block-length nope --boot 9 --out b") == 2);
}

TEST_CASE("missing and malformed inputs exit one") {
  CHECK(run("cusum --input " + work_dir() + "/absent.csv --block-length 2 --out " +
            work_dir() + "/r.json") == 1);
  spit(work_dir() + "/bad.csv", "date,flow\n1911-01-01,1\n1911-01-03,2\n");
  const int code = run("cusum --input " + work_dir() +
                       "/bad.csv --block-length 2 --out " + work_dir() + "/r.json");
  CHECK(code == 1);
  CHECK(slurp(work_dir() + "/stderr.txt").find("1911-01-02") != std::string::npos);
}

TEST_CASE("cusum on daily flows finds the planted change, byte-identically") {
  const std::string input = work_dir() + "/daily.csv";
  spit(input, make_daily_fixture(1950, 12, 7));

  const std::string base_args = "cusum --input " + input +
                                " --block-length 3 --boot 199 --alpha 0.05 "
                                "--seed 11 --emit-process " +
                                work_dir() + "/trace.csv --out ";
  REQUIRE(run(base_args + work_dir() + "/report1.json") == 0);
  REQUIRE(run(base_args + work_dir() + "/report2.json") == 0);
  const std::string first = slurp(work_dir() + "/report1.json");
  CHECK(first == slurp(work_dir() + "/report2.json"));

  const cpb::ReportDocument doc = cpb::parse_report(first);
  const auto& payload = std::get<cpb::TestReportDoc>(doc.payload);
  CHECK(payload.statistic_kind == "cusum");
  CHECK(payload.report.reject);
  CHECK(*payload.argmax_year == 1956);  // last year before the planted change
  CHECK(*payload.change_year == 1957);

  const std::string trace = slurp(work_dir() + "/trace.csv");
  CHECK(trace.rfind("index,label,value,threshold\n", 0) == 0);
  CHECK(trace.find(",1956,") != std::string::npos);
}

TEST_CASE("cvm on an annual series reports the first post-change year") {
  const std::string input = work_dir() + "/annual.csv";
  spit(input, make_series_fixture(1850, 60, 40));
  const std::string args = "cvm --input " + input +
                           " --block-length 5 --boot 199 --alpha 0.05 --seed 4 "
                           "--out " +
                           work_dir() + "/cvm.json";
  REQUIRE(run(args) == 0);
  const cpb::ReportDocument doc = cpb::parse_report(slurp(work_dir() + "/cvm.json"));
  const auto& payload = std::get<cpb::TestReportDoc>(doc.payload);
  CHECK(payload.statistic_kind == "cvm");
  CHECK(payload.report.reject);
  CHECK(*payload.change_year == 1890);  // planted at index 40 of an 1850 start

  // the default weight (gaussian:2000,2000) also runs cleanly
  CHECK(run("cvm --input " + input + " --block-length 5 --boot 99 --seed 4 --out " +
            work_dir() + "/cvm_default.json") == 0);
}

TEST_CASE("simulated curves feed straight back into the cusum command") {
  const std::string curves = work_dir() + "/curves.csv";
  REQUIRE(run("simulate far1 --psi-kernel wiener --psi-norm 0.3 --n 40 --grid 50 "
              "--burn-in 100 --seed 21 --out " +
              curves) == 0);
  const std::string head = slurp(curves).substr(0, 14);
  CHECK(head == "curve,t,value\n");
  CHECK(run("cusum --input " + curves +
            " --block-length dyadic:1.0,0.3333 "
            "--boot 99 --alpha 0.1 --seed 3 --out " +
            work_dir() + "/sim_report.json") == 0);
  const cpb::ReportDocument doc =
      cpb::parse_report(slurp(work_dir() + "/sim_report.json"));
  const auto& payload = std::get<cpb::TestReportDoc>(doc.payload);
  CHECK(payload.report.plan.n == 40);
  CHECK_FALSE(payload.argmax_year.has_value());  // no year labels for curves
}

TEST_CASE("simulated ar1 series with a skewness flip feeds the cvm command") {
  const std::string series = work_dir() + "/skew.csv";
  REQUIRE(run("simulate ar1 --a1 0.2 --n 120 --seed 8 --skewness --at 60 --out " +
              series) == 0);
  REQUIRE(run("cvm --input " + series +
              " --weight gaussian:2,2 --block-length 10 --boot 199 --seed 2 "
              "--out " +
              work_dir() + "/skew.json") == 0);
  // shift and skewness are mutually exclusive
  CHECK(run("simulate ar1 --a1 0.2 --n 50 --shift 1 --skewness --at 25 --out " +
            work_dir() + "/x.csv") == 2);
}

TEST_CASE("table command writes CSV and JSON with embedded references") {
  const std::string csv_path = work_dir() + "/table5.csv";
  REQUIRE(run("table --id 5 --scale desk --seed 1 --threads 2 --runs 4 --boot 19 "
              "--out " +
              csv_path) == 0);
  const std::string csv = slurp(csv_path);
  CHECK(csv.rfind("table,scale,", 0) == 0);
  CHECK(csv.find("0.94499999999999995") != std::string::npos);  // published 0.945
  CHECK(csv.find("cusum") != std::string::npos);
  CHECK(csv.find("cvm") != std::string::npos);

  const std::string json_path = work_dir() + "/table5.json";
  REQUIRE(run("table --id 5 --scale desk --seed 1 --threads 2 --runs 4 --boot 19 "
              "--out " +
              json_path) == 0);
  const cpb::ReportDocument doc = cpb::parse_report(slurp(json_path));
  const auto& payload = std::get<cpb::ExperimentTableDoc>(doc.payload);
  CHECK(payload.table_id == 5);
  CHECK(payload.rows.size() == 18);
  // identical invocation reproduces the file byte for byte
  const std::string json_path2 = work_dir() + "/table5_again.json";
  REQUIRE(run("table --id 5 --scale desk --seed 1 --threads 1 --runs 4 --boot 19 "
              "--out " +
              json_path2) == 0);
  CHECK(slurp(json_path) == slurp(json_path2));
}
