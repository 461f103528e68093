#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "roughlift/path_io.hpp"

namespace fs = std::filesystem;
using roughlift::cli::run;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

// Fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("roughlift_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

nlohmann::json read_json(const fs::path& file) { return nlohmann::json::parse(slurp(file)); }

}  // namespace

TEST_CASE("generate: row count, determinism, resource guard") {
  const fs::path dir = scratch("generate");
  const std::string a = (dir / "a.csv").string();
  const std::string b = (dir / "b.csv").string();
  const std::vector<std::string> base{"generate", "--seed", "7", "--dim", "2", "--grid-level", "11"};
  auto with_out = [&](const std::string& file) {
    auto args = base;
    args.insert(args.end(), {"--out", file});
    return args;
  };
  REQUIRE(invoke(with_out(a)).code == 0);
  REQUIRE(invoke(with_out(b)).code == 0);
  const std::string text = slurp(a);
  CHECK(count_lines(text) == 2050);
  CHECK(text.rfind("t,x_1,x_2\n", 0) == 0);
  CHECK(text == slurp(b));

  const Result big = invoke({"generate", "--grid-level", "20", "--out", (dir / "c.csv").string()});
  CHECK(big.code == 2);
  CHECK(big.err.find("ResourceLimit") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "c.csv"));
}

TEST_CASE("parameter and flag errors exit with 2") {
  CHECK(invoke({"generate", "--alpha", "0.6", "--out", "/dev/null"}).code == 2);
  CHECK(invoke({"generate", "--p", "2", "--out", "/dev/null"}).code == 2);
  CHECK(invoke({"generate", "--wavelet", "haar", "--out", "/dev/null"}).code == 2);
  CHECK(invoke({"generate", "--no-such-flag"}).code == 2);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"lift"}).code == 2);
}

TEST_CASE("lift: constant input gives the identity path") {
  const fs::path dir = scratch("constant");
  {
    std::ofstream in(dir / "flat.csv");
    in << "t,x_1,x_2\n";
    for (int i = 0; i <= 256; ++i) in << i / 256.0 << ",1.5,-2\n";
  }
  const Result r = invoke({"lift", "--in", (dir / "flat.csv").string(), "--levels", "6", "--out",
                           (dir / "lift.csv").string(), "--report", (dir / "r.json").string()});
  REQUIRE(r.code == 0);
  const auto loaded = roughlift::load_group_path_csv((dir / "lift.csv").string());
  CHECK(loaded.path.level1().cwiseAbs().maxCoeff() == 0.0);
  CHECK(loaded.path.level2().cwiseAbs().maxCoeff() == 0.0);
  CHECK(loaded.meta.at("N") == "6");
}

TEST_CASE("lift: report contents, d = 3 pairwise blocks, check round trip") {
  const fs::path dir = scratch("lift");
  const std::string path2 = (dir / "x2.csv").string();
  const std::string path3 = (dir / "x3.csv").string();
  REQUIRE(invoke({"generate", "--seed", "3", "--dim", "2", "--grid-level", "10", "--out", path2}).code == 0);
  REQUIRE(invoke({"generate", "--seed", "4", "--dim", "3", "--grid-level", "10", "--out", path3}).code == 0);

  const std::string lift = (dir / "lift.csv").string();
  const std::string report = (dir / "lift.json").string();
  REQUIRE(invoke({"lift", "--in", path2, "--levels", "8", "--out", lift, "--report", report}).code == 0);
  const auto j = read_json(report);
  for (const char* key : {"experiment", "config", "metrics", "pass", "versions"}) CHECK(j.contains(key));
  for (const char* key : {"pi_norm", "md_norm", "rough_norm", "chen_max_defect"}) CHECK(j["metrics"].contains(key));
  CHECK(j["metrics"]["chen_max_defect"].get<double>() < 1e-9);
  CHECK(j["config"]["alpha"].get<double>() == 0.4);
  CHECK(j["versions"]["wavelet"] == "db8");
  CHECK(j["pass"].get<bool>());

  const std::string report3 = (dir / "lift3.json").string();
  REQUIRE(invoke({"lift", "--in", path3, "--levels", "8", "--report", report3}).code == 0);
  const auto j3 = read_json(report3);
  CHECK(j3["metrics"]["pairwise_blocks"] == 3);
  CHECK(j3["metrics"]["pi_norm"].size() == 3);

  const Result ok = invoke({"check", "--in", lift, "--alpha", "0.4", "--levels", "8"});
  CHECK(ok.code == 0);
  const Result alpha = invoke({"check", "--in", lift, "--alpha", "0.41"});
  CHECK(alpha.code == 2);
  CHECK(alpha.err.find("ConfigMismatch") != std::string::npos);
  CHECK(invoke({"check", "--in", lift, "--wavelet", "db6"}).code == 2);
  CHECK(invoke({"check", "--in", (dir / "missing.csv").string()}).code == 3);
}

TEST_CASE("check: corrupted level-2 entry is reported by name") {
  const fs::path dir = scratch("corrupt");
  const std::string path = (dir / "x.csv").string();
  const std::string lift = (dir / "lift.csv").string();
  REQUIRE(invoke({"generate", "--seed", "5", "--grid-level", "9", "--out", path}).code == 0);
  REQUIRE(invoke({"lift", "--in", path, "--levels", "7", "--out", lift}).code == 0);

  // Bump xx_11 on one data row; the column order is t, x_1, x_2, xx_11, ...
  std::istringstream lines(slurp(lift));
  std::ostringstream edited;
  std::string line;
  int data_row = 0;
  while (std::getline(lines, line)) {
    if (!line.empty() && line[0] != '#' && line[0] != 't' && ++data_row == 40) {
      std::vector<std::string> f;
      std::stringstream ss(line);
      for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
      f[3] = std::to_string(std::stod(f[3]) + 0.5);
      line = f[0];
      for (std::size_t i = 1; i < f.size(); ++i) line += "," + f[i];
    }
    edited << line << '\n';
  }
  std::ofstream(lift) << edited.str();

  const std::string report = (dir / "check.json").string();
  const Result r = invoke({"check", "--in", lift, "--report", report});
  CHECK(r.code == 1);
  CHECK(r.err.find("GroupMembershipViolated") != std::string::npos);
  const auto j = read_json(report);
  CHECK_FALSE(j["pass"].get<bool>());
  CHECK(j["metrics"]["failing"][0] == "GroupMembershipViolated");
}

TEST_CASE("lift: malformed CSV exits with 3 and names the row") {
  const fs::path dir = scratch("malformed");
  {
    std::ofstream in(dir / "bad.csv");
    in << "t,x_1,x_2\n0,0,0\n0.25,1,2\n0.5,oops,1\n0.75,1,1\n1,0,0\n";
  }
  const Result r = invoke({"lift", "--in", (dir / "bad.csv").string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("row 4") != std::string::npos);
  CHECK(r.err.find("ParseError") != std::string::npos);
}

TEST_CASE("norms and experiments produce reports") {
  const fs::path dir = scratch("experiments");
  const std::string path = (dir / "x.csv").string();
  REQUIRE(invoke({"generate", "--seed", "2", "--grid-level", "10", "--out", path}).code == 0);

  const std::string norms = (dir / "norms.json").string();
  REQUIRE(invoke({"norms", "--in", path, "--report", norms}).code == 0);
  const auto n = read_json(norms);
  CHECK(n["metrics"]["components"].size() == 2);
  CHECK(n["metrics"]["sobolev_norm"].get<double>() > 0.0);

  const std::string trunc = (dir / "trunc.json").string();
  const Result t = invoke({"experiment", "--kind", "truncation", "--in", path, "--study-levels", "6", "7", "8",
                           "--report", trunc});
  CHECK(t.code == 0);
  CHECK(read_json(trunc)["metrics"]["norms"].size() == 3);

  const std::string diag = (dir / "diag.json").string();
  CHECK(invoke({"experiment", "--kind", "diagnostic", "--in", path, "--levels", "8", "--report", diag}).code == 0);
  for (const char* key : {"pi_norm", "md_norm", "lhs", "rhs", "ratio", "N", "alpha", "p", "wavelet", "refine_depth"})
    CHECK(read_json(diag)["metrics"].contains(key));

  CHECK(invoke({"experiment", "--kind", "bogus", "--in", path}).code == 2);
  CHECK(invoke({"experiment", "--kind", "lipschitz", "--in", path, "--eps", "0.1", "0.01"}).code == 2);
}

TEST_CASE("path CSV ingestion: spacing tolerance and resampling") {
  using roughlift::ErrorCode;
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return roughlift::read_path_csv(in);
  };
  auto code_of = [&](const std::string& text) -> std::optional<ErrorCode> {
    try {
      parse(text);
    } catch (const roughlift::Error& e) {
      return e.code();
    }
    return std::nullopt;
  };

  std::ostringstream rounded;
  rounded << std::setprecision(6);
  for (int i = 0; i <= 64; ++i) rounded << i / 64.0 << ',' << 0.5 * i << '\n';
  const auto exact = parse(rounded.str());
  CHECK_FALSE(exact.resampling.resampled);
  CHECK(exact.path.level() == 6);

  CHECK(code_of("t,x\n0,0\n0.1,1\n0.3,2\n0.4,3\n") == ErrorCode::ParseError);
  CHECK(code_of("t,x\n0,0\n0.1,1\n0.1,2\n") == ErrorCode::ParseError);
  CHECK(code_of("t,x\n0,0\n0.5,1,2\n1,2\n") == ErrorCode::ParseError);
  CHECK(code_of("t,x\n0,0\n0.5,nan\n1,2\n") == ErrorCode::ParseError);

  std::ostringstream hundred;
  hundred << "# comment\ntime,a,b\n";
  for (int i = 0; i < 100; ++i) hundred << 2.0 + 3.0 * i / 99.0 << ',' << i << ',' << -i << '\n';
  const auto loaded = parse(hundred.str());
  CHECK(loaded.resampling.resampled);
  CHECK(loaded.resampling.original_samples == 100);
  CHECK(loaded.resampling.original_t0 == 2.0);
  CHECK(loaded.path.level() == 7);
  CHECK(loaded.path.values()(128, 0) == doctest::Approx(99.0));
  CHECK(loaded.path.values()(64, 1) == doctest::Approx(-49.5));
}
