#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lzc/app/commands.hpp"
#include "lzc/app/config.hpp"
#include "lzc/app/verify.hpp"

using namespace lzc;
using namespace lzc::app;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lzc");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> v;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) v.push_back(f);
  if (!line.empty() && line.back() == ',') v.emplace_back();
  return v;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path;
}

const std::vector<std::string> kPositiveRefFlags = {"--k2", "0.1", "--g1", "1", "--g2", "0.7",
                                              "--b1", "0.9", "--b2", "1"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST(Matrix, PositiveRefColumnZero) {
  const CliRun r = cli(with({"matrix"}, kPositiveRefFlags));
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("case: BothPositive"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("0.425878468087"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("status: ok"), std::string::npos);

  const TransitionMatrix m = compute_matrix(ModelParams(0.1, 1, 0.7, 0.9, 1), false).closed;
  EXPECT_NEAR(m.p[0][0], 0.425879, 1e-6);
  EXPECT_NEAR(m.p[0][1], 0.120189, 1e-6);
  EXPECT_NEAR(m.p[0][2], 0.453933, 1e-6);
}

TEST(Matrix, ZeroCouplingIsIdentity) {
  const CliRun r = cli({"matrix", "--k2", "0.1", "--g1", "0", "--g2", "0", "--b1", "0.9", "--b2", "1"});
  EXPECT_EQ(r.code, kExitOk);
  const MatrixReport rep = compute_matrix(ModelParams(0.1, 0, 0, 0.9, 1), false);
  EXPECT_EQ(rep.closed.p, TransitionMatrix::identity().p);
}

TEST(Matrix, DegenerateSlopesAreUsageErrors) {
  const CliRun r = cli({"matrix", "--k2", "0.1", "--g1", "1", "--g2", "0.7", "--b1", "1", "--b2", "1"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(cli({"matrix", "--k2", "0.1", "--g1", "1", "--g2", "0.7", "--b1", "0", "--b2", "1"}).code,
            kExitUsage);
}

TEST(Matrix, MissingValueIsUsageError) {
  const CliRun r = cli({"matrix", "--k2", "0.1", "--g1", "1", "--g2", "0.7", "--b1", "0.9"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("b2"), std::string::npos);
  EXPECT_EQ(cli({"matrix", "--k2", "abc"}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({}).code, kExitUsage);
}

TEST(Matrix, VerifyMixedRef) {
  const CliRun r = cli({"matrix", "--k2", "0.5", "--g1", "0.5", "--g2", "0.3", "--b1", "-0.15",
                        "--b2", "0.3", "--verify"});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  EXPECT_NE(r.out.find("case: Mixed"), std::string::npos);
  EXPECT_NE(r.out.find("oracle deviation:"), std::string::npos);
}

TEST(Sweep, HeaderAndPrecision) {
  const CliRun r = cli({"sweep", "--var", "k2", "--from", "0", "--to", "1", "--steps", "5",
                        "--g1", "1", "--g2", "0.7", "--b1", "0.9", "--b2", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 6u);
  EXPECT_EQ(ls[0], "x,P00,P01,P02,P10,P11,P12,P20,P21,P22");
  EXPECT_EQ(fields(ls[3])[0], "0.5");
  EXPECT_EQ(fields(ls[5])[0], "1");
  for (std::size_t i = 1; i < ls.size(); ++i) EXPECT_EQ(fields(ls[i]).size(), 10u);
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(0.1), "0.1");
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
  const std::vector<std::string> base = {"sweep", "--var", "g", "--from", "0.05", "--to", "3",
                                         "--steps", "40", "--c1", "1", "--c2", "0.3", "--k2",
                                         "0.1", "--b1", "0.9", "--b2", "1"};
  const CliRun one = cli(with(base, {"--threads", "1"}));
  const CliRun three = cli(with(base, {"--threads", "3"}));
  ASSERT_EQ(one.code, kExitOk);
  EXPECT_EQ(one.out, three.out);
}

TEST(Sweep, OracleColumnsOnDecimatedRows) {
  const CliRun r = cli({"sweep", "--var", "k2", "--from", "0.1", "--to", "1", "--steps", "7",
                        "--g1", "0.6", "--g2", "0.4", "--b1", "0.5", "--b2", "1", "--verify",
                        "--verify-every", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 8u);
  EXPECT_EQ(ls[0], "x,P00,P01,P02,P10,P11,P12,P20,P21,P22,O00,O01,O02,O10,O11,O12,O20,O21,O22,residual");
  for (int i = 0; i < 7; ++i) {
    const auto f = fields(ls[i + 1]);
    ASSERT_EQ(f.size(), 20u) << ls[i + 1];
    if (i % 3 == 0) {
      EXPECT_FALSE(f[19].empty());
      EXPECT_LE(std::stod(f[19]), kOracleThreshold);
    } else {
      EXPECT_TRUE(f[10].empty());
      EXPECT_TRUE(f[19].empty());
    }
  }
}

TEST(Sweep, ConfigFileAndOverride) {
  const auto path = temp_file("lzc_sweep.cfg",
                              "# coupling sweep\n"
                              "var = g\nfrom = 0.1\nto = 2\nsteps = 3\n"
                              "c1 = 1\nc2 = 0.3\nk2 = 0.1\nb1 = 0.9\nb2 = 1\n");
  const CliRun file_only = cli({"sweep", "--config", path.string()});
  ASSERT_EQ(file_only.code, kExitOk) << file_only.err;
  EXPECT_EQ(lines(file_only.out).size(), 4u);
  const CliRun overridden = cli({"sweep", "--config", path.string(), "--steps", "5"});
  ASSERT_EQ(overridden.code, kExitOk);
  EXPECT_EQ(lines(overridden.out).size(), 6u);
  std::filesystem::remove(path);
}

TEST(Sweep, FailedRowsAreMarked) {
  SweepRow bad;
  bad.x = 0.5;
  bad.ok = false;
  bad.error = "boom";
  SweepRow good;
  good.x = 1.0;
  good.closed = TransitionMatrix::identity();
  std::ostringstream plain, verified;
  write_sweep_csv({bad, good}, false, plain);
  write_sweep_csv({bad}, true, verified);
  const auto ls = lines(plain.str());
  EXPECT_EQ(ls[1], "0.5,ERR,ERR,ERR,ERR,ERR,ERR,ERR,ERR,ERR");
  EXPECT_EQ(ls[2], "1,1,0,0,0,1,0,0,0,1");
  EXPECT_EQ(fields(lines(verified.str())[1]).size(), 20u);
}

TEST(Sweep, InvalidSpecs) {
  EXPECT_EQ(cli({"sweep", "--var", "b1", "--from", "0", "--to", "1", "--g1", "1", "--g2", "1",
                 "--b1", "0.9", "--b2", "1"}).code,
            kExitUsage);
  EXPECT_EQ(cli({"sweep", "--var", "k2", "--from", "1", "--to", "0", "--g1", "1", "--g2", "1",
                 "--b1", "0.9", "--b2", "1"}).code,
            kExitUsage);
  EXPECT_EQ(cli({"sweep", "--var", "k2", "--from", "0", "--to", "1", "--steps", "1", "--g1", "1",
                 "--g2", "1", "--b1", "0.9", "--b2", "1"}).code,
            kExitUsage);
}

TEST(Sweep, LargeCouplingTailSaturates) {
  // With p1, p2 -> 0 the first row tends to (kappa, 0, 1) / (1 + kappa).
  SweepSpec spec;
  spec.variable = "g";
  spec.from = 14.0;
  spec.to = 20.0;
  spec.steps = 4;
  spec.c1 = 1.0;
  spec.c2 = 0.3;
  spec.k2 = 0.1;
  spec.b1 = 0.9;
  spec.b2 = 1.0;
  const double kappa = std::exp(-M_PI * 0.1);
  for (const SweepRow& row : run_sweep(spec, false, 1)) {
    ASSERT_TRUE(row.ok) << row.error;
    EXPECT_NEAR(row.closed.p[0][0], kappa / (1 + kappa), 1e-9);
    EXPECT_NEAR(row.closed.p[0][1], 0.0, 1e-9);
    EXPECT_NEAR(row.closed.p[0][2], 1 / (1 + kappa), 1e-9);
    for (int j = 0; j < 3; ++j) EXPECT_GT(row.closed.p[0][j], -1e-12);
  }
  EXPECT_GT(kappa / (1 + kappa), 0.0);
  EXPECT_LT(kappa / (1 + kappa), 1.0);
}

TEST(Sweep, LocalMaximaCounter) {
  EXPECT_EQ(count_local_maxima({}), 0);
  EXPECT_EQ(count_local_maxima({0, 1, 0}), 1);
  EXPECT_EQ(count_local_maxima({0, 1, 2, 1, 0, 1, 2, 1, 0}), 2);
  std::vector<double> y;
  for (int i = 0; i < 200; ++i) y.push_back(std::sin(0.1 * i));
  EXPECT_EQ(count_local_maxima(y), 3);
  EXPECT_EQ(count_local_maxima({1, 1, 1, 1}), 0);
}

TEST(Spectrum, ZeroCouplingIsSortedDiagonal) {
  const ModelParams p(0.5, 0.0, 0.0, -0.3, 0.7);
  for (const SpectrumRow& r : run_spectrum(p, 0.2, 4.0, 30)) {
    std::array<double, 3> d = {0.5 / r.tau, -0.3 * r.tau, 0.7 * r.tau};
    std::sort(d.begin(), d.end());
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(r.energies[k], d[k], 1e-12 * (1 + std::abs(d[k])));
  }
}

TEST(Spectrum, TraceAndAvoidedCrossings) {
  const ModelParams p(0.5, 0.5, 0.3, -0.15, 0.3);
  double min_gap = 1e300;
  for (const SpectrumRow& r : run_spectrum(p, 0.05, 10.0, 400)) {
    const double trace = 0.5 / r.tau + 0.15 * r.tau;
    const double sum = r.energies[0] + r.energies[1] + r.energies[2];
    EXPECT_LE(std::abs(sum - trace), 1e-12 * std::max(1.0, std::abs(trace)));
    EXPECT_LE(r.energies[0], r.energies[1]);
    EXPECT_LE(r.energies[1], r.energies[2]);
    min_gap = std::min({min_gap, r.energies[1] - r.energies[0], r.energies[2] - r.energies[1]});
  }
  EXPECT_GT(min_gap, 1e-3);
}

TEST(Spectrum, Cli) {
  const CliRun r = cli({"spectrum", "--k2", "0.5", "--g1", "0.5", "--g2", "0.3", "--b1", "-0.15",
                        "--b2", "0.3", "--from", "0.1", "--to", "5", "--steps", "11"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 12u);
  EXPECT_EQ(ls[0], "tau,E0,E1,E2");
  EXPECT_EQ(cli({"spectrum", "--k2", "0.5", "--g1", "0.5", "--g2", "0.3", "--b1", "-0.15", "--b2",
                 "0.3", "--from", "0", "--to", "5"}).code,
            kExitUsage);
  EXPECT_EQ(cli({"spectrum", "--k2", "0.5", "--g1", "0.5", "--g2", "0.3", "--b1", "-0.15", "--b2",
                 "0.3", "--from", "-1", "--to", "5"}).code,
            kExitUsage);
}

TEST(Verify, ZeroTrialsIsUsageError) {
  EXPECT_EQ(cli({"verify", "--trials", "0"}).code, kExitUsage);
  EXPECT_THROW(run_verify(7, 0, 1), UsageError);
}

TEST(Verify, SmallRunIsByteIdentical) {
  const CliRun a = cli({"verify", "--seed", "7", "--trials", "6", "--threads", "1"});
  const CliRun b = cli({"verify", "--seed", "7", "--trials", "6", "--threads", "2"});
  ASSERT_EQ(a.code, kExitOk) << a.out;
  EXPECT_EQ(a.out, b.out);
  const nlohmann::json j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["trials"], 6);
  EXPECT_EQ(j["properties"].size(), 8u);
  EXPECT_TRUE(j["failures"].empty());
  for (const auto& p : j["properties"]) {
    EXPECT_TRUE(p["pass"].get<bool>()) << p.dump();
    EXPECT_LE(p["max_residual"].get<double>(), p["threshold"].get<double>());
  }
}

TEST(Verify, SamplerRanges) {
  int counts[3] = {0, 0, 0};
  for (const ModelParams& p : sample_parameter_sets(11, 300)) {
    EXPECT_GE(p.k2(), 0.0);
    EXPECT_LE(p.k2(), 2.0);
    for (int i : {1, 2}) {
      EXPECT_GT(p.caller_g(i), 0.0);
      EXPECT_LE(p.caller_g(i), 1.5);
      EXPECT_GE(std::abs(p.caller_beta(i)), 0.1);
      EXPECT_LE(std::abs(p.caller_beta(i)), 1.0);
    }
    EXPECT_GE(std::abs(p.caller_beta(1) - p.caller_beta(2)), 0.05);
    ++counts[static_cast<int>(classify(p))];
  }
  for (int c : counts) EXPECT_EQ(c, 100);
  for (const ModelParams& p : sample_case1_sets(3, 50)) EXPECT_EQ(classify(p), SlopeCase::BothPositive);
  EXPECT_EQ(sample_parameter_sets(7, 5)[4].describe(), sample_parameter_sets(7, 9)[4].describe());
}

TEST(Config, Parsing) {
  std::istringstream ok("# comment\n\nk2 = 0.1\n  g1=1 \nvar = g\n");
  const auto v = parse_config(ok);
  EXPECT_EQ(v.at("k2"), "0.1");
  EXPECT_EQ(v.at("g1"), "1");
  EXPECT_EQ(v.at("var"), "g");
  std::istringstream unknown("gamma = 3\n");
  EXPECT_THROW(parse_config(unknown), UsageError);
  std::istringstream malformed("k2 0.1\n");
  EXPECT_THROW(parse_config(malformed), UsageError);
  std::istringstream empty("k2 =\n");
  EXPECT_THROW(parse_config(empty), UsageError);
  EXPECT_THROW(load_config("/nonexistent/lzc.cfg"), UsageError);
  EXPECT_THROW(to_double("k2", "1.0x"), UsageError);
  EXPECT_THROW(to_long("steps", "2.5"), UsageError);
  EXPECT_EQ(to_long("steps", "12"), 12);
}

TEST(Config, BadFileGivesUsageExit) {
  const auto path = temp_file("lzc_bad.cfg", "k2 = 0.1\nbogus = 1\n");
  EXPECT_EQ(cli({"matrix", "--config", path.string()}).code, kExitUsage);
  std::filesystem::remove(path);
}
