#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string("\"") + HOP_CLI_PATH + "\" " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t k;
  while ((k = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, k);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Cli, NormsCsv) {
  auto r = run("--study norms --model 'N|Z'");
  ASSERT_EQ(r.code, 0);
  auto l = lines(r.out);
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0].rfind("# hop-toolkit 1.0.0 spec=", 0), 0u);
  EXPECT_EQ(l[1], "model,comb_norm,fiber_norm,gap,hidden");
  EXPECT_EQ(l[2].rfind("NComb(1),2.828427124746", 0), 0u);
}

TEST(Cli, JsonKeys) {
  auto r = run("--study rho-c --model Z3 --format json");
  ASSERT_EQ(r.code, 0);
  for (const char* key : {"\"toolkit\"", "\"spec\"", "\"study\"", "\"columns\"", "\"rows\"", "\"rho_c\""})
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
}

TEST(Cli, Deterministic) {
  const std::string args = "--study ids-shift --model 'Z|Z' --n 20,40";
  auto a = run(args + " --workers 1"), b = run(args + " --workers 2");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, OutputFile) {
  auto path = std::filesystem::temp_directory_path() / "hop_cli_test_out.csv";
  std::filesystem::remove(path);
  auto r = run("--study rho-c --model 'Z|Z' --out '" + path.string() + "'");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_NE(ss.str().find("0.19671274"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, ConfigFile) {
  auto path = std::filesystem::temp_directory_path() / "hop_cli_test.cfg";
  {
    std::ofstream f(path);
    f << "study=norms\nmodel=Z2|Z\n";
  }
  auto a = run("--config '" + path.string() + "'");
  ASSERT_EQ(a.code, 0);
  EXPECT_NE(a.out.find("ZComb(2),4.472135954999"), std::string::npos);
  auto b = run("--config '" + path.string() + "' --model 'Z|Z'");
  EXPECT_NE(b.out.find("ZComb(1)"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, InvalidSpecExitsTwo) {
  EXPECT_EQ(run("--study norms").code, 2);
  EXPECT_EQ(run("--study nope").code, 2);
  EXPECT_EQ(run("--study norms --model Q").code, 2);
  EXPECT_EQ(run("--study norms --model Z --beta -1").code, 2);
  EXPECT_EQ(run("--study fixed-density --model 'N|Z3'").code, 2);
  EXPECT_EQ(run("--study fixed-density --model 'N|Z' --rho 0.01").code, 2);
  EXPECT_EQ(run("--bogus").code, 2);
  EXPECT_EQ(run("--study dims --model N --n 1,2,x").code, 2);
}

TEST(Cli, IoFailureExitsOne) {
  EXPECT_EQ(run("--study norms --model Z --out /nonexistent-dir/x.csv").code, 1);
}

TEST(Cli, ListModels) {
  auto r = run("--list-models");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("NComb(d)"), std::string::npos);
}
