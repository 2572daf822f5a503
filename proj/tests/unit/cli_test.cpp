#include "fixtures.hpp"
#include "harness.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <regex>

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int exitCode;
  std::string out;
};

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + quote(DEEPLINKER_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    fs::create_directories(state / "cache");
    for (const auto& e : fs::directory_iterator(testsupport::fixtureCache())) {
      fs::copy_file(e.path(), state / "cache" / e.path().filename());
    }
  }
  std::string common() const {
    return "--root " + quote(testsupport::fixtureTree().string()) + " --state-dir " + quote(state.path().string()) +
           " --cache-dir " + quote((state / "cache").string());
  }
  testsupport::TempDir state;
};

}  // namespace

TEST_F(CliTest, MissingRootIsUsageError) {
  EXPECT_EQ(run("").exitCode, 2);
  EXPECT_EQ(run("--port 70000 --root /tmp").exitCode, 2);
  EXPECT_EQ(run("--bogus").exitCode, 2);
}

TEST_F(CliTest, HelpAndVersion) {
  const auto help = run("--help");
  EXPECT_EQ(help.exitCode, 0);
  EXPECT_NE(help.out.find("--root"), std::string::npos);
  const auto version = run("--version");
  EXPECT_EQ(version.exitCode, 0);
  EXPECT_NE(version.out.find("deeplinker"), std::string::npos);
}

TEST_F(CliTest, NonexistentRootFails) {
  EXPECT_EQ(run("--root /definitely/not/here --state-dir " + quote(state.path().string()) + " --resolve /filesystem").exitCode, 1);
}

TEST_F(CliTest, ResolvePrintsRepresentation) {
  const auto html = run(common() + " --resolve " + quote(testsupport::kLineLink));
  EXPECT_EQ(html.exitCode, 0);
  EXPECT_NE(html.out.find("class=\"highlight\">line three<"), std::string::npos);
  const auto json = run(common() + " --accept application/json --resolve " + quote(testsupport::kDownloadLink));
  EXPECT_EQ(json.exitCode, 0);
  EXPECT_NE(json.out.find("Participate"), std::string::npos);
  EXPECT_EQ(run(common() + " --resolve /filesystem/missing").exitCode, 1);
  EXPECT_TRUE(fs::exists(state / "uploads"));
}

TEST_F(CliTest, EnvironmentVariables) {
  const auto res = run("--accept application/json --resolve /filesystem/c.txt/property@name",
                       "DEEPLINKER_ROOT=" + quote(testsupport::fixtureTree().string()) +
                           " DEEPLINKER_STATE_DIR=" + quote(state.path().string()));
  EXPECT_EQ(res.exitCode, 0);
  EXPECT_NE(res.out.find("\"text\": \"c.txt\""), std::string::npos);
}

TEST_F(CliTest, ServesUntilTerminated) {
  int fds[2];
  ASSERT_EQ(::pipe(fds), 0);
  const std::string root = testsupport::fixtureTree().string();
  const std::string stateDir = state.path().string();
  const pid_t pid = ::fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    ::dup2(fds[1], STDOUT_FILENO);
    ::close(fds[0]);
    ::execl(DEEPLINKER_BIN, DEEPLINKER_BIN, "--root", root.c_str(), "--state-dir", stateDir.c_str(), "--port", "0",
            static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(fds[1]);
  std::string line;
  char c;
  while (::read(fds[0], &c, 1) == 1 && c != '\n') line += c;
  ::close(fds[0]);
  std::smatch m;
  ASSERT_TRUE(std::regex_search(line, m, std::regex(R"(:(\d+)/$)"))) << line;
  httplib::Client client("127.0.0.1", std::stoi(m[1]));
  const auto res = client.Get("/filesystem/c.txt/content/to@string/line@2");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  ::kill(pid, SIGTERM);
  int status = 0;
  ::waitpid(pid, &status, 0);
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
}
