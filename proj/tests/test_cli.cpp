// End-to-end checks of the command-line binary: exit codes and the printed
// oracle report.

#include "helpers.hpp"

#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

std::string cli_binary() {
#ifdef ANC_CLI_BIN
    return ANC_CLI_BIN;
#else
    return "ancsim";
#endif
}

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

CommandResult run_command(const std::string& args) {
    const std::string cmd = cli_binary() + " " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CommandResult res;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe)) res.output += buf.data();
    const int status = ::pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

} // namespace

TEST_CASE("validate accepts the shipped scenarios") {
    for (const char* name : {"sec5a.scenario", "sec5b.scenario", "identity.scenario",
                             "silent.scenario"}) {
        const auto res = run_command("validate " + testutil::testdata_dir() + "/" + name);
        CHECK(res.exit_code == 0);
    }
}

TEST_CASE("scenario errors exit with code 1") {
    const auto res = run_command("validate /nonexistent.scenario");
    CHECK(res.exit_code == 1);

    testutil::TempDir dir("cli");
    const auto res2 = run_command("run /nonexistent.scenario -o " + dir.file("out"));
    CHECK(res2.exit_code == 1);

    const auto res3 = run_command("run " + testutil::testdata_dir() +
                                  "/sec5a.scenario --set bogus.key=1 -o " + dir.file("out2"));
    CHECK(res3.exit_code == 1);
}

TEST_CASE("divergence exits with code 2") {
    testutil::TempDir dir("cli");
    const auto res = run_command("run " + testutil::testdata_dir() +
                                 "/identity.scenario --set algorithm.mu=1000 --set "
                                 "scenario.duration_s=1 -o " +
                                 dir.file("out"));
    CHECK(res.exit_code == 2);
}

TEST_CASE("run writes the requested artifacts") {
    testutil::TempDir dir("cli");
    const auto res = run_command("run " + testutil::testdata_dir() +
                                 "/silent.scenario -o " + dir.file("out"));
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("trace.csv") != std::string::npos);
    CHECK(res.output.find("summary.json") != std::string::npos);

    const auto res2 = run_command("run " + testutil::testdata_dir() +
                                  "/silent.scenario --format json-summary -o " + dir.file("js"));
    CHECK(res2.exit_code == 0);
    CHECK(res2.output.find("trace.csv") == std::string::npos);
}

TEST_CASE("the oracle command prints both constrained optima") {
    const auto res = run_command("oracle " + testutil::testdata_dir() + "/sec5a.scenario");
    REQUIRE(res.exit_code == 0);

    // stage-0 constrained filter ~ [1.53, 0.39], stage-1 ~ [1.16, 0.30]
    auto grab = [&](const std::string& anchor, std::size_t from) {
        const auto pos = res.output.find(anchor, from);
        REQUIRE(pos != std::string::npos);
        const auto bracket = res.output.find('[', pos);
        double a = 0.0, b = 0.0;
        std::sscanf(res.output.c_str() + bracket, "[%lf, %lf]", &a, &b);
        return std::pair{a, b};
    };
    const auto [w1a, w1b] = grab("constrained w_o", 0);
    CHECK(w1a == doctest::Approx(1.52).epsilon(0.04));
    CHECK(w1b == doctest::Approx(0.38).epsilon(0.06));

    const auto stage1 = res.output.find("stage 1");
    const auto [w2a, w2b] = grab("constrained w_o", stage1);
    CHECK(w2a == doctest::Approx(1.14).epsilon(0.04));
    CHECK(w2b == doctest::Approx(0.29).epsilon(0.06));
}

TEST_CASE("suite runs a directory and keeps going past failures") {
    testutil::TempDir dir("cli");
    std::filesystem::create_directories(dir.file("suite"));
    std::filesystem::copy_file(testutil::testdata_dir() + "/silent.scenario",
                               dir.file("suite/a.scenario"));
    std::filesystem::copy_file(testutil::testdata_dir() + "/identity.scenario",
                               dir.file("suite/b.scenario"));
    {
        std::ofstream bad(dir.file("suite/c.scenario"));
        bad << "[scenario]\nfs_hz = -1\n";
    }
    const auto res = run_command("suite " + dir.file("suite") + " -j 2 -o " + dir.file("out"));
    CHECK(res.exit_code == 1); // the broken scenario dominates
    CHECK(std::filesystem::exists(dir.file("out/a/summary.json")));
    CHECK(std::filesystem::exists(dir.file("out/b/summary.json")));
}
