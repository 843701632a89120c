#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifndef MENDEL_CLI_PATH
#define MENDEL_CLI_PATH "mendel"
#endif

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(MENDEL_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        out.append(buf.data(), got);
    int status = pclose(pipe);
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, out};
}

}  // namespace

TEST_CASE("usage errors exit with code 2", "[cli]") {
    CHECK(run_cli("no-such-command").exit_code == 2);
    CHECK(run_cli("mc --model frobnicate").exit_code == 2);
    CHECK(run_cli("mc --reps 0").exit_code == 2);
    CHECK(run_cli("table5 --bogus-flag").exit_code == 2);
    CHECK(run_cli("exact-dist").exit_code == 2);
}

TEST_CASE("every output starts with a manifest comment", "[cli]") {
    for (const char* sub :
         {"table5", "dataset", "ecdf", "ks", "approx --alpha 0.2",
          "model-cdf --model a --grid 10", "exact-dist --experiment 9"}) {
        RunResult r = run_cli(sub);
        REQUIRE(r.exit_code == 0);
        REQUIRE(r.output.size() > 2);
        CHECK(r.output.substr(0, 2) == "# ");
        CHECK(r.output.find("\"subcommand\"") != std::string::npos);
        CHECK(r.output.find("\"output_digest\"") != std::string::npos);
        CHECK(r.output.find("\"artifact_version\"") != std::string::npos);
    }
}

TEST_CASE("table output shape", "[cli]") {
    RunResult r = run_cli("table5");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("group,df,chisq_fisher") != std::string::npos);
    CHECK(r.output.find("2.1389") != std::string::npos);
    CHECK(r.output.find("41.3376") != std::string::npos);
    CHECK(r.output.find("Tot84") != std::string::npos);

    RunResult ks = run_cli("ks");
    CHECK(ks.output.find("\"d\"") != std::string::npos);
    CHECK(ks.output.find("\"jitter_seed\"") != std::string::npos);

    RunResult ds = run_cli("dataset");
    CHECK(ds.output.find("id,group,trait,n,n1,p0_num,p0_den") != std::string::npos);
    CHECK(ds.output.find("1,Ratio3to1,A,7324,5474,3,4") != std::string::npos);
}

TEST_CASE("byte-identical reruns and thread independence", "[cli]") {
    std::string base = "mc --model a --alpha 0.201 --reps 5000 --seed 99";
    RunResult r1 = run_cli(base + " --threads 1");
    RunResult r2 = run_cli(base + " --threads 4");
    RunResult r3 = run_cli(base + " --threads 13");
    REQUIRE(r1.exit_code == 0);
    CHECK(r1.output == r2.output);
    CHECK(r1.output == r3.output);

    RunResult other_seed = run_cli(base + " --threads 2 --seed 100");
    (void)other_seed;
    CHECK(run_cli(base).output == r1.output);
}

TEST_CASE("estimate subcommand output", "[cli]") {
    RunResult r = run_cli("estimate --family a");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("\"param_hat\": 0.201") != std::string::npos);
    CHECK(r.output.find("\"ci\"") != std::string::npos);
}
