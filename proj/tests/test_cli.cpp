#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lrex/cli/config.hpp"
#include "lrex/cli/runner.hpp"
#include "lrex/error.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>

using namespace lrex;
namespace fs = std::filesystem;

namespace {

template <class F>
const Error& caught(F&& f) {
    static thread_local Error last(ErrorCode::IoError, "none");
    try {
        f();
    } catch (const Error& e) {
        last = e;
        return last;
    }
    FAIL("expected lrex::Error");
    return last;
}

bool contains(const std::string& s, const std::string& sub) { return s.find(sub) != std::string::npos; }

// Fresh directory under the build tree's temp space, removed on scope exit.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("lrex_test_cli_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

const char* kSimulate =
    "mode = simulate\n"
    "[run]\nseed = 7\nn_replicas = 8\n"
    "[kernel]\nalpha = 1.5\ntrunc_radius = 6\n"
    "[lattice]\nL = 16\nrho = 0.5\n"
    "[grid]\nt = 0.5,1,2\n";

}  // namespace

TEST_CASE("minimal config fills every other key with its default") {
    const auto c = parse_config("mode = quadrature\nalpha = 1.25\ndim = 2\n");
    CHECK(c.mode == Mode::Quadrature);
    CHECK(c.alpha == 1.25);
    CHECK(c.dim == 2);
    CHECK(c.L == 64);
    CHECK(c.rho == 0.5);
    CHECK(!c.seed);
    const auto keys = config_keys();
    CHECK(c.defaulted.size() == keys.size() - 3);
    CHECK(std::find(c.defaulted.begin(), c.defaulted.end(), "kernel.alpha") == c.defaulted.end());
    CHECK(std::find(c.defaulted.begin(), c.defaulted.end(), "lattice.L") != c.defaulted.end());
    const std::string m = manifest_text(c, "2000-01-01T00:00:00Z");
    for (const auto& k : keys) {
        const auto dot = k.find('.');
        if (k == "run.seed") continue;
        CHECK_MESSAGE(contains(m, "\n" + k.substr(dot + 1) + "="), k);
    }
    CHECK(contains(m, "# seed unset"));
    CHECK(contains(m, "[manifest]"));
    CHECK(contains(m, code_version()));
}

TEST_CASE("unknown and malformed input") {
    const auto& typo = caught([] { parse_config("mode = quadrature\nalpah = 1.5\n"); });
    CHECK(typo.code() == ErrorCode::ValidationError);
    CHECK(contains(typo.what(), "alpah"));

    const auto& bad = caught([] { parse_config("mode = quadrature\n\n[kernel]\nalpha 1.5\n"); });
    CHECK(bad.code() == ErrorCode::ParseError);
    CHECK(contains(bad.what(), "line 4"));

    CHECK(caught([] { parse_config("[kernel\n"); }).code() == ErrorCode::ParseError);
    CHECK(caught([] { parse_config("alpha = abc\n"); }).code() == ErrorCode::ValidationError);
    CHECK(caught([] { parse_config("alpha = 1.5\nalpha = 1.5\n"); }).code() == ErrorCode::ValidationError);
    CHECK(caught([] { parse_config("mode = sideways\n"); }).code() == ErrorCode::ValidationError);
    CHECK(caught([] { parse_config("", {{"kernel.alhpa", "1"}}); }).code() == ErrorCode::ValidationError);
}

TEST_CASE("stochastic modes require a seed and enough replicas") {
    const auto& e = caught([] { parse_config("mode = simulate\n"); });
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(contains(e.what(), "run.seed"));
    CHECK(caught([] { parse_config("mode = secondclass\n"); }).code() == ErrorCode::ValidationError);
    CHECK_NOTHROW(parse_config("mode = exact\nL = 8\n"));

    const auto& r = caught([] { parse_config("mode = simulate\nseed = 1\nn_replicas = 0\n"); });
    CHECK(r.code() == ErrorCode::ValidationError);
    CHECK(contains(r.what(), "run.n_replicas"));
}

TEST_CASE("keys: qualified, bare in section, unique bare at top level") {
    const auto a = parse_config("kernel.alpha = 0.75\n[lattice]\nrho = 0.25\n");
    CHECK(a.alpha == 0.75);
    CHECK(a.rho == 0.25);
    // '#' starts a comment anywhere on the line.
    const auto b = parse_config("# header\nL = 32 # ring\n");
    CHECK(b.L == 32);
    // [manifest] carries provenance only and is skipped.
    const auto c = parse_config("alpha = 1.5\n[manifest]\nanything = goes\n");
    CHECK(c.alpha == 1.5);
    CHECK(parse_config("t = logspace(0,2,3)\n").t == std::vector<double>{1.0, 10.0, 100.0});
    CHECK(parse_config("t = linspace(1,2,3)\n").t == std::vector<double>{1.0, 1.5, 2.0});
    CHECK(parse_mode("verify-all") == Mode::VerifyAll);
    CHECK(parse_mode("verify_all") == Mode::VerifyAll);
}

TEST_CASE("overrides win over the text") {
    const auto c = parse_config("seed = 3\nalpha = 1.5\n", {{"run.seed", "11"}, {"alpha", "2"}});
    CHECK(*c.seed == 11);
    CHECK(c.alpha == 2.0);
}

TEST_CASE("manifest round trip reproduces the config") {
    const auto c = parse_config(kSimulate);
    const auto back = parse_config(manifest_text(c, "2000-01-01T00:00:00Z"));
    CHECK(resolved_config_text(back) == resolved_config_text(c));
    CHECK(*back.seed == 7);
}

TEST_CASE("exit codes are distinct per module") {
    CHECK(exit_code_for(ErrorCode::ParseError) == kExitConfig);
    CHECK(exit_code_for(ErrorCode::ValidationError) == kExitConfig);
    CHECK(exit_code_for(ErrorCode::BadAlpha) == kExitKernel);
    CHECK(exit_code_for(ErrorCode::TailNotConverged) == kExitKernel);
    CHECK(exit_code_for(ErrorCode::NoParticle) == kExitSim);
    CHECK(exit_code_for(ErrorCode::StateSpaceTooLarge) == kExitOracle);
    CHECK(exit_code_for(ErrorCode::QuadratureFail) == kExitSpectral);
    CHECK(exit_code_for(ErrorCode::InsufficientPoints) == kExitAnalysis);
    CHECK(exit_code_for(ErrorCode::IoError) == kExitIo);
    for (int i = 0; i <= static_cast<int>(ErrorCode::IoError); ++i) {
        const int code = exit_code_for(static_cast<ErrorCode>(i));
        CHECK(code >= kExitConfig);
        CHECK(code < kExitInternal);
    }
}

TEST_CASE("atomic write, read back and CSV columns") {
    TempDir d("io");
    const fs::path p = d.path / "a.csv";
    write_atomic(p, "x,y\n1,2\n3,4\n");
    write_atomic(p, "x,y\n1,5\n3,6\n");
    const std::string s = read_file(p);
    CHECK(csv_column(s, "y") == std::vector<double>{5.0, 6.0});
    CHECK(caught([&] { csv_column(s, "z"); }).code() == ErrorCode::ParseError);
    CHECK(caught([] { csv_column("", "x"); }).code() == ErrorCode::ParseError);
    CHECK(caught([&] { read_file(d.path / "missing"); }).code() == ErrorCode::IoError);
    for (const auto& e : fs::directory_iterator(d.path)) CHECK(e.path().filename() == "a.csv");
}

TEST_CASE("quadrature CSV column schema") {
    TempDir d("quad");
    auto c = parse_config("mode = quadrature\nalpha = 1.5\nt = 1,2\n", {{"run.out", d.path.string()}});
    std::ostringstream log;
    const auto r = run(c, log);
    CHECK(r.exit_code == kExitOk);
    const std::string csv = read_file(d.path / "results.csv");
    CHECK(csv.rfind("target,dim,alpha,rho,t_or_lambda,value,err_est,regime_tag\n", 0) == 0);
    CHECK(csv_column(csv, "t_or_lambda") == std::vector<double>{1.0, 2.0});
    CHECK(fs::exists(d.path / "manifest.txt"));
    CHECK(contains(log.str(), "default lattice.L"));
}

TEST_CASE("reruns of a manifest are byte identical") {
    TempDir a("run_a"), b("run_b");
    std::ostringstream log;
    run(parse_config(kSimulate, {{"run.out", a.path.string()}}), log);
    // Rerun from the written manifest, redirected to a second directory.
    const std::string manifest = read_file(a.path / "manifest.txt");
    run(parse_config(manifest, {{"run.out", b.path.string()}}), log);
    for (const char* f : {"stats.csv", "event_log.csv"}) {
        const std::string x = read_file(a.path / f), y = read_file(b.path / f);
        CHECK_MESSAGE(x == y, f);
        CHECK(!x.empty());
    }
    // A different seed changes the stochastic output.
    TempDir c("run_c");
    run(parse_config(kSimulate, {{"run.out", c.path.string()}, {"run.seed", "8"}}), log);
    CHECK(read_file(a.path / "stats.csv") != read_file(c.path / "stats.csv"));
}

TEST_CASE("module errors propagate with their codes") {
    TempDir d("err");
    const auto c = parse_config("mode = exact\nL = 13\n", {{"run.out", d.path.string()}});
    std::ostringstream log;
    const auto& e = caught([&] { run(c, log); });
    CHECK(exit_code_for(e.code()) == kExitOracle);
}
