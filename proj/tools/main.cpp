#include "lrex/cli/config.hpp"
#include "lrex/cli/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

// Pinned seed of the default verify-all profile.
constexpr const char* kDeskSeed = "20240611";

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Long-range exclusion occupation-time toolkit"};
    app.require_subcommand(1);
    std::string config_path, out_dir, seed;
    int threads = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key=value config file");
        sub->add_option("--out", out_dir, "output directory (overrides run.out)");
        sub->add_option("--threads", threads, "worker threads (overrides run.threads)");
        sub->add_option("--seed", seed, "seed (overrides run.seed)");
    };
    const std::vector<std::pair<std::string, std::string>> modes = {
        {"simulate", "Monte Carlo occupation-time statistics"},
        {"exact", "exact generator oracle on a small ring"},
        {"quadrature", "Fourier quadrature targets"},
        {"fit", "log-log exponent fit of a CSV column"},
        {"secondclass", "covariance identity through the second-class coupling"},
        {"verify-all", "acceptance suite"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, help] : modes) {
        subs.push_back(app.add_subcommand(name, help));
        add_common(subs.back());
    }
    CLI11_PARSE(app, argc, argv);

    std::string mode;
    for (auto* s : subs)
        if (s->parsed()) mode = s->get_name();
    try {
        const std::string text = config_path.empty() ? std::string() : lrex::read_file(config_path);
        lrex::Overrides ov{{"run.mode", mode}};
        if (!out_dir.empty()) ov.emplace_back("run.out", out_dir);
        if (threads > 0) ov.emplace_back("run.threads", std::to_string(threads));
        if (!seed.empty())
            ov.emplace_back("run.seed", seed);
        else if (mode == "verify-all" && text.find("seed") == std::string::npos)
            ov.emplace_back("run.seed", kDeskSeed);
        const lrex::ExperimentConfig cfg = lrex::parse_config(text, ov);
        const lrex::RunResult r = lrex::run(cfg, std::cerr);
        for (const auto& f : r.files) std::cout << f.string() << "\n";
        return r.exit_code;
    } catch (const lrex::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return lrex::exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return lrex::kExitInternal;
    }
}
