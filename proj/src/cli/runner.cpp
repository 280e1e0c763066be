#include "lrex/cli/runner.hpp"

#include "lrex/analysis/fit.hpp"
#include "lrex/oracle/exact.hpp"
#include "lrex/sim/occupation.hpp"
#include "lrex/spectral/lower_bound.hpp"
#include "lrex/spectral/spectral.hpp"
#include "lrex/verify/acceptance.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

namespace lrex {

int exit_code_for(ErrorCode c) {
    switch (c) {
        case ErrorCode::ParseError:
        case ErrorCode::ValidationError: return kExitConfig;
        case ErrorCode::BadAlpha:
        case ErrorCode::BadWeights:
        case ErrorCode::BadVariant:
        case ErrorCode::NonIrreducible:
        case ErrorCode::TruncationTooSmall:
        case ErrorCode::TailNotConverged: return kExitKernel;
        case ErrorCode::BadSize:
        case ErrorCode::BadDensity:
        case ErrorCode::NoParticle:
        case ErrorCode::TooFewReplicas: return kExitSim;
        case ErrorCode::StateSpaceTooLarge:
        case ErrorCode::SingularSolve:
        case ErrorCode::NotSymmetric: return kExitOracle;
        case ErrorCode::BadInterval:
        case ErrorCode::QuadratureFail:
        case ErrorCode::InnerGridTooCoarse:
        case ErrorCode::BoundViolated: return kExitSpectral;
        case ErrorCode::InsufficientPoints:
        case ErrorCode::NonPositiveData:
        case ErrorCode::IllConditioned:
        case ErrorCode::GridMismatch: return kExitAnalysis;
        case ErrorCode::IoError: return kExitIo;
    }
    return kExitInternal;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::IoError, "cannot open " + tmp.string());
        f << content;
        if (!f.flush()) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoError, "rename to " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<double> csv_column(const std::string& csv, const std::string& name) {
    std::istringstream in(csv);
    std::string header;
    if (!std::getline(in, header)) throw Error(ErrorCode::ParseError, "empty CSV");
    auto cells = [](const std::string& line) {
        std::vector<std::string> out;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) out.push_back(c);
        return out;
    };
    const auto names = cells(header);
    std::size_t col = names.size();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) col = i;
    if (col == names.size()) throw Error(ErrorCode::ParseError, "CSV has no column '" + name + "'");
    std::vector<double> out;
    int line_no = 1;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (line.empty()) continue;
        const auto row = cells(line);
        if (row.size() <= col) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": short row");
        char* end = nullptr;
        const double v = std::strtod(row[col].c_str(), &end);
        if (end == row[col].c_str()) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": not a number");
        out.push_back(v);
    }
    return out;
}

namespace {

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

JumpKernel kernel_of(const ExperimentConfig& c) {
    KernelOptions o;
    o.asym_radius = c.asym_radius;
    o.fr_radius = c.fr_radius;
    return build_kernel(c.dim, c.alpha, c.b_plus, c.b_minus, c.variant, c.trunc_radius, o);
}

FunctionalSpec functional_of(const ExperimentConfig& c) {
    return FunctionalSpec{c.kind, c.x0, c.x1, c.rho};
}

SpectralJob job_of(const ExperimentConfig& c) {
    SpectralJob j;
    j.dim = c.dim;
    j.alpha = c.alpha;
    j.rho = c.rho;
    j.target = c.target;
    j.delta = c.delta;
    j.u = c.u;
    j.abs_tol = c.abs_tol;
    j.rel_tol = c.rel_tol;
    j.singular_pad = c.singular_pad;
    j.order = c.order;
    j.r_kind = c.r_kind;
    j.b_bar = {c.b_bar[0], c.b_bar[1]};
    j.variant = c.variant;
    j.b_plus = c.b_plus;
    j.b_minus = c.b_minus;
    j.trunc_radius = c.trunc_radius;
    j.outer_grid = c.outer_grid;
    return j;
}

struct Out {
    std::filesystem::path dir;
    RunResult& res;
    void write(const std::string& name, const std::string& content) {
        write_atomic(dir / name, content);
        res.files.push_back(dir / name);
    }
};

void run_quadrature(const ExperimentConfig& c, Out& out) {
    SpectralJob j = job_of(c);
    std::vector<SpectralResult> rows;
    switch (c.target) {
        case Target::VarianceT: rows = variance_sym_curve(j, c.t); break;
        case Target::IdAlphaT: rows = id_alpha_t_curve(j, c.t); break;
        case Target::LaplaceLambda: rows = laplace_sym_curve(j, c.lambda); break;
        case Target::ILowerBound: rows = i_lower_bound_curve(j, c.lambda); break;
        case Target::GreenUt:
            for (double t : c.t) {
                j.t = t;
                rows.push_back(green_ut(j, {c.site[0], c.site[1]}));
            }
            break;
        case Target::JAlphaBound: {
            std::string extra = "lambda,value,bound\n";
            char buf[128];
            for (double l : c.lambda) {
                j.lambda = l;
                rows.push_back(j_alpha_bound(j));
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", l, rows.back().value, rows.back().bound);
                extra += buf;
            }
            out.write("j_alpha_bound.csv", extra);
            break;
        }
    }
    out.write("results.csv", results_csv(j, rows));
}

void run_fit(const ExperimentConfig& c, Out& out) {
    const std::string csv = read_file(c.input);
    const auto x = csv_column(csv, c.x_column), y = csv_column(csv, c.y_column);
    const std::vector<double> err = c.err_column.empty() ? std::vector<double>{} : csv_column(csv, c.err_column);
    FitOptions o;
    o.correction = c.correction;
    o.auto_window = c.auto_window;
    o.x_lo = c.x_lo;
    if (c.x_hi > 0.0) o.x_hi = c.x_hi;
    FitReportRow row;
    row.quantity = c.quantity;
    row.alpha = c.alpha;
    row.dim = c.dim;
    row.rho = c.rho;
    row.fit = fit_exponent(x, y, err, o);
    row.target_beta = c.target_beta;
    row.tolerance = c.tolerance;
    out.write("fit_report.csv", fit_report_csv({row}));
}

}  // namespace

RunResult run(const ExperimentConfig& c, std::ostream& log) {
    validate(c);
    RunResult res;
    Out out{c.out, res};
    for (const auto& k : c.defaulted) log << "default " << k << "\n";
    out.write("manifest.txt", manifest_text(c, utc_now()));

    switch (c.mode) {
        case Mode::Simulate: {
            OccupationOptions o;
            o.threads = c.threads;
            std::vector<EventRecord> events;
            o.event_log = &events;
            const ReplicaStats st = run_occupation(kernel_of(c), c.L, c.rho, c.t, c.n_replicas, functional_of(c), *c.seed, o);
            for (const auto& w : st.warnings) log << "warning: " << w << "\n";
            out.write("stats.csv", stats_csv(st));
            out.write("event_log.csv", event_log_csv(events));
            break;
        }
        case Mode::Exact: {
            const ExactSystem s = build_exact(kernel_of(c), c.L, c.rho, functional_of(c));
            std::vector<OracleRow> var, res_rows;
            const auto curve = exact_variance_curve(s, c.t);
            for (std::size_t i = 0; i < c.t.size(); ++i) var.push_back({c.t[i], curve[i].value, curve[i].err_bound});
            for (double l : c.lambda) res_rows.push_back({l, exact_resolvent(s, l), 0.0});
            out.write("oracle_variance.csv", oracle_csv(s, var));
            out.write("oracle_resolvent.csv", oracle_csv(s, res_rows));
            break;
        }
        case Mode::Quadrature: run_quadrature(c, out); break;
        case Mode::Fit: run_fit(c, out); break;
        case Mode::SecondClass: {
            CouplingOptions o;
            o.threads = c.threads;
            o.plain_replicas = c.plain_replicas;
            const CouplingReport rep = covariance_identity_check(kernel_of(c), c.L, c.rho, c.s, c.n_replicas, *c.seed, o);
            for (const auto& w : rep.warnings) log << "warning: " << w << "\n";
            out.write("coupling.csv", coupling_csv(rep));
            break;
        }
        case Mode::VerifyAll: {
            AcceptanceOptions o;
            o.seed = *c.seed;
            o.threads = c.threads;
            o.only = c.criteria;
            o.on_result = [&](const CriterionResult& r) {
                log << summary_line(r) << "\n";
                for (const auto& l : r.lines) log << "      " << l << "\n";
                log.flush();
            };
            const auto rows = run_acceptance(o);
            out.write("acceptance.csv", acceptance_csv(rows));
            for (const auto& r : rows)
                if (!r.pass()) res.exit_code = kExitAcceptanceFailed;
            break;
        }
    }
    return res;
}

}  // namespace lrex
