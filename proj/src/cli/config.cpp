#include "lrex/cli/config.hpp"

#include "lrex/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#ifndef LREX_VERSION
#define LREX_VERSION "unversioned"
#endif

namespace lrex {

const char* code_version() { return LREX_VERSION; }

const char* to_string(Mode m) {
    switch (m) {
        case Mode::Simulate: return "simulate";
        case Mode::Exact: return "exact";
        case Mode::Quadrature: return "quadrature";
        case Mode::Fit: return "fit";
        case Mode::SecondClass: return "secondclass";
        case Mode::VerifyAll: return "verify_all";
    }
    return "?";
}

Mode parse_mode(const std::string& s) {
    if (s == "verify-all") return Mode::VerifyAll;
    for (Mode m : {Mode::Simulate, Mode::Exact, Mode::Quadrature, Mode::Fit, Mode::SecondClass, Mode::VerifyAll})
        if (s == to_string(m)) return m;
    throw Error(ErrorCode::ValidationError, "mode: unknown value '" + s + "'");
}

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& v, const char* what) {
    throw Error(ErrorCode::ValidationError, key + ": '" + v + "' is not " + what);
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    const char* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end) bad_value(key, v, "a number of the expected type");
    return out;
}

std::vector<std::string> split(const std::string& v, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    for (std::string item; std::getline(ss, item, sep);) out.push_back(trim(item));
    return out;
}

// "1,2,5", "logspace(a,b,n)" (10^a .. 10^b), "linspace(a,b,n)".
std::vector<double> parse_list(const std::string& key, const std::string& v) {
    for (const char* fn : {"logspace(", "linspace("}) {
        const std::string f = fn;
        if (v.rfind(f, 0) != 0) continue;
        if (v.back() != ')') bad_value(key, v, "a closed range expression");
        const auto args = split(v.substr(f.size(), v.size() - f.size() - 1), ',');
        if (args.size() != 3) bad_value(key, v, "a range with three arguments");
        const double a = parse_number<double>(key, args[0]), b = parse_number<double>(key, args[1]);
        const int n = parse_number<int>(key, args[2]);
        if (n < 1) bad_value(key, v, "a range with at least one point");
        std::vector<double> out;
        for (int i = 0; i < n; ++i) {
            const double x = n == 1 ? a : a + (b - a) * i / (n - 1);
            out.push_back(f[1] == 'o' ? std::pow(10.0, x) : x);
        }
        return out;
    }
    std::vector<double> out;
    if (v.empty()) return out;
    for (const auto& item : split(v, ',')) out.push_back(parse_number<double>(key, item));
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    if (v.empty()) return out;
    for (const auto& item : split(v, ',')) out.push_back(parse_number<int>(key, item));
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad_value(key, v, "a boolean");
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        if constexpr (std::is_same_v<T, double>)
            out += fmt(v[i]);
        else
            out += std::to_string(v[i]);
    }
    return out;
}

template <class F>
auto rethrow_as_validation(const std::string& key, const std::string& v, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ValidationError) throw;
        throw Error(ErrorCode::ValidationError, key + ": '" + v + "' rejected (" + e.what() + ")");
    }
}

struct Field {
    std::string key;  // section.name
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

#define LREX_NUM(sec, name, T)                                                                           \
    Field {                                                                                              \
        #sec "." #name, [](ExperimentConfig& c, const std::string& v) { c.name = parse_number<T>(#sec "." #name, v); }, \
            [](const ExperimentConfig& c) { return std::is_same_v<T, double> ? fmt(static_cast<double>(c.name)) : std::to_string(c.name); } \
    }
#define LREX_STR(sec, name) \
    Field { #sec "." #name, [](ExperimentConfig& c, const std::string& v) { c.name = v; }, [](const ExperimentConfig& c) { return c.name; } }
#define LREX_LIST(sec, name) \
    Field { #sec "." #name, [](ExperimentConfig& c, const std::string& v) { c.name = parse_list(#sec "." #name, v); }, [](const ExperimentConfig& c) { return join(c.name); } }

const std::vector<Field>& registry() {
    static const std::vector<Field> fields = {
        Field{"run.mode", [](ExperimentConfig& c, const std::string& v) { c.mode = parse_mode(v); },
              [](const ExperimentConfig& c) { return std::string(to_string(c.mode)); }},
        Field{"run.seed", [](ExperimentConfig& c, const std::string& v) { c.seed = parse_number<std::uint64_t>("run.seed", v); },
              [](const ExperimentConfig& c) { return c.seed ? std::to_string(*c.seed) : std::string(); }},
        LREX_STR(run, out),
        LREX_NUM(run, threads, int),
        LREX_NUM(run, n_replicas, std::size_t),
        LREX_NUM(run, plain_replicas, std::size_t),

        LREX_NUM(kernel, dim, int),
        LREX_NUM(kernel, alpha, double),
        Field{"kernel.variant",
              [](ExperimentConfig& c, const std::string& v) {
                  c.variant = rethrow_as_validation("kernel.variant", v, [&] { return parse_variant(v); });
              },
              [](const ExperimentConfig& c) { return std::string(to_string(c.variant)); }},
        LREX_LIST(kernel, b_plus),
        LREX_LIST(kernel, b_minus),
        LREX_NUM(kernel, trunc_radius, int),
        LREX_NUM(kernel, asym_radius, int),
        LREX_NUM(kernel, fr_radius, int),

        LREX_NUM(lattice, L, int),
        LREX_NUM(lattice, rho, double),

        Field{"functional.kind",
              [](ExperimentConfig& c, const std::string& v) {
                  if (v == "degree1")
                      c.kind = FunctionalSpec::Kind::Degree1;
                  else if (v == "degree2")
                      c.kind = FunctionalSpec::Kind::Degree2;
                  else
                      bad_value("functional.kind", v, "degree1 or degree2");
              },
              [](const ExperimentConfig& c) {
                  return std::string(c.kind == FunctionalSpec::Kind::Degree1 ? "degree1" : "degree2");
              }},
        LREX_NUM(functional, x0, int),
        LREX_NUM(functional, x1, int),

        LREX_LIST(grid, t),
        LREX_LIST(grid, lambda),
        LREX_LIST(grid, s),

        Field{"quadrature.target",
              [](ExperimentConfig& c, const std::string& v) {
                  c.target = rethrow_as_validation("quadrature.target", v, [&] { return parse_target(v); });
              },
              [](const ExperimentConfig& c) { return std::string(to_string(c.target)); }},
        LREX_NUM(quadrature, delta, double),
        LREX_NUM(quadrature, u, double),
        Field{"quadrature.r_kind",
              [](ExperimentConfig& c, const std::string& v) {
                  if (v == "s0")
                      c.r_kind = RKind::S0;
                  else if (v == "s")
                      c.r_kind = RKind::S;
                  else
                      bad_value("quadrature.r_kind", v, "s0 or s");
              },
              [](const ExperimentConfig& c) { return std::string(c.r_kind == RKind::S0 ? "s0" : "s"); }},
        LREX_LIST(quadrature, b_bar),
        LREX_NUM(quadrature, order, int),
        LREX_NUM(quadrature, abs_tol, double),
        LREX_NUM(quadrature, rel_tol, double),
        LREX_NUM(quadrature, singular_pad, double),
        LREX_NUM(quadrature, outer_grid, int),
        Field{"quadrature.site",
              [](ExperimentConfig& c, const std::string& v) { c.site = parse_int_list("quadrature.site", v); },
              [](const ExperimentConfig& c) { return join(c.site); }},

        LREX_STR(fit, input),
        LREX_STR(fit, x_column),
        LREX_STR(fit, y_column),
        LREX_STR(fit, err_column),
        Field{"fit.correction",
              [](ExperimentConfig& c, const std::string& v) {
                  c.correction = rethrow_as_validation("fit.correction", v, [&] { return parse_correction(v); });
              },
              [](const ExperimentConfig& c) { return std::string(to_string(c.correction)); }},
        LREX_STR(fit, quantity),
        LREX_NUM(fit, target_beta, double),
        LREX_NUM(fit, tolerance, double),
        LREX_NUM(fit, x_lo, double),
        LREX_NUM(fit, x_hi, double),
        Field{"fit.auto_window",
              [](ExperimentConfig& c, const std::string& v) { c.auto_window = parse_bool("fit.auto_window", v); },
              [](const ExperimentConfig& c) { return std::string(c.auto_window ? "true" : "false"); }},

        Field{"verify.criteria",
              [](ExperimentConfig& c, const std::string& v) { c.criteria = parse_int_list("verify.criteria", v); },
              [](const ExperimentConfig& c) { return join(c.criteria); }},
    };
    return fields;
}

#undef LREX_NUM
#undef LREX_STR
#undef LREX_LIST

const Field* find_field(const std::string& section, const std::string& key) {
    const auto& reg = registry();
    const std::string q = key.find('.') != std::string::npos ? key : (section.empty() ? key : section + "." + key);
    for (const auto& f : reg)
        if (f.key == q) return &f;
    if (!section.empty() || key.find('.') != std::string::npos) return nullptr;
    const Field* hit = nullptr;
    for (const auto& f : reg)
        if (f.key.substr(f.key.find('.') + 1) == key) {
            if (hit) return nullptr;  // ambiguous
            hit = &f;
        }
    return hit;
}

bool stochastic(Mode m) { return m == Mode::Simulate || m == Mode::SecondClass || m == Mode::VerifyAll; }

}  // namespace

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& f : registry()) out.push_back(f.key);
    return out;
}

ExperimentConfig parse_config(const std::string& text, const Overrides& overrides) {
    ExperimentConfig c;
    std::set<std::string> seen;
    std::string section;
    std::istringstream in(text);
    int line_no = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        const std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected key=value");
        if (section == "manifest") continue;
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        const Field* f = find_field(section, key);
        if (!f)
            throw Error(ErrorCode::ValidationError,
                        (section.empty() ? key : section + "." + key) + ": unknown key (line " +
                            std::to_string(line_no) + ")");
        if (!seen.insert(f->key).second)
            throw Error(ErrorCode::ValidationError, f->key + ": set twice (line " + std::to_string(line_no) + ")");
        f->set(c, value);
    }
    for (const auto& [key, value] : overrides) {
        const Field* f = find_field("", key);
        if (!f) throw Error(ErrorCode::ValidationError, key + ": unknown key (override)");
        seen.insert(f->key);
        f->set(c, value);
    }
    for (const auto& f : registry())
        if (!seen.count(f.key)) c.defaulted.push_back(f.key);
    validate(c);
    return c;
}

void validate(const ExperimentConfig& c) {
    auto fail = [](const std::string& field, const std::string& why) {
        throw Error(ErrorCode::ValidationError, field + ": " + why);
    };
    if (stochastic(c.mode) && !c.seed) fail("run.seed", "required for stochastic modes");
    if (c.threads < 1) fail("run.threads", "must be at least 1");
    if (c.mode == Mode::Simulate && c.n_replicas < 2) fail("run.n_replicas", "simulate needs at least 2 replicas");
    if (c.mode == Mode::SecondClass && c.n_replicas < 16) fail("run.n_replicas", "secondclass needs at least 16");
    if (c.dim != 1 && c.dim != 2) fail("kernel.dim", "must be 1 or 2");
    if (!(c.alpha > 0.0)) fail("kernel.alpha", "must be positive");
    if (c.b_plus.empty() || c.b_minus.empty()) fail("kernel.b_plus", "weights must be given");
    if (c.trunc_radius < 1) fail("kernel.trunc_radius", "must be at least 1");
    if (c.L < 2) fail("lattice.L", "must be at least 2");
    if (!(c.rho > 0.0 && c.rho < 1.0)) fail("lattice.rho", "must lie in (0, 1)");
    auto positive_increasing = [&](const std::vector<double>& v, const char* field) {
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!(v[i] > 0.0) || (i && !(v[i] > v[i - 1]))) fail(field, "must be positive and increasing");
    };
    positive_increasing(c.t, "grid.t");
    positive_increasing(c.lambda, "grid.lambda");
    positive_increasing(c.s, "grid.s");
    if ((c.mode == Mode::Simulate || c.mode == Mode::Exact) && c.t.empty()) fail("grid.t", "must not be empty");
    if (c.mode == Mode::SecondClass && c.s.empty()) fail("grid.s", "must not be empty");
    if (c.b_bar.size() != 2) fail("quadrature.b_bar", "needs two weights");
    if (c.site.size() != 2) fail("quadrature.site", "needs two coordinates");
    if (c.mode == Mode::Fit && c.input.empty()) fail("fit.input", "required in fit mode");
    if (!(c.tolerance > 0.0)) fail("fit.tolerance", "must be positive");
    for (int id : c.criteria)
        if (id < 1 || id > 8) fail("verify.criteria", "ids run from 1 to 8");
}

std::string resolved_config_text(const ExperimentConfig& c) {
    std::string out, section;
    for (const auto& f : registry()) {
        const auto dot = f.key.find('.');
        const std::string sec = f.key.substr(0, dot), name = f.key.substr(dot + 1);
        if (sec != section) {
            out += (section.empty() ? "[" : "\n[") + sec + "]\n";
            section = sec;
        }
        const std::string v = f.get(c);
        if (f.key == "run.seed" && !c.seed)
            out += "# seed unset\n";
        else
            out += name + "=" + v + "\n";
    }
    return out;
}

std::string manifest_text(const ExperimentConfig& c, const std::string& created) {
    std::string out = resolved_config_text(c);
    out += "\n[manifest]\ncode_version=" + std::string(code_version()) + "\ncreated=" + created + "\ndefaulted=";
    for (std::size_t i = 0; i < c.defaulted.size(); ++i) out += (i ? "," : "") + c.defaulted[i];
    out += "\n";
    return out;
}

}  // namespace lrex
