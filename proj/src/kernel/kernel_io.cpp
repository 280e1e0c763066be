#include "lrex/error.hpp"
#include "lrex/kernel/jump_kernel.hpp"

#include <cstdio>
#include <map>
#include <sstream>

namespace lrex {
namespace {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt_double(v[i]);
    return out;
}

std::vector<double> split_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, "bad number '" + item + "'");
        }
    }
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string serialize(const JumpKernel& k) {
    std::ostringstream os;
    os << "dim=" << k.dim() << "\n"
       << "alpha=" << fmt_double(k.alpha()) << "\n"
       << "b_plus=" << join(k.b_plus()) << "\n"
       << "b_minus=" << join(k.b_minus()) << "\n"
       << "variant=" << to_string(k.variant()) << "\n"
       << "trunc_radius=" << k.trunc_radius() << "\n"
       << "asym_radius=" << k.options().asym_radius << "\n"
       << "fr_radius=" << k.options().fr_radius << "\n";
    return os.str();
}

JumpKernel deserialize_kernel(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected key=value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto need = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw Error(ErrorCode::ParseError, std::string("missing key ") + key);
        return it->second;
    };
    for (const auto& [key, _] : kv) {
        static const char* known[] = {"dim", "alpha", "b_plus", "b_minus", "variant",
                                      "trunc_radius", "asym_radius", "fr_radius"};
        bool ok = false;
        for (const char* kk : known) ok = ok || key == kk;
        if (!ok) throw Error(ErrorCode::ParseError, "unknown key " + key);
    }
    KernelOptions opt;
    if (kv.count("asym_radius")) opt.asym_radius = std::stoi(kv["asym_radius"]);
    if (kv.count("fr_radius")) opt.fr_radius = std::stoi(kv["fr_radius"]);
    return build_kernel(std::stoi(need("dim")), std::stod(need("alpha")), split_doubles(need("b_plus")),
                        split_doubles(need("b_minus")), parse_variant(need("variant")),
                        std::stoi(need("trunc_radius")), opt);
}

std::string table_csv(const JumpKernel& k) {
    std::ostringstream os;
    os << (k.dim() == 1 ? "y,p,s,a\n" : "y1,y2,p,s,a\n");
    for (const Disp& y : k.displacements()) {
        os << y[0] << ",";
        if (k.dim() == 2) os << y[1] << ",";
        os << fmt_double(k.p(y)) << "," << fmt_double(k.s(y)) << "," << fmt_double(k.a(y)) << "\n";
    }
    return os.str();
}

}  // namespace lrex
