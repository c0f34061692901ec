#include "crossdiff/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "crossdiff/errors.hpp"

namespace crossdiff {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string dkey(int i, int j, int m, int n) {
    return "d" + std::to_string(i + 1) + std::to_string(j + 1) + "_" +
           std::to_string(m + 1) + std::to_string(n);
}

}  // namespace

ModelParams load_model(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) +
                               ": expected 'key = value'");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    auto get_num = [&kv](const std::string& key, double fallback, bool* found = nullptr) {
        auto it = kv.find(key);
        if (it == kv.end()) {
            if (found) *found = false;
            return fallback;
        }
        if (found) *found = true;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw config_error("config key '" + key + "': cannot parse number '" +
                               it->second + "'");
        }
    };

    const std::string fam_name = kv.count("family") ? kv.at("family") : "custom";
    const Family fam = family_from_name(fam_name);
    const double b = get_num("b", 0.0);
    const double delta = get_num("delta", 0.0);

    ModelParams p;
    if (fam == Family::custom) {
        bool have_alpha = false;
        p.alpha = {get_num("alpha1", 0.0, &have_alpha), get_num("alpha2", 0.0)};
        if (!have_alpha || !kv.count("alpha2"))
            throw config_error("custom model config requires alpha1 and alpha2");
        if (!kv.count("beta11") || !kv.count("beta12") || !kv.count("beta21") ||
            !kv.count("beta22"))
            throw config_error("custom model config requires beta11..beta22");
        p.beta = {get_num("beta11", 0.0), get_num("beta12", 0.0), get_num("beta21", 0.0),
                  get_num("beta22", 0.0)};
        p.b = b;
        p.delta = delta;
        p.family = Family::custom;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int m = 0; m < 2; ++m)
                    for (int n = 0; n < 2; ++n)
                        p.dtensor(i, j, m, n) = get_num(dkey(i, j, m, n), 0.0);
    } else {
        p = builtin_example(fam, b, delta);
        // Kinetics overrides are allowed on top of the built-in diffusion family.
        if (kv.count("alpha1")) p.alpha[0] = get_num("alpha1", p.alpha[0]);
        if (kv.count("alpha2")) p.alpha[1] = get_num("alpha2", p.alpha[1]);
        if (kv.count("beta11")) p.beta.a11 = get_num("beta11", p.beta.a11);
        if (kv.count("beta12")) p.beta.a12 = get_num("beta12", p.beta.a12);
        if (kv.count("beta21")) p.beta.a21 = get_num("beta21", p.beta.a21);
        if (kv.count("beta22")) p.beta.a22 = get_num("beta22", p.beta.a22);
    }
    return p;
}

ModelParams load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open model config: " + path);
    return load_model(in);
}

void save_model(std::ostream& out, const ModelParams& p) {
    out << "family = " << family_name(p.family) << "\n";
    out << "alpha1 = " << fmt_double(p.alpha[0]) << "\n";
    out << "alpha2 = " << fmt_double(p.alpha[1]) << "\n";
    out << "beta11 = " << fmt_double(p.beta.a11) << "\n";
    out << "beta12 = " << fmt_double(p.beta.a12) << "\n";
    out << "beta21 = " << fmt_double(p.beta.a21) << "\n";
    out << "beta22 = " << fmt_double(p.beta.a22) << "\n";
    out << "b = " << fmt_double(p.b) << "\n";
    out << "delta = " << fmt_double(p.delta) << "\n";
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int m = 0; m < 2; ++m)
                for (int n = 0; n < 2; ++n)
                    out << dkey(i, j, m, n) << " = " << fmt_double(p.dtensor(i, j, m, n))
                        << "\n";
}

void save_model_file(const std::string& path, const ModelParams& p) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot write model config: " + path);
    save_model(out, p);
}

}  // namespace crossdiff
