#include "fbnet/config.hpp"

#include "fbnet/csv.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fbnet {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

/// One key=value occurrence, with enough context for error messages.
struct Entry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
};

class Parser {
public:
    Parser(const std::string& text, const std::string& origin) : origin_(origin) {
        scan(text);
    }

    ExperimentConfig materialize() {
        ExperimentConfig cfg;
        // Shorthands first, explicit keys second, so overrides win no matter
        // where they sit in the file.
        for (const Entry& e : entries_) {
            if (e.section == "problem" && e.key == "preset") {
                cfg.problem = named_preset(e);
            } else if (e.section == "network" && e.key == "method") {
                const int m = parse_method(e);
                cfg.arch = method_arch(m);
                cfg.adam = method_adam(m);
            }
        }
        for (const Entry& e : entries_) apply(cfg, e);
        try {
            cfg.validate();
        } catch (const std::exception& ex) {
            throw std::invalid_argument(origin_ + ": " + ex.what());
        }
        return cfg;
    }

private:
    void scan(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        int line = 0;
        std::string section;
        while (std::getline(in, raw)) {
            ++line;
            if (const auto hash = raw.find('#'); hash != std::string::npos)
                raw.erase(hash);
            const std::string s = trim(raw);
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    fail(line, "unterminated section header '" + s + "'");
                section = lower(trim(s.substr(1, s.size() - 2)));
                if (section != "problem" && section != "sampler" &&
                    section != "network" && section != "trainer" && section != "run")
                    fail(line, "unknown section [" + section + "]");
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                fail(line, "expected key = value, got '" + s + "'");
            if (section.empty()) fail(line, "key before any [section]");
            Entry e;
            e.section = section;
            e.key = lower(trim(s.substr(0, eq)));
            e.value = trim(s.substr(eq + 1));
            e.line = line;
            if (e.key.empty()) fail(line, "empty key");
            for (const Entry& prev : entries_)
                if (prev.section == e.section && prev.key == e.key)
                    fail(line, "duplicate key " + e.section + "." + e.key +
                                   " (first set on line " + std::to_string(prev.line) + ")");
            entries_.push_back(std::move(e));
        }
    }

    [[noreturn]] void fail(int line, const std::string& what) const {
        throw std::invalid_argument(origin_ + ":" + std::to_string(line) + ": " + what);
    }

    [[noreturn]] void fail(const Entry& e, const std::string& what) const {
        fail(e.line, e.section + "." + e.key + ": " + what);
    }

    double number(const Entry& e) const {
        const char* begin = e.value.c_str();
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin || *end != '\0')
            fail(e, "not a number: '" + e.value + "'");
        return v;
    }

    int integer(const Entry& e) const {
        const char* begin = e.value.c_str();
        char* end = nullptr;
        const long long v = std::strtoll(begin, &end, 10);
        if (end == begin || *end != '\0' || v < INT_MIN || v > INT_MAX)
            fail(e, "not an integer: '" + e.value + "'");
        return static_cast<int>(v);
    }

    std::uint64_t unsigned64(const Entry& e) const {
        const char* begin = e.value.c_str();
        char* end = nullptr;
        if (!e.value.empty() && e.value.front() == '-')
            fail(e, "must be non-negative: '" + e.value + "'");
        const unsigned long long v = std::strtoull(begin, &end, 10);
        if (end == begin || *end != '\0')
            fail(e, "not an integer: '" + e.value + "'");
        return v;
    }

    bool boolean(const Entry& e) const {
        const std::string v = lower(e.value);
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        fail(e, "expected true/false: '" + e.value + "'");
    }

    std::vector<int> layer_list(const Entry& e) const {
        std::vector<int> out;
        std::istringstream in(e.value);
        std::string item;
        while (std::getline(in, item, ',')) {
            const std::string t = trim(item);
            const char* begin = t.c_str();
            char* end = nullptr;
            const long long v = std::strtoll(begin, &end, 10);
            if (t.empty() || end == begin || *end != '\0' || v < 1 || v > 1 << 20)
                fail(e, "bad layer width '" + t + "'");
            out.push_back(static_cast<int>(v));
        }
        if (out.empty()) fail(e, "need at least one layer width");
        return out;
    }

    ProblemSpec named_preset(const Entry& e) const {
        try {
            return preset_by_name(e.value);
        } catch (const std::exception&) {
            fail(e, "unknown preset '" + e.value + "' (want stm|mtm|ltm)");
        }
    }

    int parse_method(const Entry& e) const {
        std::string v = lower(e.value);
        if (!v.empty() && v.front() == 'm') v.erase(0, 1);
        if (v.size() == 1 && v[0] >= '1' && v[0] <= '8') return v[0] - '0';
        fail(e, "unknown method '" + e.value + "' (want m1..m8)");
    }

    void apply(ExperimentConfig& cfg, const Entry& e) const {
        const std::string& k = e.key;
        if (e.section == "problem") {
            if (k == "preset") return;  // already applied
            if (k == "k") cfg.problem.K = number(e);
            else if (k == "t") cfg.problem.T = number(e);
            else if (k == "r") cfg.problem.r = number(e);
            else if (k == "sigma") cfg.problem.sigma = number(e);
            else if (k == "x_max") cfg.problem.x_max = number(e);
            else if (k == "tau_min") cfg.problem.tau_min = number(e);
            else fail(e, "unknown key");
        } else if (e.section == "sampler") {
            if (k == "kind") {
                const std::string v = lower(e.value);
                if (v != "uniform" && v != "random" && v != "stretched")
                    fail(e, "unknown grid kind '" + e.value +
                               "' (want uniform|random|stretched)");
                cfg.grid.kind = v;
            } else if (k == "n_tau") cfg.grid.n_tau = integer(e);
            else if (k == "n_y") cfg.grid.n_y = integer(e);
            else if (k == "p") cfg.grid.p = number(e);
            else if (k == "seed") cfg.grid.seed = unsigned64(e);
            else fail(e, "unknown key");
        } else if (e.section == "network") {
            if (k == "method") return;  // already applied
            if (k == "layers") cfg.arch.hidden = layer_list(e);
            else if (k == "init_stddev") cfg.init_stddev = number(e);
            else fail(e, "unknown key");
        } else if (e.section == "trainer") {
            if (k == "lr0") cfg.adam.lr0 = number(e);
            else if (k == "beta1") cfg.adam.beta1 = number(e);
            else if (k == "beta2") cfg.adam.beta2 = number(e);
            else if (k == "eps") cfg.adam.eps = number(e);
            else if (k == "steps") cfg.adam.steps = integer(e);
            else if (k == "decay_step") cfg.adam.decay_step = integer(e);
            else if (k == "decay_rate") cfg.adam.decay_rate = number(e);
            else if (k == "smooth_decay") cfg.adam.smooth_decay = boolean(e);
            else if (k == "display_step") cfg.adam.display_step = integer(e);
            else fail(e, "unknown key");
        } else {  // run
            if (k == "mode") {
                const std::string v = lower(e.value);
                if (v == "case1") cfg.mode = BoundaryMode::CASE1;
                else if (v == "case2") cfg.mode = BoundaryMode::CASE2;
                else fail(e, "unknown mode '" + e.value + "' (want case1|case2)");
            } else if (k == "seed") cfg.seed = unsigned64(e);
            else if (k == "name") cfg.name = e.value;
            else fail(e, "unknown key");
        }
    }

    std::string origin_;
    std::vector<Entry> entries_;
};

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::string& origin) {
    return Parser(text, origin).materialize();
}

ExperimentConfig load_experiment_config(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read config file " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str(), file.string());
}

std::string format_experiment_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "[problem]\n";
    out << "K = " << csv_num(cfg.problem.K) << "\n";
    out << "T = " << csv_num(cfg.problem.T) << "\n";
    out << "r = " << csv_num(cfg.problem.r) << "\n";
    out << "sigma = " << csv_num(cfg.problem.sigma) << "\n";
    out << "x_max = " << csv_num(cfg.problem.x_max) << "\n";
    out << "tau_min = " << csv_num(cfg.problem.tau_min) << "\n";
    out << "\n[sampler]\n";
    out << "kind = " << cfg.grid.kind << "\n";
    out << "n_tau = " << cfg.grid.n_tau << "\n";
    out << "n_y = " << cfg.grid.n_y << "\n";
    out << "p = " << csv_num(cfg.grid.p) << "\n";
    out << "seed = " << cfg.grid.seed << "\n";
    out << "\n[network]\n";
    out << "layers = ";
    for (std::size_t i = 0; i < cfg.arch.hidden.size(); ++i)
        out << (i ? ", " : "") << cfg.arch.hidden[i];
    out << "\n";
    out << "init_stddev = " << csv_num(cfg.init_stddev) << "\n";
    out << "\n[trainer]\n";
    out << "lr0 = " << csv_num(cfg.adam.lr0) << "\n";
    out << "beta1 = " << csv_num(cfg.adam.beta1) << "\n";
    out << "beta2 = " << csv_num(cfg.adam.beta2) << "\n";
    out << "eps = " << csv_num(cfg.adam.eps) << "\n";
    out << "steps = " << cfg.adam.steps << "\n";
    out << "decay_step = " << cfg.adam.decay_step << "\n";
    out << "decay_rate = " << csv_num(cfg.adam.decay_rate) << "\n";
    out << "smooth_decay = " << (cfg.adam.smooth_decay ? "true" : "false") << "\n";
    out << "display_step = " << cfg.adam.display_step << "\n";
    out << "\n[run]\n";
    out << "mode = " << (cfg.mode == BoundaryMode::CASE1 ? "case1" : "case2") << "\n";
    out << "seed = " << cfg.seed << "\n";
    if (!cfg.name.empty()) out << "name = " << cfg.name << "\n";
    return out.str();
}

}  // namespace fbnet
