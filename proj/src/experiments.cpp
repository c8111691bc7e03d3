#include "cosserat/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace cosserat {

namespace fs = std::filesystem;

std::string to_string(TaskCase c) {
    switch (c) {
        case TaskCase::reach: return "reach";
        case TaskCase::fetch: return "fetch";
        case TaskCase::shoot: return "shoot";
        case TaskCase::custom: return "custom";
    }
    return "?";
}

TaskCase task_case_from_string(const std::string& s) {
    if (s == "reach") return TaskCase::reach;
    if (s == "fetch") return TaskCase::fetch;
    if (s == "shoot") return TaskCase::shoot;
    if (s == "custom") return TaskCase::custom;
    throw std::invalid_argument("unknown case '" + s + "' (expected reach, fetch, shoot or custom)");
}

Profile profile_from_string(const std::string& s) {
    if (s == "paper") return Profile::paper;
    if (s == "desk") return Profile::desk;
    throw std::invalid_argument("unknown profile '" + s + "' (expected paper or desk)");
}

void apply_profile(ExperimentConfig& config, Profile profile) {
    if (profile == Profile::paper) {
        config.rod.N = 100;
        config.dt = 1e-5;
    } else {
        config.rod.N = 50;
        config.dt = 2e-5;
    }
}

ExperimentConfig preset(TaskCase task) {
    ExperimentConfig c;
    c.task = task;
    apply_profile(c, Profile::desk);
    switch (task) {
        case TaskCase::reach:
        case TaskCase::custom:
            break;
        case TaskCase::fetch:
            c.weights.T = 0.6;
            c.weights.eta = 4e-5;
            c.target = Vec2(0.0, -0.02);
            c.iterations = 40;
            break;
        case TaskCase::shoot: {
            c.weights.T = 0.8;
            c.weights.chi1 = 100.0;
            c.target = Vec2(0.16, 0.10);
            const double L0 = c.rod.L0;
            const double M[] = {20, 78, 10, -30};
            const double s[] = {0.0, 0.3, 0.7, 0.85};
            const double sigma[] = {0.015, 0.015, 0.012, 0.008};
            for (int i = 0; i < 4; ++i) c.bumps.push_back({M[i], s[i] * L0, sigma[i]});
            break;
        }
    }
    return c;
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("config: " + m); };
    make_rod_properties(rod);
    weights.validate();
    if (!(dt > 0)) fail("dt must be positive");
    steps_for_horizon(weights.T, dt);
    if (iterations < 1) fail("iterations must be at least 1");
    if (!(epsilon > 0)) fail("epsilon must be positive");
    if (!target.allFinite()) fail("target must be finite");
    for (const auto& b : bumps)
        if (!(b.sigma > 0) || !std::isfinite(b.M) || !std::isfinite(b.s0)) fail("bump sigma must be positive");
    if (snapshots < 0) fail("snapshots must be non-negative");
    if (control_stride < 1) fail("control_stride must be positive");
    for (double v : sweep_E)
        if (!(v > 0)) fail("sweep.E entries must be positive");
    for (double v : sweep_rho)
        if (!(v > 0)) fail("sweep.rho entries must be positive");
    for (double v : sweep_chi1)
        if (!(v >= 0)) fail("sweep.chi1 entries must be non-negative");
    if (!(wave_window.t_end > wave_window.t_begin)) fail("wave.window end must exceed its start");
}

// ---------------------------------------------------------------- parsing

namespace {

enum class Dim { none, length, modulus, time };

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_tokens(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',' || ch == ' ' || ch == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

bool is_number_start(const std::string& t) {
    return !t.empty() && (std::isdigit(static_cast<unsigned char>(t[0])) || t[0] == '-' || t[0] == '+' || t[0] == '.');
}

class Parser {
public:
    Parser(std::string source, double L0) : source_(std::move(source)), L0_(L0) {}

    void set_L0(double L0) { L0_ = L0; }

    // Numbers in `value`, each optionally followed by a unit (attached or as
    // the next token).
    std::vector<double> numbers(const Entry& e, Dim dim) const {
        const auto toks = split_tokens(e.value);
        std::vector<double> out;
        for (std::size_t i = 0; i < toks.size(); ++i) {
            const std::string& t = toks[i];
            double v = 0;
            auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (ec != std::errc() || !is_number_start(t)) error(e, "expected a number, got '" + t + "'");
            std::string unit(ptr, t.data() + t.size());
            if (unit.empty() && i + 1 < toks.size() && !is_number_start(toks[i + 1])) unit = toks[++i];
            out.push_back(v * scale(e, dim, unit));
        }
        if (out.empty()) error(e, "missing value");
        return out;
    }

    double number(const Entry& e, Dim dim) const {
        const auto v = numbers(e, dim);
        if (v.size() != 1) error(e, "expected one value, got " + std::to_string(v.size()));
        return v[0];
    }

    std::vector<double> exactly(const Entry& e, Dim dim, std::size_t n) const {
        auto v = numbers(e, dim);
        if (v.size() != n) error(e, "expected " + std::to_string(n) + " values, got " + std::to_string(v.size()));
        return v;
    }

    int integer(const Entry& e) const {
        int v = 0;
        const std::string t = trim(e.value);
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || ptr != t.data() + t.size()) error(e, "expected an integer, got '" + t + "'");
        return v;
    }

    [[noreturn]] void error(const Entry& e, const std::string& msg) const {
        throw ConfigError(source_, e.line, e.key + ": " + msg);
    }

private:
    double scale(const Entry& e, Dim dim, const std::string& unit) const {
        if (unit.empty()) return 1.0;
        switch (dim) {
            case Dim::length:
                if (unit == "m") return 1.0;
                if (unit == "cm") return 1e-2;
                if (unit == "mm") return 1e-3;
                if (unit == "L0") return L0_;
                break;
            case Dim::modulus:
                if (unit == "Pa") return 1.0;
                if (unit == "kPa") return 1e3;
                if (unit == "MPa") return 1e6;
                break;
            case Dim::time:
                if (unit == "s") return 1.0;
                if (unit == "ms") return 1e-3;
                break;
            case Dim::none:
                break;
        }
        error(e, "unit '" + unit + "' not allowed here");
    }

    std::string source_;
    double L0_;
};

void apply_entry(ExperimentConfig& c, const Entry& e, const Parser& p, bool& bumps_seen) {
    const std::string& k = e.key;
    auto word = [&] { return trim(e.value); };
    try {
        if (k == "N") c.rod.N = p.integer(e);
        else if (k == "phi_base") c.rod.phi_base = p.number(e, Dim::length);
        else if (k == "phi_tip") c.rod.phi_tip = p.number(e, Dim::length);
        else if (k == "rho") c.rod.rho = p.number(e, Dim::none);
        else if (k == "E") c.rod.E = p.number(e, Dim::modulus);
        else if (k == "zeta") c.rod.zeta = p.number(e, Dim::none);
        else if (k == "poisson") c.rod.poisson = p.number(e, Dim::none);
        else if (k == "dt") c.dt = p.number(e, Dim::time);
        else if (k == "T") c.weights.T = p.number(e, Dim::time);
        else if (k == "chi1") c.weights.chi1 = p.number(e, Dim::none);
        else if (k == "chi2") c.weights.chi2 = p.number(e, Dim::none);
        else if (k == "eta") c.weights.eta = p.number(e, Dim::none);
        else if (k == "iterations") c.iterations = p.integer(e);
        else if (k == "epsilon") c.epsilon = p.number(e, Dim::none);
        else if (k == "target") {
            const auto v = p.exactly(e, Dim::length, 2);
            c.target = Vec2(v[0], v[1]);
        } else if (k == "bump") {
            if (!bumps_seen) c.bumps.clear();
            bumps_seen = true;
            if (word() == "none") return;
            auto toks = split_tokens(e.value);
            // M carries no unit; s0 and sigma are lengths.
            if (toks.empty()) p.error(e, "missing value");
            Entry head = e, rest = e;
            head.value = toks[0];
            rest.value = e.value.substr(e.value.find(toks[0]) + toks[0].size());
            const double M = p.number(head, Dim::none);
            const auto v = p.exactly(rest, Dim::length, 2);
            c.bumps.push_back({M, v[0], v[1]});
        } else if (k == "output") c.output_dir = word();
        else if (k == "snapshots") c.snapshots = p.integer(e);
        else if (k == "control_stride") c.control_stride = p.integer(e);
        else if (k == "sweep.E") c.sweep_E = word() == "none" ? std::vector<double>{} : p.numbers(e, Dim::modulus);
        else if (k == "sweep.rho") c.sweep_rho = word() == "none" ? std::vector<double>{} : p.numbers(e, Dim::none);
        else if (k == "sweep.chi1")
            c.sweep_chi1 = word() == "none" ? std::vector<double>{} : p.numbers(e, Dim::none);
        else if (k == "wave.window") {
            const auto v = p.exactly(e, Dim::time, 2);
            c.wave_window.t_begin = v[0];
            c.wave_window.t_end = v[1];
        } else if (k == "wave.field") c.peak_field = peak_field_from_string(word());
        else if (k == "wave.signal") c.peak_signal = peak_signal_from_string(word());
        else p.error(e, "unknown key");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& ex) {
        p.error(e, ex.what());
    }
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
    std::vector<Entry> entries;
    std::string line;
    int n = 0;
    std::map<std::string, int> seen;
    while (std::getline(in, line)) {
        ++n;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(source, n, "expected 'key = value'");
        Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), n};
        if (e.key.empty()) throw ConfigError(source, n, "missing key");
        if (e.value.empty()) throw ConfigError(source, n, e.key + ": missing value");
        if (e.key != "bump" && seen.count(e.key))
            throw ConfigError(source, n, e.key + ": duplicate key (first set on line " +
                                             std::to_string(seen[e.key]) + ")");
        seen[e.key] = n;
        entries.push_back(std::move(e));
    }

    ExperimentConfig c;
    Parser p(source, c.rod.L0);
    auto find = [&](const std::string& key) -> const Entry* {
        for (const auto& e : entries)
            if (e.key == key) return &e;
        return nullptr;
    };
    if (const Entry* e = find("case")) {
        try {
            c = preset(task_case_from_string(e->value));
        } catch (const std::invalid_argument& ex) {
            p.error(*e, ex.what());
        }
    }
    if (const Entry* e = find("profile")) {
        try {
            apply_profile(c, profile_from_string(e->value));
        } catch (const std::invalid_argument& ex) {
            p.error(*e, ex.what());
        }
    }
    if (const Entry* e = find("L0")) c.rod.L0 = p.number(*e, Dim::length);
    p.set_L0(c.rod.L0);

    bool bumps_seen = false;
    for (const auto& e : entries) {
        if (e.key == "case" || e.key == "profile" || e.key == "L0") continue;
        apply_entry(c, e, p, bumps_seen);
    }
    try {
        c.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(source, 0, ex.what());
    }
    return c;
}

ExperimentConfig parse_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    return parse_config(in, path.string());
}

namespace {

// Shortest text that parses back to the same double.
std::string num(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string num_list(const std::vector<double>& v) {
    if (v.empty()) return "none";
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream o;
    o << "case = " << to_string(c.task) << "\n"
      << "L0 = " << num(c.rod.L0) << "\n"
      << "N = " << c.rod.N << "\n"
      << "phi_base = " << num(c.rod.phi_base) << "\n"
      << "phi_tip = " << num(c.rod.phi_tip) << "\n"
      << "rho = " << num(c.rod.rho) << "\n"
      << "E = " << num(c.rod.E) << "\n"
      << "zeta = " << num(c.rod.zeta) << "\n"
      << "poisson = " << num(c.rod.poisson) << "\n"
      << "dt = " << num(c.dt) << "\n"
      << "T = " << num(c.weights.T) << "\n"
      << "chi1 = " << num(c.weights.chi1) << "\n"
      << "chi2 = " << num(c.weights.chi2) << "\n"
      << "eta = " << num(c.weights.eta) << "\n"
      << "iterations = " << c.iterations << "\n"
      << "epsilon = " << num(c.epsilon) << "\n"
      << "target = " << num(c.target.x()) << ", " << num(c.target.y()) << "\n";
    if (c.bumps.empty()) o << "bump = none\n";
    for (const auto& b : c.bumps) o << "bump = " << num(b.M) << ", " << num(b.s0) << ", " << num(b.sigma) << "\n";
    o << "output = " << c.output_dir << "\n"
      << "snapshots = " << c.snapshots << "\n"
      << "control_stride = " << c.control_stride << "\n"
      << "sweep.E = " << num_list(c.sweep_E) << "\n"
      << "sweep.rho = " << num_list(c.sweep_rho) << "\n"
      << "sweep.chi1 = " << num_list(c.sweep_chi1) << "\n"
      << "wave.window = " << num(c.wave_window.t_begin) << ", " << num(c.wave_window.t_end) << "\n"
      << "wave.field = " << to_string(c.peak_field) << "\n"
      << "wave.signal = " << to_string(c.peak_signal) << "\n";
    return o.str();
}

// ---------------------------------------------------------------- initial state

RodState initial_bent_state(const ExperimentConfig& config, const RodProperties& props) {
    RodState st = RodState::straight(props);
    if (config.bumps.empty()) return st;
    // theta(s) = integral of the Gaussian bumps from 0 to s, in closed form.
    auto theta_at = [&](double s) {
        double th = 0;
        for (const auto& b : config.bumps) {
            const double w = std::numbers::sqrt2 * b.sigma;
            th += b.M * b.sigma * std::sqrt(std::numbers::pi / 2) * (std::erf((s - b.s0) / w) + std::erf(b.s0 / w));
        }
        return th;
    };
    const auto N = static_cast<std::size_t>(props.N);
    for (std::size_t j = 0; j < N; ++j) {
        st.theta[j] = theta_at((static_cast<double>(j) + 0.5) * props.ds);
        st.r[j + 1] = st.r[j] + props.ds * Vec2(std::cos(st.theta[j]), std::sin(st.theta[j]));
    }
    return st;
}

// ---------------------------------------------------------------- run_case

namespace {

std::vector<int> snapshot_steps(int steps, int count) {
    std::vector<int> out;
    if (count == 1) out.push_back(steps);
    for (int i = 0; i < count && count > 1; ++i)
        out.push_back(static_cast<int>(std::lround(static_cast<double>(i) * steps / (count - 1))));
    return out;
}

std::ofstream open_csv(const fs::path& file, const char* header) {
    std::ofstream f(file);
    if (!f) throw std::runtime_error("cannot write " + file.string());
    f << header << "\n";
    return f;
}

void write_log(const SolveLog& log, const fs::path& dir) {
    auto f = open_csv(dir / "log.csv", "k,J,J_running,J_terminal,du_max,tip_dist");
    char buf[256];
    for (const auto& r : log.records) {
        std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.k, r.J, r.J_running, r.J_terminal,
                      r.du_max, r.tip_dist);
        f << buf;
    }
    if (!log.warnings.empty()) {
        std::ofstream w(dir / "warnings.txt");
        for (const auto& s : log.warnings) w << s << "\n";
    }
}

void write_control(const ControlField& u, int stride, const fs::path& file) {
    auto f = open_csv(file, "t,index,kind,value");
    char buf[96];
    for (int k = 0; k < u.steps; k += stride) {
        const double t = k * u.dt;
        const auto F = u.force_at(k);
        for (std::size_t i = 0; i < F.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.10g,%zu,Fx,%.10g\n", t, i, F[i].x());
            f << buf;
            std::snprintf(buf, sizeof buf, "%.10g,%zu,Fy,%.10g\n", t, i, F[i].y());
            f << buf;
        }
        const auto C = u.couple_at(k);
        for (std::size_t j = 0; j < C.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.10g,%zu,C,%.10g\n", t, j, C[j]);
            f << buf;
        }
    }
}

}  // namespace

CaseResult run_case(const ExperimentConfig& config, const fs::path& directory) {
    config.validate();
    fs::create_directories(directory);
    {
        std::ofstream cfg(directory / "config.cfg");
        cfg << serialize_config(config);
    }

    CaseResult out;
    out.directory = directory;
    out.props = make_rod_properties(config.rod);
    const RodState initial = initial_bent_state(config, out.props);
    const int steps = steps_for_horizon(config.weights.T, config.dt);
    const std::vector<int> marks = snapshot_steps(steps, config.snapshots);

    auto snaps = open_csv(directory / "snapshots.csv", "iter,t,node,x,y");
    auto thetas = open_csv(directory / "theta.csv", "iter,t,element,theta");
    SolveOptions opts;
    opts.max_iters = config.iterations;
    opts.epsilon = config.epsilon;
    opts.on_iteration = [&](int k, const Trajectory& traj, const ControlField&) {
        char buf[128];
        for (int m : marks) {
            const RodState& s = traj.states[static_cast<std::size_t>(m)];
            const double t = m * traj.dt;
            for (std::size_t i = 0; i < s.r.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%d,%.10g,%zu,%.12g,%.12g\n", k, t, i, s.r[i].x(), s.r[i].y());
                snaps << buf;
            }
            for (std::size_t j = 0; j < s.theta.size(); ++j) {
                std::snprintf(buf, sizeof buf, "%d,%.10g,%zu,%.12g\n", k, t, j, s.theta[j]);
                thetas << buf;
            }
        }
    };

    try {
        out.solve = solve(initial, out.props, config.weights, config.target, config.dt, opts);
    } catch (const SolveAborted& e) {
        write_log(e.log(), directory);
        throw;
    }
    write_log(out.solve.log, directory);
    write_control(out.solve.control, config.control_stride, directory / "control_final.csv");
    return out;
}

// ---------------------------------------------------------------- analyses

std::vector<std::pair<double, double>> material_pairs(const ExperimentConfig& c) {
    std::vector<double> E = c.sweep_E, rho = c.sweep_rho;
    if (E.empty()) E.push_back(c.rod.E);
    if (rho.empty()) rho.push_back(c.rod.rho);
    const std::size_t n = std::max(E.size(), rho.size());
    if ((E.size() != 1 && E.size() != n) || (rho.size() != 1 && rho.size() != n))
        throw std::invalid_argument("sweep.E and sweep.rho must have equal length or one entry");
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < n; ++i) out.emplace_back(E[E.size() == 1 ? 0 : i], rho[rho.size() == 1 ? 0 : i]);
    return out;
}

WaveFit wave_fit_for(const ExperimentConfig& config, const ControlField& control, double ds,
                     const WaveWindow& window) {
    return estimate_wave_speed(sample_control(control, ds, config.peak_field), window, config.peak_signal);
}

Chi1Row classify_chi1(const ExperimentConfig& config, const ControlField& control, double ds) {
    Chi1Row row;
    row.chi1 = config.weights.chi1;
    const SpaceTimeSeries series = sample_control(control, ds, config.peak_field);
    const double mid = 0.5 * config.rod.L0;
    WaveWindow w = config.wave_window;
    row.whole = estimate_wave_speed(series, w, config.peak_signal);
    w.s_end = mid;
    row.base_half = estimate_wave_speed(series, w, config.peak_signal);
    w = config.wave_window;
    w.s_begin = mid;
    row.tip_half = estimate_wave_speed(series, w, config.peak_signal);
    row.bimodal = row.base_half.reliable && row.tip_half.reliable && row.base_half.direction > 0 &&
                  row.tip_half.direction < 0;
    return row;
}

namespace {

std::string tag(const char* name, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s=%g", name, v);
    return buf;
}

}  // namespace

std::vector<WaveSpeedRow> wave_speed_sweep(const ExperimentConfig& config, const fs::path& out, int workers) {
    if (workers < 1) throw std::invalid_argument("workers must be at least 1");
    const auto pairs = material_pairs(config);
    std::vector<WaveSpeedRow> rows(pairs.size());
    const int n = static_cast<int>(pairs.size());
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (workers > 1)
    for (int i = 0; i < n; ++i) {
        WaveSpeedRow& row = rows[static_cast<std::size_t>(i)];
        row.E = pairs[static_cast<std::size_t>(i)].first;
        row.rho = pairs[static_cast<std::size_t>(i)].second;
        try {
            ExperimentConfig c = config;
            c.rod.E = row.E;
            c.rod.rho = row.rho;
            const CaseResult r = run_case(c, out / (tag("E", row.E) + "_" + tag("rho", row.rho)));
            row.fit = wave_fit_for(c, r.solve.control, r.props.ds, c.wave_window);
            row.coeff = row.fit.speed / std::sqrt(row.E / row.rho);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    }
    return rows;
}

std::vector<Chi1Row> chi1_sweep(const ExperimentConfig& config, const fs::path& out, int workers) {
    if (workers < 1) throw std::invalid_argument("workers must be at least 1");
    if (config.sweep_chi1.empty()) throw std::invalid_argument("chi1 sweep needs a non-empty sweep.chi1 list");
    std::vector<Chi1Row> rows(config.sweep_chi1.size());
    const int n = static_cast<int>(rows.size());
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (workers > 1)
    for (int i = 0; i < n; ++i) {
        Chi1Row& row = rows[static_cast<std::size_t>(i)];
        row.chi1 = config.sweep_chi1[static_cast<std::size_t>(i)];
        try {
            ExperimentConfig c = config;
            c.weights.chi1 = row.chi1;
            const CaseResult r = run_case(c, out / tag("chi1", row.chi1));
            row = classify_chi1(c, r.solve.control, r.props.ds);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    }
    return rows;
}

namespace {

const char* direction_name(const WaveFit& f) {
    if (!f.reliable) return "unreliable";
    return f.direction > 0 ? "base_to_tip" : (f.direction < 0 ? "tip_to_base" : "stationary");
}

}  // namespace

void write_wave_speed_csv(const std::vector<WaveSpeedRow>& rows, const fs::path& file) {
    auto f = open_csv(file, "E,rho,c,coeff,r2,direction,error");
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.6f,%s,", r.E, r.rho, r.fit.speed, r.coeff,
                      r.fit.r2, r.error.empty() ? direction_name(r.fit) : "failed");
        f << buf << '"' << r.error << '"' << "\n";
    }
}

void write_chi1_csv(const std::vector<Chi1Row>& rows, const fs::path& file) {
    auto f = open_csv(file, "chi1,direction,c,r2,base_c,base_r2,base_direction,tip_c,tip_r2,tip_direction,"
                            "bimodal,error");
    char buf[512];
    for (const auto& r : rows) {
        auto signed_speed = [](const WaveFit& w) { return w.direction * w.speed; };
        std::snprintf(buf, sizeof buf, "%.10g,%s,%.10g,%.6f,%.10g,%.6f,%s,%.10g,%.6f,%s,%d,", r.chi1,
                      r.error.empty() ? direction_name(r.whole) : "failed", signed_speed(r.whole), r.whole.r2,
                      signed_speed(r.base_half), r.base_half.r2, direction_name(r.base_half),
                      signed_speed(r.tip_half), r.tip_half.r2, direction_name(r.tip_half), r.bimodal ? 1 : 0);
        f << buf << '"' << r.error << '"' << "\n";
    }
}

SpaceTimeSeries read_control_series(const fs::path& file, PeakField field, double ds) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::string line;
    std::getline(in, line);
    if (trim(line) != "t,index,kind,value") throw std::runtime_error(file.string() + ": unexpected header");
    const std::string want = to_string(field);
    const bool couple = field == PeakField::couple;
    SpaceTimeSeries out;
    std::map<std::size_t, double> row;
    double row_t = std::nan("");
    auto flush = [&] {
        if (row.empty()) return;
        if (out.s.empty())
            for (const auto& [i, v] : row) out.s.push_back(couple ? (static_cast<double>(i) + 0.5) * ds : i * ds);
        if (row.size() != out.s.size()) throw std::runtime_error(file.string() + ": ragged control rows");
        out.t.push_back(row_t);
        for (const auto& [i, v] : row) out.values.push_back(v);
        row.clear();
    };
    int n = 1;
    while (std::getline(in, line)) {
        ++n;
        std::istringstream ls(line);
        std::string ts, is, kind, vs;
        if (!std::getline(ls, ts, ',') || !std::getline(ls, is, ',') || !std::getline(ls, kind, ',') ||
            !std::getline(ls, vs))
            throw std::runtime_error(file.string() + ":" + std::to_string(n) + ": malformed row");
        if (kind != want) continue;
        const double t = std::stod(ts);
        const std::size_t idx = std::stoul(is);
        if (t != row_t) {
            flush();
            row_t = t;
        }
        if (idx >= 1) row[idx] = std::stod(vs);  // the clamped base entry is skipped
    }
    flush();
    if (out.t.empty()) throw std::runtime_error(file.string() + ": no " + want + " rows");
    return out;
}

}  // namespace cosserat
