#ifndef QMEM_CLI_SCENARIO_HPP
#define QMEM_CLI_SCENARIO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include <qmem/certify/chain.hpp>
#include <qmem/certify/counting.hpp>
#include <qmem/cli/config.hpp>
#include <qmem/echo/protocols.hpp>
#include <qmem/numcore/bessel.hpp>
#include <qmem/numcore/efficiency.hpp>
#include <qmem/slowlight/protocols.hpp>

namespace qmem::cli {

using json = nlohmann::json;

struct RunOptions {
    double grid_scale = 1.0;
    int threads = 0;
    bool validate_only = false;
};

struct ScenarioInfo {
    std::string name;
    std::string kind;
    std::string figure;
    std::string description;
    std::string out;
};

struct Artifacts {
    ScenarioInfo info;
    std::vector<std::pair<std::string, ComplexEnvelope>> traces;
    json report = json::object();
    std::vector<std::string> sweep_header;
    std::vector<std::vector<double>> sweep_rows;
    Warnings warnings;
};

/* exit status for an error kind: 2 validation, 3 convergence */
inline int exit_code_for(ErrorKind k)
{
    return k == ErrorKind::ConvergenceNotMet || k == ErrorKind::StepTooCoarse ? 3 : 2;
}

inline ScenarioInfo read_info(const ConfigFile &f)
{
    const auto &r = f.root();
    if (r.number("schema_version") != 1.0) {
        throw Error(ErrorKind::Validation, "config: schema_version must be 1");
    }
    ScenarioInfo i;
    i.kind = r.text("kind");
    i.name = r.text("name");
    i.figure = r.text("figure", "");
    i.description = r.text("description", "");
    i.out = r.text("out", "");
    if (i.kind != "echo" && i.kind != "slowlight" && i.kind != "certify" &&
        i.kind != "sweep") {
        throw Error(ErrorKind::Validation, "config: unknown kind '" + i.kind + "'");
    }
    return i;
}

namespace detail {

inline json warnings_json(const Warnings &w)
{
    json a = json::array();
    for (const auto &x : w) {
        a.push_back({{"kind", to_string(x.kind)}, {"message", x.message}});
    }
    return a;
}

inline json convergence_json(const ConvergenceInfo &c)
{
    return {{"nz", c.nz},
            {"substeps", c.substeps},
            {"nclasses", c.nclasses},
            {"step_error", c.step_error},
            {"gate_checked", c.gate_checked},
            {"metric", c.metric},
            {"metric_refined", c.metric_refined},
            {"rel_change", c.rel_change}};
}

inline json grid_json(const TimeGrid &g)
{
    return {{"t0", g.t0}, {"dt", g.dt}, {"n", g.n}};
}

inline json criterion_json(const CriterionReport &r)
{
    json j = {{"criterion", to_string(r.criterion)},
              {"value", r.value},
              {"threshold", r.threshold},
              {"passes_quantum", r.passes_quantum},
              {"warnings", warnings_json(r.warnings)}};
    if (r.criterion == CriterionKind::tv) {
        j["T"] = r.value;
        j["V"] = r.second;
        j["consistency_flag"] = r.consistency_flag;
    }
    return j;
}

inline json detector_json(const DetectorModel &d)
{
    return {{"eta_d", d.eta_d}, {"p_dc", d.p_dc}, {"eta_m", d.eta_m}};
}

/* [numerics] section, shared by echo, slowlight and sweeps */
struct Numerics {
    std::size_t nz = 50;
    double samples_per_width = 10.0;
    double class_margin = 4.0;
    double span_factor = 20.0;
    bool gate = false;
    double gate_tolerance = 0.01;
    double step_tolerance = 1e-6;
    ZScheme scheme = ZScheme::trapezoid;
    bool wing = true;
};

inline Numerics read_numerics(const ConfigFile &f, std::size_t nz_default,
                              const RunOptions &o)
{
    Numerics n;
    n.nz = nz_default;
    if (f.has_section("numerics")) {
        const auto &s = f.section("numerics");
        n.nz = s.count("nz", nz_default);
        n.samples_per_width = s.number("samples_per_width", n.samples_per_width);
        n.class_margin = s.number("class_margin", n.class_margin);
        n.span_factor = s.number("span_factor", n.span_factor);
        n.gate = s.flag("convergence_gate", n.gate);
        n.gate_tolerance = s.number("gate_tolerance", n.gate_tolerance);
        n.step_tolerance = s.number("step_tolerance", n.step_tolerance);
        n.wing = s.flag("wing_correction", n.wing);
        auto z = s.text("z_scheme", "trapezoid");
        if (z == "euler") {
            n.scheme = ZScheme::euler;
        } else if (z != "trapezoid") {
            throw Error(ErrorKind::Validation, "numerics.z_scheme must be trapezoid or euler");
        }
    }
    require(o.grid_scale > 0.0, "grid scale must be positive");
    n.nz = static_cast<std::size_t>(std::llround(static_cast<double>(n.nz) * o.grid_scale));
    return n;
}

inline EchoConfig echo_config(const Numerics &n, double d, const RunOptions &o)
{
    EchoConfig c;
    c.prop.d = d;
    c.prop.nz = n.nz;
    c.prop.z_scheme = n.scheme;
    c.prop.wing_correction = n.wing;
    c.prop.step_tolerance = n.step_tolerance;
    c.prop.convergence_gate = n.gate;
    c.prop.gate_tolerance = n.gate_tolerance;
    c.prop.threads = o.threads;
    c.samples_per_width = n.samples_per_width;
    c.class_margin = n.class_margin;
    c.span_factor = n.span_factor;
    c.grid_scale = o.grid_scale;
    return c;
}

inline json echo_json(const EfficiencyReport &r)
{
    return {{"protocol", r.protocol},
            {"numeric", r.numeric},
            {"analytic", r.analytic},
            {"metric", r.metric},
            {"energy_ratio", r.energy_ratio},
            {"peak_ratio", r.peak_ratio},
            {"echo_time", r.echo_time},
            {"predicted_echo_time", r.predicted_echo_time},
            {"pulse_ratio", r.pulse_ratio},
            {"window", {r.window.begin, r.window.end}},
            {"mean_excited", r.mean_excited},
            {"min_excited", r.min_excited},
            {"convergence", convergence_json(r.convergence)},
            {"grid", grid_json(r.input.grid)},
            {"warnings", warnings_json(r.warnings)}};
}

/* parsed echo section: one protocol run */
struct EchoJob {
    std::string protocol;
    EchoConfig cfg;
    PulseShape signal;
    double tau = 8.0;
    PulseShape pi_pulse;
    RosePulses rose{};
    Direction dir = Direction::forward;

    void validate() const
    {
        if (protocol == "2pe") {
            validate_2pe(cfg, signal, pi_pulse, tau);
        } else if (protocol == "crib_fwd" || protocol == "crib_bwd") {
            validate_crib(cfg, signal, tau);
        } else {
            validate_rose(cfg, signal, rose);
        }
    }

    EfficiencyReport run() const
    {
        if (protocol == "2pe") {
            return run_2pe(cfg, signal, pi_pulse, tau);
        }
        if (protocol == "crib_fwd" || protocol == "crib_bwd") {
            return run_crib(cfg, signal, tau, dir);
        }
        return run_rose(cfg, signal, rose, dir);
    }
};

inline EchoJob read_echo(const ConfigSection &s, const Numerics &n,
                         const RunOptions &o)
{
    EchoJob j;
    j.protocol = s.text("protocol");
    const double d = s.number("d");
    j.cfg = echo_config(n, d, o);
    auto m = s.text("metric", "auto");
    if (m == "energy") {
        j.cfg.metric = EfficiencyMetric::energy;
    } else if (m == "peak") {
        j.cfg.metric = EfficiencyMetric::peak;
    } else if (m != "auto") {
        throw Error(ErrorKind::Validation, "echo.metric must be auto, energy or peak");
    }
    const double w = s.number("signal_width", 1.0);
    j.signal = gaussian_pulse(s.number("signal_center", 0.0), w,
                              pi * s.number("signal_area_pi", 0.05));
    if (j.protocol == "2pe") {
        j.tau = s.number("tau", 8.0 * w);
        j.pi_pulse = gaussian_pulse(0.0, s.number("pi_width", 0.5 * w), pi);
    } else if (j.protocol == "crib_fwd" || j.protocol == "crib_bwd") {
        j.tau = s.number("tau", 8.0 * w);
        j.dir = j.protocol == "crib_fwd" ? Direction::forward : Direction::backward;
    } else if (j.protocol == "rose_fwd" || j.protocol == "rose_bwd") {
        j.dir = j.protocol == "rose_fwd" ? Direction::forward : Direction::backward;
        j.rose.t2 = s.number("t2", 8.0 * w);
        j.rose.t3 = s.number("t3", 24.0 * w);
        auto kind = s.text("rephasing", "pi");
        if (kind == "pi") {
            auto p = gaussian_pulse(0.0, s.number("pi_width", 0.1 * w), pi);
            j.rose.first = p;
            j.rose.second = p;
        } else if (kind == "chs") {
            auto p = chs_pulse(0.0, w, s.number("chs_mu", 3.0),
                               s.number("chs_margin", 1.2));
            j.rose.first = p;
            j.rose.second = p;
        } else {
            throw Error(ErrorKind::Validation, "echo.rephasing must be pi or chs");
        }
    } else {
        throw Error(ErrorKind::Validation, "unknown echo protocol '" + j.protocol + "'");
    }
    return j;
}

inline Vec3 read_vec3(const ConfigSection &s, const std::string &key)
{
    auto v = s.numbers(key, {});
    if (v.size() != 3) {
        throw Error(ErrorKind::Validation, "phase_match." + key + " needs 3 components");
    }
    return {v[0], v[1], v[2]};
}

inline Artifacts run_echo_kind(const ConfigFile &f, const RunOptions &o)
{
    Artifacts a;
    auto n = read_numerics(f, 50, o);
    auto job = read_echo(f.section("echo"), n, o);
    std::optional<std::pair<PhaseMatchProtocol, WaveVectorSet>> pm;
    if (f.has_section("phase_match")) {
        const auto &s = f.section("phase_match");
        auto p = s.text("protocol");
        if (p != "2pe" && p != "rose") {
            throw Error(ErrorKind::Validation, "phase_match.protocol must be 2pe or rose");
        }
        WaveVectorSet k{read_vec3(s, "k1"), read_vec3(s, "k2"), read_vec3(s, "k3")};
        k.validate();
        pm.emplace(p == "2pe" ? PhaseMatchProtocol::tpe : PhaseMatchProtocol::rose, k);
    }
    job.validate();
    if (o.validate_only) {
        return a;
    }
    auto r = job.run();
    a.report = echo_json(r);
    if (pm) {
        auto k = phase_match(pm->first, pm->second);
        a.report["phase_match"] = {{"emitted", k.has_value()},
                                   {"direction", k ? json(*k) : json(nullptr)}};
    }
    a.warnings = r.warnings;
    a.traces.emplace_back("input", r.input);
    a.traces.emplace_back("output", r.output);
    if (r.reference.size() > 0) {
        a.traces.emplace_back("reference", r.reference);
    }
    return a;
}

inline SlowLightScenario read_slowlight(const ConfigSection &s, const Numerics &n,
                                        const RunOptions &o, const std::string &proto)
{
    SlowLightScenario sc;
    if (proto == "shome") {
        sc = shome_scenario();
    } else if (proto == "fid") {
        sc = fid_scenario();
    } else if (proto == "eit") {
        sc = eit_scenario();
    } else {
        sc = raman_scenario();
    }
    sc.d = s.number("d", sc.d);
    sc.gamma0 = s.number("gamma0", sc.gamma0);
    sc.gamma = s.number("gamma", sc.gamma);
    sc.storage = s.number("storage", sc.storage);
    sc.retrieval = s.number("retrieval", sc.retrieval);
    sc.pi_width = s.number("pi_width", sc.pi_width);
    sc.omega_c = s.number("omega", sc.omega_c);
    sc.big_delta = s.number("big_delta", sc.big_delta);
    sc.small_delta = s.number("small_delta", sc.small_delta);
    sc.extra_time = s.number("extra_time", sc.extra_time);
    sc.window_widths = s.number("window_widths", sc.window_widths);
    sc.hole_span = s.number("hole_span", sc.hole_span);
    const double area = pi * s.number("signal_area_pi", sc.signal.area / pi);
    const double width = s.number("signal_width", sc.signal.width);
    const double center = s.number("signal_center", sc.signal.center);
    auto kind = s.text("signal_kind", "gaussian");
    if (kind == "gaussian") {
        sc.signal = gaussian_pulse(center, width, area);
    } else if (kind == "rising_exponential") {
        // width is the rise time, center the cut
        sc.signal = rising_exponential_pulse(center, width, area);
    } else {
        throw Error(ErrorKind::Validation,
                    "slowlight.signal_kind must be gaussian or rising_exponential");
    }
    sc.nz = n.nz;
    sc.samples_per_width = n.samples_per_width;
    sc.class_margin = n.class_margin;
    sc.grid_scale = o.grid_scale;
    sc.convergence_gate = n.gate;
    sc.gate_tolerance = n.gate_tolerance;
    sc.threads = o.threads;
    return sc;
}

/* transfer-function archetypes: transparency (il) or absorption (lorentzian) window */
inline Artifacts run_archetype(const ConfigSection &s, const std::string &proto,
                               const RunOptions &o)
{
    Artifacts a;
    const double d = s.number("d", 20.0);
    const double g0 = s.number("gamma0", 1.0);
    const bool il = proto == "il";
    const double width = s.number("signal_width", il ? 10.0 : 0.05);
    const double center = s.number("signal_center", 0.0);
    const double cut = s.number("cut", il ? d / (4.0 * g0) : 1.0 / (d * g0));
    const double tail = s.number("tail", (25.0 + 2.0 * d) / g0);
    const double spw = s.number("samples_per_width", 10.0);
    require(g0 > 0.0 && d >= 0.0 && width > 0.0 && tail > 0.0 && spw > 0.0,
            "slowlight archetype parameters must be positive");
    auto sig = gaussian_pulse(center, width, pi / 20.0);
    auto g = TimeGrid::covering(sig.t_begin(1e-9), sig.t_end(1e-9) + tail,
                                std::min(width, 1.0 / g0) / (spw * o.grid_scale));
    auto in = render_pulse(sig, g);
    auto tf = il ? inverted_lorentzian(d, g0) : lorentzian(d, g0);
    if (o.validate_only) {
        return a;
    }
    auto out = apply_transfer(in, tf);
    in *= 1.0 / std::sqrt(in.energy());
    out *= 1.0 / std::sqrt(render_pulse(sig, g).energy());
    a.report = {{"protocol", proto},
                {"d", d},
                {"gamma0", g0},
                {"group_delay_theory", d / (2.0 * g0)},
                {"first_moment_delay", out.first_moment() - in.first_moment()},
                {"peak_delay", out.peak_time() - in.peak_time()},
                {"transmitted_energy", out.energy()},
                {"cut", cut},
                {"shaded_area", shaded_area_efficiency(in, out, cut)},
                {"grid", grid_json(g)}};
    if (!il) {
        auto conv = convolve_lorentzian(in, d, g0);
        a.report["bessel_tail_rel_l2"] = relative_l2(conv, out, cut, g.t_end());
    }
    a.traces.emplace_back("input", in);
    a.traces.emplace_back("output", out);
    return a;
}

inline Artifacts run_slowlight_kind(const ConfigFile &f, const RunOptions &o)
{
    const auto &s = f.section("slowlight");
    auto proto = s.text("protocol");
    if (proto == "il" || proto == "lorentzian") {
        return run_archetype(s, proto, o);
    }
    if (proto != "shome" && proto != "fid" && proto != "eit" && proto != "raman") {
        throw Error(ErrorKind::Validation, "unknown slow-light protocol '" + proto + "'");
    }
    Artifacts a;
    auto n = read_numerics(f, 100, o);
    auto sc = read_slowlight(s, n, o, proto);
    a.warnings = sc.validate();
    if (o.validate_only) {
        return a;
    }
    auto r = run_slowlight(sc);
    a.warnings = r.warnings;
    a.report = {{"protocol", r.protocol},
                {"numeric", r.numeric},
                {"window", {r.window.begin, r.window.end}},
                {"replica_energy", r.replica_energy},
                {"reference_energy", r.reference_energy},
                {"storage", sc.storage},
                {"retrieval", sc.retrieval},
                {"convergence", convergence_json(r.convergence)},
                {"grid", grid_json(r.input.grid)},
                {"warnings", warnings_json(r.warnings)}};
    a.traces.emplace_back("input", r.input);
    a.traces.emplace_back("output", r.output);
    a.traces.emplace_back("reference", r.reference);
    a.traces.emplace_back("control", r.control);
    return a;
}

inline DetectorModel read_detector(const ConfigFile &f, const std::string &name)
{
    DetectorModel d;
    if (f.has_section(name)) {
        const auto &s = f.section(name);
        d.eta_d = s.number("eta_d", d.eta_d);
        d.p_dc = s.number("p_dc", d.p_dc);
        d.eta_m = s.number("eta_m", d.eta_m);
    }
    d.validate();
    return d;
}

inline double read_squeezing(const ConfigSection &s)
{
    if (s.has("n_mean")) {
        require(!s.has("p"), "give either p or n_mean, not both");
        return squeezing_from_mean(s.number("n_mean"));
    }
    return s.number("p");
}

inline Artifacts run_certify_kind(const ConfigFile &f, const RunOptions &o)
{
    Artifacts a;
    const auto &s = f.section("certify");
    auto test = s.text("test");
    auto done = [&](json j) {
        if (!o.validate_only) {
            a.report = std::move(j);
        }
        return a;
    };
    if (test == "g2_memory") {
        auto det = read_detector(f, "detector");
        bool cond = s.flag("conditioned", false);
        auto r = g2_memory(det, cond);
        return done({{"test", test}, {"detector", detector_json(det)},
                     {"conditioned", cond}, {"result", criterion_json(r)}});
    }
    if (test == "g2_2pe") {
        double d = s.number("d");
        double eta = s.number("eta_d", 1.0);
        require(d > 0.0 && eta > 0.0 && eta <= 1.0, "g2_2pe: need d > 0, eta in (0,1]");
        return done({{"test", test}, {"d", d}, {"eta_d", eta},
                     {"value", g2_2pe(d, eta)}});
    }
    if (test == "click_2pe") {
        double gain = s.has("d") ? std::exp(s.number("d")) : s.number("gain");
        double eta = s.number("eta_d", 1.0);
        return done({{"test", test}, {"gain", gain}, {"eta_d", eta},
                     {"value", click_probability_2pe(gain, eta)}});
    }
    if (test == "cauchy_schwarz" || test == "bell_visibility") {
        auto da = read_detector(f, "detector_a");
        auto db = read_detector(f, "detector_b");
        double p = read_squeezing(s);
        auto r = test == "cauchy_schwarz" ? cauchy_schwarz(da, db, p)
                                          : bell_visibility(da, db, p);
        return done({{"test", test}, {"p", p}, {"detector_a", detector_json(da)},
                     {"detector_b", detector_json(db)}, {"result", criterion_json(r)}});
    }
    if (test == "tv") {
        auto proto = s.text("protocol");
        TvParams prm;
        TvProtocol tp;
        if (proto == "crib" || proto == "2pe") {
            tp = proto == "crib" ? TvProtocol::crib : TvProtocol::tpe;
            prm.d = s.number("d");
        } else if (proto == "slowlight") {
            tp = TvProtocol::slowlight;
            prm.alpha = s.number("alpha");
            prm.beta = s.number("beta");
            prm.length = s.number("length", 1.0);
        } else {
            throw Error(ErrorKind::Validation, "certify.protocol must be crib, 2pe or slowlight");
        }
        auto r = tv_criterion(tp, prm);
        a.warnings = r.warnings;
        return done({{"test", test}, {"protocol", proto}, {"result", criterion_json(r)}});
    }
    if (test == "inverted_emission") {
        ChainModel m{s.count("atoms", 50), s.number("d")};
        std::size_t nmax = s.count("n_max", 40);
        m.validate();
        a.warnings = m.warnings();
        if (o.validate_only) {
            return a;
        }
        auto r = inverted_emission(m, nmax);
        return done({{"test", test}, {"atoms", m.N}, {"d", m.d}, {"n_max", nmax},
                     {"exact", r.exact}, {"bosonic", r.bosonic}, {"limit", r.limit},
                     {"warnings", warnings_json(r.warnings)}});
    }
    throw Error(ErrorKind::Validation, "unknown certify test '" + test + "'");
}

inline std::vector<double> read_axis(const ConfigSection &s)
{
    if (s.has("values")) {
        auto v = s.numbers("values", {});
        require(!v.empty(), "sweep.values must not be empty");
        return v;
    }
    const double a = s.number("start");
    const double b = s.number("stop");
    const std::size_t n = s.count("count", 11);
    require(n >= 2, "sweep.count must be >= 2");
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

inline std::string fmt_label(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

inline Artifacts run_sweep_kind(const ConfigFile &f, const RunOptions &o)
{
    Artifacts a;
    const auto &s = f.section("sweep");
    auto q = s.text("quantity");
    auto axis = read_axis(s);
    auto &h = a.sweep_header;
    auto &rows = a.sweep_rows;
    if (q == "analytic_efficiency") {
        h = {"d", "tpe", "crib_fwd", "crib_bwd", "rose_fwd"};
        for (double d : axis) {
            require(d >= 0.0, "sweep: d must be >= 0");
            rows.push_back({d, analytic_efficiency(EchoProtocol::tpe, d),
                            analytic_efficiency(EchoProtocol::crib_fwd, d),
                            analytic_efficiency(EchoProtocol::crib_bwd, d),
                            analytic_efficiency(EchoProtocol::rose_fwd, d)});
        }
    } else if (q == "echo_2pe") {
        auto n = read_numerics(f, 50, o);
        auto ratios = s.numbers("pulse_ratios", {1.0, 2.0, 10.0});
        const auto &es = f.section("echo");
        h = {"d", "analytic"};
        for (double r : ratios) {
            h.push_back("numeric_ratio_" + fmt_label(r));
        }
        std::vector<EchoJob> jobs;
        for (double d : axis) {
            for (double r : ratios) {
                auto j = read_echo(es, n, o);
                require(j.protocol == "2pe", "echo_2pe sweep needs echo.protocol = \"2pe\"");
                require(r > 0.0, "pulse ratios must be positive");
                j.cfg.prop.d = d;
                j.pi_pulse = gaussian_pulse(0.0, j.signal.width / r, pi);
                j.validate();
                jobs.push_back(j);
            }
        }
        if (!o.validate_only) {
            std::size_t k = 0;
            for (double d : axis) {
                std::vector<double> row{d, analytic_efficiency(EchoProtocol::tpe, d)};
                for (std::size_t i = 0; i < ratios.size(); ++i, ++k) {
                    auto r = jobs[k].run();
                    row.push_back(r.numeric);
                    a.warnings.insert(a.warnings.end(), r.warnings.begin(), r.warnings.end());
                }
                rows.push_back(row);
            }
        }
    } else if (q == "crib") {
        auto n = read_numerics(f, 50, o);
        const auto &es = f.section("echo");
        h = {"d", "analytic_fwd", "numeric_fwd", "analytic_bwd", "numeric_bwd"};
        auto base = read_echo(es, n, o);
        require(base.protocol == "crib_fwd" || base.protocol == "crib_bwd",
                "crib sweep needs a crib echo protocol");
        for (double d : axis) {
            auto j = base;
            j.cfg.prop.d = d;
            j.validate();
            if (o.validate_only) {
                continue;
            }
            j.dir = Direction::forward;
            auto fw = j.run();
            j.dir = Direction::backward;
            auto bw = j.run();
            rows.push_back({d, fw.analytic, fw.numeric,
                            analytic_efficiency(EchoProtocol::crib_bwd, d), bw.numeric});
        }
    } else if (q == "tv") {
        h = {"d", "T_crib", "V_crib", "quantum_crib", "T_2pe", "V_2pe", "quantum_2pe"};
        for (double d : axis) {
            auto c = tv_criterion(TvProtocol::crib, {d});
            auto t = tv_criterion(TvProtocol::tpe, {d});
            rows.push_back({d, c.value, c.second, c.passes_quantum ? 1.0 : 0.0,
                            t.value, t.second, t.passes_quantum ? 1.0 : 0.0});
        }
    } else if (q == "chain") {
        auto atoms = s.numbers("atoms", {10.0, 50.0, 200.0});
        std::size_t nmax = s.count("n_max", 40);
        h = {"d", "atoms", "absorption", "absorption_limit", "forward", "forward_limit",
             "backward", "backward_limit", "emission", "emission_bosonic",
             "emission_limit"};
        for (double d : axis) {
            for (double na : atoms) {
                ChainModel m{static_cast<std::size_t>(na), d};
                m.validate();
                if (o.validate_only) {
                    continue;
                }
                auto ab = chain_absorption(m);
                auto fw = chain_efficiency(m, ChainDirection::forward);
                auto bw = chain_efficiency(m, ChainDirection::backward);
                auto em = inverted_emission(m, nmax);
                a.warnings.insert(a.warnings.end(), ab.warnings.begin(), ab.warnings.end());
                rows.push_back({d, na, ab.exact, ab.limit, fw.exact, fw.limit, bw.exact,
                                bw.limit, em.exact, em.bosonic, em.limit});
            }
        }
    } else if (q == "g2_memory") {
        auto det = read_detector(f, "detector");
        h = {"p_dc", "g2", "quantum", "boundary_p_dc"};
        for (double p : axis) {
            DetectorModel dd = det;
            dd.p_dc = p;
            auto r = g2_memory(dd, s.flag("conditioned", false));
            rows.push_back({p, r.value, r.passes_quantum ? 1.0 : 0.0, 3.0 * dd.total()});
        }
    } else if (q == "cauchy_schwarz" || q == "bell_visibility") {
        auto da = read_detector(f, "detector_a");
        auto db = read_detector(f, "detector_b");
        bool cs = q == "cauchy_schwarz";
        h = {"p", cs ? "R" : "V", "quantum", cs ? "R_ideal_limit" : "V_ideal"};
        for (double p : axis) {
            auto r = cs ? cauchy_schwarz(da, db, p) : bell_visibility(da, db, p);
            double ideal = cs ? 0.25 * (1.0 + 1.0 / p) * (1.0 + 1.0 / p)
                              : (1.0 - p) / (1.0 + p);
            rows.push_back({p, r.value, r.passes_quantum ? 1.0 : 0.0, ideal});
        }
    } else {
        throw Error(ErrorKind::Validation, "unknown sweep quantity '" + q + "'");
    }
    if (o.validate_only) {
        rows.clear();
        return a;
    }
    a.report = {{"quantity", q}, {"points", rows.size()}, {"columns", h},
                {"warnings", warnings_json(a.warnings)}};
    return a;
}

} // namespace detail

/**
 * Parses and validates a scenario and, unless validate_only, runs it. All
 * keys must be consumed; leftovers are reported as validation errors
 * before any simulation starts.
 */
inline Artifacts run_scenario(const std::string &text, const RunOptions &o)
{
    auto f = ConfigFile::parse(text);
    auto info = read_info(f);
    RunOptions check = o;
    check.validate_only = true;
    auto dispatch = [&](const RunOptions &ro) {
        if (info.kind == "echo") {
            return detail::run_echo_kind(f, ro);
        }
        if (info.kind == "slowlight") {
            return detail::run_slowlight_kind(f, ro);
        }
        if (info.kind == "certify") {
            return detail::run_certify_kind(f, ro);
        }
        return detail::run_sweep_kind(f, ro);
    };
    auto a = dispatch(check);
    f.finish();
    if (!o.validate_only) {
        a = dispatch(o);
        a.report["scenario"] = {{"name", info.name},
                                {"kind", info.kind},
                                {"figure", info.figure},
                                {"grid_scale", o.grid_scale}};
    }
    a.info = info;
    return a;
}

inline std::string read_file(const std::filesystem::path &p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Validation, "cannot read " + p.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string format_number(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string traces_csv(const Artifacts &a)
{
    std::string s = "field,t,re,im,intensity\n";
    for (const auto &[label, env] : a.traces) {
        for (std::size_t i = 0; i < env.size(); ++i) {
            s += label;
            for (double v : {env.grid.time(i), env[i].real(), env[i].imag(),
                             std::norm(env[i])}) {
                s += ',';
                s += format_number(v);
            }
            s += '\n';
        }
    }
    return s;
}

inline std::string sweep_csv(const Artifacts &a)
{
    std::string s;
    for (std::size_t i = 0; i < a.sweep_header.size(); ++i) {
        s += (i ? "," : "") + a.sweep_header[i];
    }
    s += '\n';
    for (const auto &row : a.sweep_rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            s += (i ? "," : "") + format_number(row[i]);
        }
        s += '\n';
    }
    return s;
}

inline void write_text(const std::filesystem::path &p, const std::string &s)
{
    std::ofstream out(p, std::ios::binary);
    out << s;
    if (!out) {
        throw Error(ErrorKind::Validation, "cannot write " + p.string());
    }
}

inline void write_artifacts(const Artifacts &a, const std::filesystem::path &dir)
{
    std::filesystem::create_directories(dir);
    if (!a.traces.empty()) {
        write_text(dir / "traces.csv", traces_csv(a));
    }
    if (!a.sweep_header.empty()) {
        write_text(dir / "sweep.csv", sweep_csv(a));
    }
    write_text(dir / "report.json", a.report.dump(2) + "\n");
}

} // namespace qmem::cli

#endif
