// pskh: command line runner for constellation generation, SER, PASPR,
// spectrum, capacity and complexity experiments.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pskh/pskh.hpp"

#ifndef PSKH_VERSION
#define PSKH_VERSION "unknown"
#endif

using namespace pskh;
using json = nlohmann::json;

namespace {

struct ConfigError : DomainError {
    using DomainError::DomainError;
};

// ---------------------------------------------------------------------------
// shared option groups
// ---------------------------------------------------------------------------

struct ConstellationOpts {
    std::string method = "pm";
    int n = 3;
    int m = 64;
    double es = 1.0;
    std::string load;
};

void add_constellation_opts(CLI::App* sub, ConstellationOpts& c) {
    sub->add_option("--method", c.method, "Generator: pm, kmc, eqpa, papsk")
        ->check(CLI::IsMember({"pm", "kmc", "eqpa", "papsk"}))
        ->capture_default_str();
    sub->add_option("--n", c.n, "Antennas (complex dimensions)")->capture_default_str();
    sub->add_option("--M", c.m, "Constellation size (power of two)")->capture_default_str();
    sub->add_option("--es", c.es, "Energy per point")->capture_default_str();
    sub->add_option("--load", c.load, "Read the constellation from a file instead of generating it");
}

ConstellationSet make_constellation(const ConstellationOpts& c, std::uint64_t seed) {
    if (!c.load.empty()) {
        std::ifstream is(c.load);
        if (!is) throw ConfigError("cannot open constellation file '" + c.load + "'");
        return read_constellation(is);
    }
    if (c.method == "pm") return gen_pm(c.n, c.m, c.es, {}, RngSeed{seed});
    if (c.method == "kmc") return gen_kmc(c.n, c.m, c.es, {}, RngSeed{seed});
    if (c.method == "eqpa") return gen_eqpa(c.n, c.m, c.es);
    if (c.method == "papsk") return gen_papsk(c.n, c.m, c.es);
    throw ConfigError("unknown method '" + c.method + "'");
}

json constellation_json(const ConstellationOpts& c) {
    return {{"method", c.method}, {"n", c.n}, {"M", c.m}, {"es", c.es}, {"load", c.load}};
}

struct WaveformOpts {
    std::string signaling = "pam";
    std::string pulse = "rrc";
    double beta = 0.25;
    int span = 16;
    int q = 16;
    int fip = 4;
};

void add_waveform_opts(CLI::App* sub, WaveformOpts& w) {
    sub->add_option("--signaling", w.signaling, "pam, t2 or si")->check(CLI::IsMember({"pam", "t2", "si"}))->capture_default_str();
    sub->add_option("--pulse", w.pulse, "rrc, sinc2 or rect")->check(CLI::IsMember({"rrc", "sinc2", "rect"}))->capture_default_str();
    sub->add_option("--beta", w.beta, "RRC roll-off")->capture_default_str();
    sub->add_option("--span", w.span, "Pulse span in pulse periods")->capture_default_str();
    sub->add_option("--Q", w.q, "Samples per symbol period")->capture_default_str();
    sub->add_option("--fip", w.fip, "SI interpolation factor")->capture_default_str();
}

WaveformSpec to_spec(const WaveformOpts& w) {
    WaveformSpec s;
    s.signaling = signaling_from_string(w.signaling);
    s.pulse = pulse_kind_from_string(w.pulse);
    s.beta = w.beta;
    s.span = w.span;
    s.q = w.q;
    s.fip = w.fip;
    return s;
}

json waveform_json(const WaveformOpts& w) {
    return {{"signaling", w.signaling}, {"pulse", w.pulse}, {"beta", w.beta}, {"span", w.span}, {"Q", w.q}, {"fip", w.fip}};
}

struct Common {
    std::uint64_t seed = 1;
    std::string out;
    std::string preset;
};

void add_common(CLI::App* sub, Common& c, const std::string& default_out) {
    c.out = default_out;
    sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
    sub->add_option("--out", c.out, "Output file")->capture_default_str();
}

// Preset values fill only options the user did not set on the command line or in the config file.
template <class T>
void preset(CLI::App* sub, const std::string& name, T& field, const T& value) {
    if (sub->get_option(name)->count() == 0) field = value;
}

std::vector<double> grid(double start, double stop, double step) {
    if (!(step > 0.0) || stop < start) throw ConfigError("bad grid: need start <= stop and step > 0");
    std::vector<double> g;
    for (int i = 0;; ++i) {
        const double v = start + i * step;
        if (v > stop + 1e-9 * step) break;
        g.push_back(v);
    }
    return g;
}

void write_manifest(const std::string& out, const std::string& command, const json& config, std::uint64_t seed,
                    double wall, const json& extra = json::object()) {
    std::filesystem::path p(out);
    p.replace_extension(".json");
    json m{{"command", command}, {"config", config}, {"seed", seed}, {"version", PSKH_VERSION}, {"wall_time_s", wall},
           {"output", out}};
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    std::ofstream os(p);
    if (!os) throw ConfigError("cannot write manifest '" + p.string() + "'");
    os << m.dump(2) << '\n';
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write '" + path + "'");
    return os;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenCmd {
    CLI::App* sub = nullptr;
    Common common;
    ConstellationOpts c;
};

int run_gen(GenCmd& g) {
    const auto t0 = std::chrono::steady_clock::now();
    if (g.common.preset == "table1") {
        if (g.sub->get_option("--out")->count() == 0) g.common.out = "table1.csv";
        auto os = open_out(g.common.out);
        os << "method,n,M,d_min,d_nb_avg\n";
        json rows = json::array();
        for (int m : {64, 512})
            for (const char* method : {"eqpa", "kmc", "pm", "papsk"}) {
                ConstellationOpts c{method, 3, m, 1.0, {}};
                const auto p = distance_profile(make_constellation(c, g.common.seed));
                os << method << ",3," << m << ',' << format_g17(p.d_min) << ',' << format_g17(p.d_nb_avg) << '\n';
                std::printf("%-6s M=%-4d d_min=%.4f d_nb_avg=%.4f\n", method, m, p.d_min, p.d_nb_avg);
                rows.push_back({{"method", method}, {"M", m}, {"d_min", p.d_min}, {"d_nb_avg", p.d_nb_avg}});
            }
        write_manifest(g.common.out, "gen", {{"preset", "table1"}}, g.common.seed, seconds_since(t0), {{"rows", rows}});
        return 0;
    }
    if (!g.common.preset.empty()) throw ConfigError("gen: unknown preset '" + g.common.preset + "'");
    if (g.sub->get_option("--out")->count() == 0)
        g.common.out = g.c.method + "_n" + std::to_string(g.c.n) + "_M" + std::to_string(g.c.m) + ".pskh";
    const auto a = make_constellation(g.c, g.common.seed);
    const auto p = distance_profile(a);
    auto os = open_out(g.common.out);
    write_constellation(os, a);
    std::printf("d_min=%.6f d_nb_avg=%.6f\n", p.d_min, p.d_nb_avg);
    write_manifest(g.common.out, "gen", constellation_json(g.c), g.common.seed, seconds_since(t0),
                   {{"d_min", p.d_min}, {"d_nb_avg", p.d_nb_avg}});
    return 0;
}

// ---------------------------------------------------------------------------
// ser
// ---------------------------------------------------------------------------

struct SerCmd {
    CLI::App* sub = nullptr;
    Common common;
    ConstellationOpts c;
    WaveformOpts w;
    std::string channel = "awgn";
    std::string estimator = "symbolwise";
    int nu = 0;
    int nu_max = 2;
    int n_nb = 4;
    int hyper = 4;
    int tail = -1;
    std::string neighbors = "effective";
    double start = 0.0, stop = 10.0, step = 1.0;
    std::vector<double> points;
    long long min_errors = 200;
    long long max_symbols = 1000000;
    int frame = 1000;
    int batch = 16;
    int workers = 0;
    long long branch_cap = 1LL << 20;
};

void apply_ser_preset(SerCmd& s) {
    const auto& p = s.common.preset;
    if (p.empty()) return;
    auto set_method = [&](const std::string& m) { preset(s.sub, "--method", s.c.method, m); };
    auto set_size = [&](int n, int m) {
        preset(s.sub, "--n", s.c.n, n);
        preset(s.sub, "--M", s.c.m, m);
    };
    auto set_grid = [&](double a, double b, double st) {
        preset(s.sub, "--start", s.start, a);
        preset(s.sub, "--stop", s.stop, b);
        preset(s.sub, "--step", s.step, st);
    };
    if (p == "fig2a" || p == "fig2a-pm" || p == "fig2a-kmc" || p == "fig2a-eqpa" || p == "fig2a-papsk") {
        set_method(p == "fig2a" ? "pm" : p.substr(6));
        set_size(3, 64);
        if (p == "fig2a-kmc") preset(s.sub, "--seed", s.common.seed, std::uint64_t{11});
        if (p == "fig2a" || p == "fig2a-pm") preset(s.sub, "--seed", s.common.seed, std::uint64_t{7});
        set_grid(0.0, 10.0, 1.0);
        preset(s.sub, "--max-symbols", s.max_symbols, 20000000LL);
    } else if (p == "fig3") {
        set_size(2, 16);
        preset(s.sub, "--pulse", s.w.pulse, std::string("sinc2"));
        preset(s.sub, "--channel", s.channel, std::string("rayleigh"));
        preset(s.sub, "--estimator", s.estimator, std::string("va"));
        preset(s.sub, "--nu", s.nu, 2);
        set_grid(0.0, 25.0, 5.0);
        preset(s.sub, "--max-symbols", s.max_symbols, 2000000LL);
    } else if (p == "fig4") {
        set_size(2, 16);
        preset(s.sub, "--signaling", s.w.signaling, std::string("t2"));
        preset(s.sub, "--channel", s.channel, std::string("rayleigh"));
        preset(s.sub, "--estimator", s.estimator, std::string("va"));
        preset(s.sub, "--nu", s.nu, 1);
        set_grid(0.0, 25.0, 5.0);
        preset(s.sub, "--max-symbols", s.max_symbols, 2000000LL);
    } else if (p == "fig6") {
        set_size(3, 64);
        preset(s.sub, "--signaling", s.w.signaling, std::string("si"));
        preset(s.sub, "--channel", s.channel, std::string("rayleigh"));
        preset(s.sub, "--estimator", s.estimator, std::string("ddfse"));
        preset(s.sub, "--seed", s.common.seed, std::uint64_t{7});
        preset(s.sub, "--nu", s.nu, 2);
        set_grid(10.0, 20.0, 2.5);
        preset(s.sub, "--max-symbols", s.max_symbols, 100000LL);
    } else if (p == "fig7") {
        set_size(3, 64);
        preset(s.sub, "--signaling", s.w.signaling, std::string("si"));
        preset(s.sub, "--channel", s.channel, std::string("rayleigh"));
        preset(s.sub, "--estimator", s.estimator, std::string("iter"));
        preset(s.sub, "--seed", s.common.seed, std::uint64_t{7});
        preset(s.sub, "--numax", s.nu_max, 2);
        preset(s.sub, "--nnb", s.n_nb, 4);
        set_grid(10.0, 20.0, 2.5);
        preset(s.sub, "--max-symbols", s.max_symbols, 1000000LL);
    } else {
        throw ConfigError("ser: unknown preset '" + p + "'");
    }
}

TrellisDecodeConfig decoder_config(const SerCmd& s, const ConstellationSet& a) {
    TrellisDecodeConfig d;
    d.estimator = estimator_from_string(s.estimator);
    d.nu = s.nu;
    d.nu_max = s.nu_max;
    d.n_nb = s.n_nb;
    d.tail = s.tail;
    d.branch_cap = s.branch_cap;
    d.neighbors = s.neighbors == "original" ? NeighborSource::Original : NeighborSource::Effective;
    if (d.estimator == Estimator::Rsse) d.partition = hypersymbol_partition(a, s.hyper, RngSeed{s.common.seed});
    return d;
}

json ser_json(const SerCmd& s, const std::vector<double>& g) {
    return {{"constellation", constellation_json(s.c)},
            {"waveform", waveform_json(s.w)},
            {"channel", s.channel},
            {"estimator", s.estimator},
            {"nu", s.nu},
            {"numax", s.nu_max},
            {"nnb", s.n_nb},
            {"hyper", s.hyper},
            {"tail", s.tail},
            {"neighbors", s.neighbors},
            {"ebn0_db", g},
            {"min_errors", s.min_errors},
            {"max_symbols", s.max_symbols},
            {"frame_symbols", s.frame},
            {"batch_frames", s.batch},
            {"branch_cap", s.branch_cap},
            {"preset", s.common.preset}};
}

int run_ser(SerCmd& s) {
    const auto t0 = std::chrono::steady_clock::now();
    apply_ser_preset(s);
    const auto a = make_constellation(s.c, s.common.seed);
    LinkConfig cfg;
    cfg.waveform = to_spec(s.w);
    if (s.channel != "awgn" && s.channel != "rayleigh") throw ConfigError("channel must be awgn or rayleigh");
    cfg.channel = s.channel == "rayleigh" ? ChannelKind::RayleighIid : ChannelKind::IdentityAwgn;
    cfg.decoder = decoder_config(s, a);
    cfg.ebn0_db = s.points.empty() ? grid(s.start, s.stop, s.step) : s.points;
    cfg.min_errors = s.min_errors;
    cfg.max_symbols = s.max_symbols;
    cfg.frame_symbols = s.frame;
    cfg.batch_frames = s.batch;
    cfg.workers = s.workers;
    const long long xi = complexity_xi(cfg.decoder, a.size());
    if (xi > s.branch_cap) throw InfeasibleTrellis(xi, s.branch_cap);

    auto os = open_out(s.common.out);
    os << "ebn0_db,ser,symbols,errors\n";
    const auto curve = pskh::run_ser(a, cfg, RngSeed{s.common.seed}, [&](const SerPoint& p) {
        os << format_g17(p.ebn0_db) << ',' << format_g17(p.ser) << ',' << p.symbols << ',' << p.errors << '\n';
        os.flush();
        std::fprintf(stderr, "%6.2f dB  SER %.4e  (%lld errors / %lld symbols)\n", p.ebn0_db, p.ser, p.errors, p.symbols);
    });
    write_manifest(s.common.out, "ser", ser_json(s, cfg.ebn0_db), s.common.seed, seconds_since(t0),
                   {{"complexity_xi", xi}, {"workers", cfg.workers > 0 ? cfg.workers : default_workers()}});
    return 0;
}

// ---------------------------------------------------------------------------
// paspr
// ---------------------------------------------------------------------------

struct PasprCmd {
    CLI::App* sub = nullptr;
    Common common;
    ConstellationOpts c;
    WaveformOpts w;
    long long symbols = 100000;
};

// one bit per real dimension unless M is given; PM is impractical beyond M = 1024
ConstellationOpts paspr_constellation(const PasprCmd& p, int n) {
    ConstellationOpts c = p.c;
    c.n = n;
    if (p.sub->get_option("--M")->count() == 0) c.m = 1 << (2 * n);
    if (p.sub->get_option("--method")->count() == 0 && c.m > 1024) c.method = "eqpa";
    return c;
}

int run_paspr(PasprCmd& p) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Row {
        WaveformOpts w;
        ConstellationOpts c;
    };
    std::vector<Row> rows;
    if (p.common.preset == "fig9") {
        for (int n : {1, 3, 7}) {
            WaveformOpts w;
            w.pulse = "sinc2";
            rows.push_back({w, paspr_constellation(p, n)});
        }
        const auto c3 = paspr_constellation(p, 3);
        WaveformOpts rrc, t2, si;
        t2.signaling = "t2";
        t2.span = 32;
        si.signaling = "si";
        for (const auto& w : {rrc, t2, si}) rows.push_back({w, c3});
    } else if (p.common.preset.empty()) {
        rows.push_back({p.w, paspr_constellation(p, p.c.n)});
    } else {
        throw ConfigError("paspr: unknown preset '" + p.common.preset + "'");
    }
    auto os = open_out(p.common.out);
    os << "signaling,pulse,beta,n,M,paspr_db\n";
    json results = json::array();
    for (const auto& r : rows) {
        const auto a = make_constellation(r.c, p.common.seed);
        const auto spec = to_spec(r.w);
        const double v = paspr_db(random_waveform(a, spec, p.symbols, RngSeed{p.common.seed}), pulse_span_symbols(spec));
        os << r.w.signaling << ',' << r.w.pulse << ',' << format_g17(r.w.beta) << ',' << r.c.n << ',' << r.c.m << ','
           << format_g17(v) << '\n';
        std::printf("%-3s %-5s n=%d M=%d  PASPR %.3f dB\n", r.w.signaling.c_str(), r.w.pulse.c_str(), r.c.n, r.c.m, v);
        results.push_back({{"waveform", waveform_json(r.w)}, {"constellation", constellation_json(r.c)}, {"paspr_db", v}});
    }
    write_manifest(p.common.out, "paspr", {{"symbols", p.symbols}, {"preset", p.common.preset}}, p.common.seed,
                   seconds_since(t0), {{"results", results}});
    return 0;
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

struct SpectrumCmd {
    CLI::App* sub = nullptr;
    Common common;
    ConstellationOpts c;
    WaveformOpts w;
    long long symbols = 40000;
    int segment = 64;
};

int run_spectrum(SpectrumCmd& s) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!s.common.preset.empty()) throw ConfigError("spectrum: no presets");
    const auto a = make_constellation(s.c, s.common.seed);
    const auto spec = to_spec(s.w);
    const auto est = psd_estimate(random_waveform(a, spec, s.symbols, RngSeed{s.common.seed}), s.segment);
    auto os = open_out(s.common.out);
    os << "freq,psd\n";
    for (std::size_t i = 0; i < est.freqs.size(); ++i) os << format_g17(est.freqs[i]) << ',' << format_g17(est.psd[i]) << '\n';
    json bw = json::object();
    for (const auto& [x, b] : est.bandwidth) {
        std::printf("B_%g = %.4f / T\n", x, b);
        bw[format_g17(x)] = b;
    }
    json cfg{{"constellation", constellation_json(s.c)}, {"waveform", waveform_json(s.w)}, {"symbols", s.symbols},
             {"segment_symbols", s.segment}};
    write_manifest(s.common.out, "spectrum", cfg, s.common.seed, seconds_since(t0), {{"bandwidth", bw}});
    return 0;
}

// ---------------------------------------------------------------------------
// capacity
// ---------------------------------------------------------------------------

struct CapacityCmd {
    CLI::App* sub = nullptr;
    Common common;
    ConstellationOpts c;
    double start = -5.0, stop = 25.0, step = 1.0;
    long long draws = 20000;
};

// grid in Es/sigma2; Eb/N0 follows from the achieved information rate
int run_capacity(CapacityCmd& k) {
    const auto t0 = std::chrono::steady_clock::now();
    if (k.common.preset == "fig1") {
        preset(k.sub, "--n", k.c.n, 3);
        preset(k.sub, "--M", k.c.m, 64);
        preset(k.sub, "--seed", k.common.seed, std::uint64_t{7});
    } else if (!k.common.preset.empty()) {
        throw ConfigError("capacity: unknown preset '" + k.common.preset + "'");
    }
    const auto a = make_constellation(k.c, k.common.seed);
    auto os = open_out(k.common.out);
    os << "snr_db,mi_bits,ebn0_db\n";
    for (double snr : grid(k.start, k.stop, k.step)) {
        const double sigma2 = a.es() / db_to_linear(snr);
        const double mi = mi_constellation(a, sigma2, k.draws, RngSeed{k.common.seed});
        const double eb = mi > 0.0 ? linear_to_db(ebn0_at_capacity(a.es(), mi, sigma2)) : std::nan("");
        os << format_g17(snr) << ',' << format_g17(mi) << ',' << format_g17(eb) << '\n';
        std::fprintf(stderr, "SNR %6.2f dB  I = %.4f bit  Eb/N0 %.3f dB\n", snr, mi, eb);
    }
    json cfg{{"constellation", constellation_json(k.c)}, {"snr_db", grid(k.start, k.stop, k.step)}, {"draws", k.draws},
             {"preset", k.common.preset}};
    write_manifest(k.common.out, "capacity", cfg, k.common.seed, seconds_since(t0));
    return 0;
}

// ---------------------------------------------------------------------------
// complexity
// ---------------------------------------------------------------------------

struct ComplexityCmd {
    CLI::App* sub = nullptr;
    Common common;
    std::string estimator = "va";
    long long m = 64;
    int nu = 2;
    int nu_max = 2;
    int n_nb = 4;
    int hyper = 4;
    bool write = false;
};

long long xi_for(const std::string& est, long long m, int nu, int nu_max, int nnb, int hyper) {
    switch (estimator_from_string(est)) {
        case Estimator::Symbolwise:
        case Estimator::Dfe: return m;
        case Estimator::Va:
        case Estimator::Ddfse: return xi_va(m, nu);
        case Estimator::Rsse: {
            if (nu < 2) throw ConfigError("complexity: RSSE needs nu >= 2");
            std::vector<long long> orders(static_cast<std::size_t>(nu), hyper);
            orders[0] = m;
            return xi_rsse(m, orders);
        }
        case Estimator::IterVa: {
            std::vector<std::pair<int, int>> passes;
            for (int i = 2; i <= nu_max; ++i) passes.emplace_back(nnb, i);
            return xi_iterative(m, passes);
        }
    }
    return 0;
}

int run_complexity(ComplexityCmd& c) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::pair<std::string, long long>> rows;
    if (c.common.preset == "table3") {
        rows = {{"va nu=1", xi_va(64, 1)},
                {"va nu=2", xi_va(64, 2)},
                {"rsse nu=2 K=4", xi_for("rsse", 64, 2, 0, 0, 4)},
                {"iter numax=2 nnb=4", xi_for("iter", 64, 0, 2, 4, 0)},
                {"iter numax=3 nnb=4", xi_for("iter", 64, 0, 3, 4, 0)}};
    } else if (c.common.preset.empty()) {
        rows = {{c.estimator, xi_for(c.estimator, c.m, c.nu, c.nu_max, c.n_nb, c.hyper)}};
    } else {
        throw ConfigError("complexity: unknown preset '" + c.common.preset + "'");
    }
    json out = json::array();
    for (const auto& [name, xi] : rows) {
        if (rows.size() == 1) std::printf("%lld\n", xi);
        else std::printf("%-20s %lld\n", name.c_str(), xi);
        out.push_back({{"estimator", name}, {"xi", xi}});
    }
    if (c.write || c.sub->get_option("--out")->count() > 0) {
        auto os = open_out(c.common.out);
        os << "estimator,xi\n";
        for (const auto& [name, xi] : rows) os << name << ',' << xi << '\n';
        json cfg{{"estimator", c.estimator}, {"M", c.m},       {"nu", c.nu},          {"numax", c.nu_max},
                 {"nnb", c.n_nb},           {"hyper", c.hyper}, {"preset", c.common.preset}};
        write_manifest(c.common.out, "complexity", cfg, c.common.seed, seconds_since(t0), {{"rows", out}});
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PSKH constellation and waveform experiments"};
    app.set_config("--config", "", "INI/TOML config file; command line flags override its values");
    app.set_version_flag("--version", std::string(PSKH_VERSION));
    app.require_subcommand(1);

    GenCmd gen;
    gen.sub = app.add_subcommand("gen", "Generate a constellation and print its distances");
    add_common(gen.sub, gen.common, "");
    add_constellation_opts(gen.sub, gen.c);
    gen.sub->add_option("--preset", gen.common.preset, "table1");

    SerCmd ser;
    ser.sub = app.add_subcommand("ser", "Monte Carlo symbol error rate");
    add_common(ser.sub, ser.common, "ser.csv");
    add_constellation_opts(ser.sub, ser.c);
    add_waveform_opts(ser.sub, ser.w);
    ser.sub->add_option("--preset", ser.common.preset, "fig2a, fig2a-{pm,kmc,eqpa,papsk}, fig3, fig4, fig6, fig7");
    ser.sub->add_option("--channel", ser.channel, "awgn or rayleigh")->capture_default_str();
    ser.sub->add_option("--estimator", ser.estimator, "symbolwise, va, dfe, ddfse, rsse, iter")->capture_default_str();
    ser.sub->add_option("--nu", ser.nu, "Trellis memory")->capture_default_str();
    ser.sub->add_option("--numax", ser.nu_max, "Last iterative VA memory")->capture_default_str();
    ser.sub->add_option("--nnb", ser.n_nb, "Iterative VA neighbours")->capture_default_str();
    ser.sub->add_option("--hyper", ser.hyper, "RSSE hypersymbol count")->capture_default_str();
    ser.sub->add_option("--tail", ser.tail, "Feedback intervals beyond the trellis (-1: model default)")->capture_default_str();
    ser.sub->add_option("--neighbors", ser.neighbors, "effective or original")
        ->check(CLI::IsMember({"effective", "original"}))
        ->capture_default_str();
    ser.sub->add_option("--start", ser.start, "First Eb/N0 in dB")->capture_default_str();
    ser.sub->add_option("--stop", ser.stop, "Last Eb/N0 in dB")->capture_default_str();
    ser.sub->add_option("--step", ser.step, "Eb/N0 step in dB")->capture_default_str();
    ser.sub->add_option("--ebn0", ser.points, "Explicit Eb/N0 points in dB (overrides the grid)")->delimiter(',');
    ser.sub->add_option("--min-errors", ser.min_errors, "Stop a point after this many errors")->capture_default_str();
    ser.sub->add_option("--max-symbols", ser.max_symbols, "Symbol budget per point")->capture_default_str();
    ser.sub->add_option("--frame", ser.frame, "Data symbols per frame")->capture_default_str();
    ser.sub->add_option("--batch", ser.batch, "Frames per batch")->capture_default_str();
    ser.sub->add_option("--workers", ser.workers, "Worker threads (0: PSKH_WORKERS or all cores)")->capture_default_str();
    ser.sub->add_option("--branch-cap", ser.branch_cap, "Refuse trellises with more branches per step")->capture_default_str();

    PasprCmd paspr;
    paspr.sub = app.add_subcommand("paspr", "Peak-to-average sum power ratio of a random waveform");
    add_common(paspr.sub, paspr.common, "paspr.csv");
    add_constellation_opts(paspr.sub, paspr.c);
    add_waveform_opts(paspr.sub, paspr.w);
    paspr.sub->add_option("--symbols", paspr.symbols, "Waveform length in symbols")->capture_default_str();
    paspr.sub->add_option("--preset", paspr.common.preset, "fig9");

    SpectrumCmd spec;
    spec.sub = app.add_subcommand("spectrum", "Welch PSD and fractional bandwidths");
    add_common(spec.sub, spec.common, "spectrum.csv");
    add_constellation_opts(spec.sub, spec.c);
    add_waveform_opts(spec.sub, spec.w);
    spec.sub->add_option("--symbols", spec.symbols, "Waveform length in symbols")->capture_default_str();
    spec.sub->add_option("--segment", spec.segment, "Welch segment length in symbols")->capture_default_str();
    spec.sub->add_option("--preset", spec.common.preset);

    CapacityCmd cap;
    cap.sub = app.add_subcommand("capacity", "Constellation-constrained mutual information");
    add_common(cap.sub, cap.common, "capacity.csv");
    add_constellation_opts(cap.sub, cap.c);
    cap.sub->add_option("--start", cap.start, "First Es/sigma2 in dB")->capture_default_str();
    cap.sub->add_option("--stop", cap.stop, "Last Es/sigma2 in dB")->capture_default_str();
    cap.sub->add_option("--step", cap.step, "Step in dB")->capture_default_str();
    cap.sub->add_option("--draws", cap.draws, "Noise draws per point")->capture_default_str();
    cap.sub->add_option("--preset", cap.common.preset, "fig1");

    ComplexityCmd cx;
    cx.sub = app.add_subcommand("complexity", "Trellis branches per step");
    add_common(cx.sub, cx.common, "complexity.csv");
    cx.sub->add_option("--estimator", cx.estimator, "symbolwise, va, dfe, ddfse, rsse, iter")->capture_default_str();
    cx.sub->add_option("--M", cx.m, "Constellation size")->capture_default_str();
    cx.sub->add_option("--nu", cx.nu, "Trellis memory")->capture_default_str();
    cx.sub->add_option("--numax", cx.nu_max, "Last iterative VA memory")->capture_default_str();
    cx.sub->add_option("--nnb", cx.n_nb, "Iterative VA neighbours")->capture_default_str();
    cx.sub->add_option("--hyper", cx.hyper, "RSSE hypersymbol count")->capture_default_str();
    cx.sub->add_option("--preset", cx.common.preset, "table3");
    cx.sub->add_flag("--write", cx.write, "Also write CSV and manifest");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*gen.sub) return run_gen(gen);
        if (*ser.sub) return run_ser(ser);
        if (*paspr.sub) return run_paspr(paspr);
        if (*spec.sub) return run_spectrum(spec);
        if (*cap.sub) return run_capacity(cap);
        if (*cx.sub) return run_complexity(cx);
    } catch (const InfeasibleTrellis& e) {
        std::fprintf(stderr, "refused: required Xi = %lld branches per step (%s)\n", e.required(), e.what());
        return 3;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
