#include "ztids/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "ztids/error.hpp"

namespace ztids::synth {

namespace {

constexpr std::array<const char*, 32> kColumns = {
    "Destination Port",       "Protocol",
    "Flow Duration",          "Total Fwd Packets",
    "Total Backward Packets", "Total Length of Fwd Packets",
    "Total Length of Bwd Packets", "Fwd Packet Length Max",
    "Fwd Packet Length Mean", "Bwd Packet Length Max",
    "Bwd Packet Length Mean", "Flow Bytes/s",
    "Flow Packets/s",         "Flow IAT Mean",
    "Flow IAT Std",           "Flow IAT Max",
    "Fwd IAT Total",          "Bwd IAT Total",
    "Fwd PSH Flags",          "SYN Flag Count",
    "ACK Flag Count",         "URG Flag Count",
    "Down/Up Ratio",          "Average Packet Size",
    "Avg Fwd Segment Size",   "Subflow Fwd Packets",
    "Init_Win_bytes_forward", "Init_Win_bytes_backward",
    "act_data_pkt_fwd",       "min_seg_size_forward",
    "Active Mean",            "Idle Mean"};

enum class Family { Web, Dns, Bulk, Dos, PortScan, Ddos, Patator, WebAttack };

struct Shape {
    const char* label;
    const char* protocol;
    double fwd_pkts, bwd_pkts;        // Poisson means (plus one)
    double fwd_len, bwd_len;          // lognormal medians, bytes
    double len_sigma;
    double duration_us, dur_sigma;    // lognormal median and spread
    double syn, ack, psh, urg;        // flag probabilities
    std::array<int, 4> win_fwd;
    // Tool-generated traffic answers with a few fixed server windows; all
    // zeros means a lognormal window (benign hosts).
    std::array<int, 4> win_bwd;
};

const Shape& shape_of(Family f) {
    static const Shape shapes[] = {
        {"BENIGN", "TCP", 8, 10, 90, 700, 0.9, 2e5, 2.2, 0.02, 0.9, 0.4, 0.01, {8192, 29200, 65535, 5840}, {}},
        {"BENIGN", "UDP", 0.5, 0.5, 45, 160, 0.4, 3e4, 1.2, 0.0, 0.0, 0.0, 0.0, {-1, -1, -1, -1}, {}},
        {"BENIGN", "TCP", 30, 25, 400, 900, 1.0, 3e6, 1.8, 0.05, 0.95, 0.6, 0.0, {29200, 65535, 14600, 8192}, {}},
        {"DoS Hulk", "TCP", 4, 3, 60, 1800, 0.3, 1e6, 0.6, 0.01, 0.8, 0.7, 0.0, {29200, 251, 29200, 251}, {235, 235, 229, 235}},
        {"PortScan", "TCP", 0.1, 0.1, 1, 3, 1.0, 60, 1.0, 0.9, 0.1, 0.0, 0.0, {1024, 29200, 1024, 2048}, {0, 0, 0, 0}},
        {"DDoS", "TCP", 3, 4, 12, 2500, 0.3, 1.5e6, 0.6, 0.02, 0.6, 0.3, 0.0, {256, 8192, 256, 256}, {229, 229, 229, 235}},
        {"FTP-Patator", "TCP", 12, 14, 25, 60, 0.3, 5e6, 0.5, 0.05, 0.95, 0.8, 0.0, {29200, 29200, 237, 29200}, {227, 227, 227, 227}},
        {"Web Attack", "TCP", 9, 9, 160, 650, 0.5, 4e6, 0.8, 0.03, 0.9, 0.5, 0.02, {29200, 8192, 29200, 65535}, {235, 235, 28960, 235}},
    };
    return shapes[static_cast<int>(f)];
}

int port_of(Family f, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> any(1, 65535), eph(32768, 60999), pick(0, 3);
    switch (f) {
        case Family::Web: return std::array{443, 80, 443, 8080}[static_cast<std::size_t>(pick(rng))];
        case Family::Dns: return 53;
        case Family::Bulk: return std::array{22, 445, 21, 139}[static_cast<std::size_t>(pick(rng))];
        case Family::Dos:
        case Family::Ddos:
        case Family::WebAttack: return 80;
        case Family::PortScan: return any(rng);
        case Family::Patator: return pick(rng) < 2 ? 21 : 22;
    }
    return eph(rng);
}

std::string fmt(double v) {
    if (std::isinf(v)) return "Infinity";
    if (std::isnan(v)) return "NaN";
    std::ostringstream s;
    s.precision(8);
    s << v;
    return s.str();
}

}  // namespace

std::string flow_csv(const FlowOptions& opts) {
    require(opts.attack_ratio >= 0.0 && opts.attack_ratio <= 1.0, ErrorCode::InvalidArgument,
            "attack_ratio must be in [0,1]");
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    std::ostringstream out;
    for (std::size_t c = 0; c < kColumns.size(); ++c) out << (c ? "," : "") << kColumns[c];
    out << ",Label\n";

    const Family benign[] = {Family::Web, Family::Web, Family::Web, Family::Dns, Family::Dns, Family::Bulk};
    const Family attacks[] = {Family::Dos, Family::Dos, Family::Ddos, Family::Ddos, Family::PortScan,
                              Family::PortScan, Family::Patator, Family::WebAttack};
    for (std::size_t r = 0; r < opts.rows; ++r) {
        const bool attack = u(rng) < opts.attack_ratio;
        const Family fam = attack ? attacks[rng() % std::size(attacks)] : benign[rng() % std::size(benign)];
        const Shape& s = shape_of(fam);
        const auto lognormal = [&](double median, double sigma) { return median * std::exp(sigma * g(rng)); };

        const double fwd = 1.0 + static_cast<double>(std::poisson_distribution<int>(s.fwd_pkts)(rng));
        const double bwd = static_cast<double>(std::poisson_distribution<int>(s.bwd_pkts)(rng)) + (fam == Family::PortScan ? 0.0 : 1.0);
        const double fwd_mean = fam == Family::PortScan && u(rng) < 0.7 ? 0.0 : std::round(lognormal(s.fwd_len, s.len_sigma));
        const double bwd_mean = bwd > 0 ? std::round(lognormal(s.bwd_len, s.len_sigma)) : 0.0;
        const double fwd_max = std::round(fwd_mean * (1.0 + 0.6 * u(rng) * (fwd > 1)));
        const double bwd_max = std::round(bwd_mean * (1.0 + 0.8 * u(rng) * (bwd > 1)));
        const double fwd_total = fwd_mean * fwd, bwd_total = bwd_mean * bwd;

        double duration = std::round(lognormal(s.duration_us, s.dur_sigma));
        if (u(rng) < 0.01) duration = 0.0;  // single-timestamp flows have undefined rates
        const double seconds = duration / 1e6;
        const double bytes_rate = seconds > 0 ? (fwd_total + bwd_total) / seconds : INFINITY;
        const double pkt_rate = seconds > 0 ? (fwd + bwd) / seconds : INFINITY;
        const double gaps = std::max(1.0, fwd + bwd - 1.0);
        const double iat_mean = duration / gaps;
        const double iat_std = iat_mean * (0.2 + 1.5 * u(rng));
        const double iat_max = std::min(duration, iat_mean + 2.0 * iat_std);
        const double fwd_iat = duration * (fwd > 1 ? 0.5 + 0.5 * u(rng) : 0.0);
        const double bwd_iat = duration * (bwd > 1 ? 0.4 + 0.5 * u(rng) : 0.0);
        const double avg_pkt = (fwd_total + bwd_total) / (fwd + bwd);
        const bool tcp = std::string(s.protocol) == "TCP";
        const double win_fwd = tcp ? static_cast<double>(s.win_fwd[rng() % 4]) : -1.0;
        const bool fixed_bwd = s.win_bwd != std::array<int, 4>{};
        const double win_bwd = !tcp || bwd <= 0 ? -1.0
                               : fixed_bwd      ? static_cast<double>(s.win_bwd[rng() % 4])
                                                : std::round(lognormal(20000, 1.2));
        const double active = u(rng) < 0.8 ? 0.0 : lognormal(duration / 4 + 1, 0.8);
        const double idle = duration > 5e6 ? lognormal(duration / 2, 0.3) : 0.0;

        const double recorded_duration = u(rng) < 0.001 ? -1.0 : duration;
        const double values[] = {
            static_cast<double>(port_of(fam, rng)),
            0.0,  // protocol, written as text below
            recorded_duration, fwd, bwd, fwd_total, bwd_total, fwd_max, fwd_mean, bwd_max, bwd_mean, bytes_rate,
            pkt_rate, iat_mean, iat_std, iat_max, fwd_iat, bwd_iat,
            static_cast<double>(u(rng) < s.psh), static_cast<double>(u(rng) < s.syn), static_cast<double>(u(rng) < s.ack),
            static_cast<double>(u(rng) < s.urg), fwd > 0 ? std::floor(bwd / fwd) : 0.0, avg_pkt, fwd_mean, fwd, win_fwd,
            win_bwd, std::max(0.0, fwd - 1.0 - static_cast<double>(rng() % 2)), tcp ? 20.0 : 8.0, active, idle};
        static_assert(std::size(values) == kColumns.size());

        std::string label = s.label;
        if (u(rng) < opts.label_noise) label = attack ? "BENIGN" : "DoS Hulk";
        for (std::size_t c = 0; c < kColumns.size(); ++c) {
            if (c) out << ',';
            if (c == 1) {
                out << (fam == Family::PortScan && u(rng) < 0.05 ? "ICMP" : s.protocol);
            } else {
                out << fmt(values[c]);
            }
        }
        out << ',' << label << '\n';
    }
    return out.str();
}

Dataset flows(const FlowOptions& opts) { return parse_csv(flow_csv(opts)); }

Dataset drift_stream(const DriftStreamOptions& opts) {
    require(opts.n_features >= 3, ErrorCode::InvalidArgument, "drift stream needs at least three features");
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> jitter(0.0, opts.proxy_noise);
    const std::size_t n_noise = std::min<std::size_t>(2, opts.n_features - 3);
    const std::size_t first_noise = opts.n_features - n_noise;
    Matrix x(opts.rows, opts.n_features);
    std::vector<int> y(opts.rows);
    for (std::size_t i = 0; i < opts.rows; ++i) {
        for (std::size_t c = 0; c < 3; ++c) x(i, c) = u(rng);
        for (std::size_t c = 3; c < first_noise; ++c) x(i, c) = std::clamp(x(i, (c - 3) % 3) + jitter(rng), 0.0, 1.0);
        for (std::size_t c = first_noise; c < opts.n_features; ++c) x(i, c) = u(rng);
        int label = (x(i, 0) > 0.6 || (x(i, 1) < 0.25 && x(i, 2) > 0.5)) ? 1 : 0;
        if (i >= opts.drift_at) label = 1 - label;
        if (u(rng) < opts.label_noise) label = 1 - label;
        y[i] = label;
    }
    return Dataset::from_matrix(std::move(x), std::move(y));
}

}  // namespace ztids::synth
