#include "ztids/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <unistd.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>
#include <toml++/toml.hpp>

#include "ztids/adversarial.hpp"
#include "ztids/automl.hpp"
#include "ztids/dataset.hpp"
#include "ztids/error.hpp"
#include "ztids/online.hpp"
#include "ztids/parallel.hpp"
#include "ztids/seed.hpp"
#include "ztids/synth.hpp"

namespace ztids::cli {
namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Settings {
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    std::size_t max_rows = 0;  // 0 keeps every row
    std::string label_column = "Label";

    std::size_t k_folds = 5;
    bool feature_selection = true;
    double pearson_threshold = 0.9;
    std::size_t top_k = 2;
    std::size_t pso_swarm = 20;
    std::size_t pso_iters = 30;
    std::size_t fe_pso_swarm = autofe::small_pso().swarm;
    std::size_t fe_pso_iters = autofe::small_pso().iters;
    double outlier_threshold = 0.01;
    bool balance = true;

    std::size_t window = 500;
    std::size_t online_top_k = 2;
    std::size_t online_pso_swarm = 4;
    std::size_t online_pso_iters = 4;
    std::vector<std::string> always_tune;

    std::string attack = "dta";
    adversarial::AttackParams attack_params;
    double test_fraction = 0.2;
    double adversarial_fraction = 0.25;
};

json settings_json(const Settings& s) {
    return {{"seed", s.seed},
            {"max_rows", s.max_rows},
            {"label_column", s.label_column},
            {"offline",
             {{"k_folds", s.k_folds},
              {"feature_selection", s.feature_selection},
              {"pearson_threshold", s.pearson_threshold},
              {"top_k", s.top_k},
              {"pso_swarm", s.pso_swarm},
              {"pso_iters", s.pso_iters},
              {"fe_pso_swarm", s.fe_pso_swarm},
              {"fe_pso_iters", s.fe_pso_iters},
              {"outlier_threshold", s.outlier_threshold},
              {"balance", s.balance}}},
            {"online",
             {{"window", s.window},
              {"top_k", s.online_top_k},
              {"pso_swarm", s.online_pso_swarm},
              {"pso_iters", s.online_pso_iters},
              {"always_tune", s.always_tune}}},
            {"attack",
             {{"attack", s.attack},
              {"eps", s.attack_params.eps},
              {"alpha", s.attack_params.alpha},
              {"iters", s.attack_params.iters},
              {"offset", s.attack_params.offset},
              {"test_fraction", s.test_fraction},
              {"adversarial_fraction", s.adversarial_fraction}}}};
}

template <class T>
void take(const toml::table& t, std::string_view section, std::string_view key, T& dst) {
    const auto node = t[section][key];
    if (!node) return;
    if constexpr (std::is_same_v<T, bool>) {
        if (auto v = node.template value<bool>()) return void(dst = *v);
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (auto v = node.template value<std::string>()) return void(dst = *v);
    } else if constexpr (std::is_floating_point_v<T>) {
        if (auto v = node.template value<double>()) return void(dst = *v);
    } else {
        if (auto v = node.template value<std::int64_t>(); v && *v >= 0) return void(dst = static_cast<T>(*v));
    }
    throw UsageError("config: bad value for " + std::string(section) + "." + std::string(key));
}

void load_config(const std::filesystem::path& path, Settings& s) {
    toml::table t;
    try {
        t = toml::parse_file(path.string());
    } catch (const toml::parse_error& e) {
        throw UsageError("config " + path.string() + ": " + std::string(e.description()));
    }
    take(t, "run", "seed", s.seed);
    take(t, "run", "threads", s.threads);
    take(t, "run", "max_rows", s.max_rows);
    take(t, "run", "label_column", s.label_column);
    take(t, "offline", "k_folds", s.k_folds);
    take(t, "offline", "feature_selection", s.feature_selection);
    take(t, "offline", "pearson_threshold", s.pearson_threshold);
    take(t, "offline", "top_k", s.top_k);
    take(t, "offline", "pso_swarm", s.pso_swarm);
    take(t, "offline", "pso_iters", s.pso_iters);
    take(t, "offline", "fe_pso_swarm", s.fe_pso_swarm);
    take(t, "offline", "fe_pso_iters", s.fe_pso_iters);
    take(t, "offline", "outlier_threshold", s.outlier_threshold);
    take(t, "offline", "balance", s.balance);
    take(t, "online", "window", s.window);
    take(t, "online", "top_k", s.online_top_k);
    take(t, "online", "pso_swarm", s.online_pso_swarm);
    take(t, "online", "pso_iters", s.online_pso_iters);
    if (const auto* arr = t["online"]["always_tune"].as_array()) {
        s.always_tune.clear();
        for (const auto& v : *arr) {
            const auto str = v.value<std::string>();
            if (!str) throw UsageError("config: online.always_tune must hold strings");
            s.always_tune.push_back(*str);
        }
    }
    take(t, "attack", "attack", s.attack);
    take(t, "attack", "eps", s.attack_params.eps);
    take(t, "attack", "alpha", s.attack_params.alpha);
    take(t, "attack", "iters", s.attack_params.iters);
    take(t, "attack", "offset", s.attack_params.offset);
    take(t, "attack", "test_fraction", s.test_fraction);
    take(t, "attack", "adversarial_fraction", s.adversarial_fraction);
}

// Flag values are held as optionals and applied over the config file.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads, max_rows;
    std::optional<std::string> label_column;
    std::optional<std::size_t> k_folds, pso_swarm, pso_iters;
    bool no_feature_selection = false;
    std::optional<std::size_t> window;
    std::vector<std::string> always_tune;
    std::optional<std::string> attack;
    std::optional<double> eps, alpha, offset;
    std::optional<std::size_t> iters;

    void apply(Settings& s, bool online) const {
        if (seed) s.seed = *seed;
        if (threads) s.threads = *threads;
        if (max_rows) s.max_rows = *max_rows;
        if (label_column) s.label_column = *label_column;
        if (k_folds) s.k_folds = *k_folds;
        if (pso_swarm) (online ? s.online_pso_swarm : s.pso_swarm) = *pso_swarm;
        if (pso_iters) (online ? s.online_pso_iters : s.pso_iters) = *pso_iters;
        if (no_feature_selection) s.feature_selection = false;
        if (window) s.window = *window;
        if (!always_tune.empty()) s.always_tune = always_tune;
        if (attack) s.attack = *attack;
        if (eps) s.attack_params.eps = *eps;
        if (alpha) s.attack_params.alpha = *alpha;
        if (offset) s.attack_params.offset = *offset;
        if (iters) s.attack_params.iters = *iters;
    }
};

struct Common {
    std::string data;
    std::optional<std::size_t> synthetic;
    std::string config;
    Overrides flags;
};

void add_common(CLI::App* cmd, Common& c) {
    auto* data = cmd->add_option("--data", c.data, "Flow CSV with a label column")->check(CLI::ExistingFile);
    auto* synth = cmd->add_option("--synthetic", c.synthetic, "Generate this many synthetic flows instead of --data");
    data->excludes(synth);
    cmd->add_option("--config", c.config, "TOML settings file; flags take precedence")->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.flags.seed, "Seed for every random choice");
    cmd->add_option("--threads", c.flags.threads, "Worker threads (0 = logical cores)");
    cmd->add_option("--max-rows", c.flags.max_rows, "Stratified subsample to at most this many rows");
    cmd->add_option("--label-column", c.flags.label_column, "Name of the label column");
}

void add_attack_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--attack", o.attack, "dta, fgsm or bim")
        ->transform(CLI::IsMember({"dta", "fgsm", "bim"}, CLI::ignore_case));
    cmd->add_option("--eps", o.eps, "FGSM/BIM max-norm budget");
    cmd->add_option("--alpha", o.alpha, "BIM step size");
    cmd->add_option("--iters", o.iters, "BIM iterations");
    cmd->add_option("--offset", o.offset, "DTA distance past a threshold");
}

Settings resolve(const Common& c, bool online) {
    Settings s;
    if (!c.config.empty()) load_config(c.config, s);
    c.flags.apply(s, online);
    if (c.data.empty() && !c.synthetic) throw UsageError("one of --data or --synthetic is required");
    try {
        adversarial::attack_from_string(s.attack);
    } catch (const Error&) {
        throw UsageError("unknown attack '" + s.attack + "' (expected dta, fgsm or bim)");
    }
    return s;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

Dataset load_input(const Common& c, const Settings& s) {
    Dataset ds;
    if (c.synthetic) {
        spdlog::info("generating {} synthetic flows", *c.synthetic);
        CsvOptions opts;
        opts.label_column = s.label_column;
        ds = parse_csv(synth::flow_csv({.rows = *c.synthetic, .seed = s.seed}), opts);
    } else {
        spdlog::info("loading {}", c.data);
        CsvOptions opts;
        opts.label_column = s.label_column;
        ds = load_csv(c.data, opts);
    }
    if (s.max_rows && ds.rows() > s.max_rows) {
        ds = stratified_subsample(ds, s.max_rows, mix_seed(s.seed, 101));
        spdlog::info("subsampled to {} rows", ds.rows());
    }
    return ds;
}

json digest_json(const Dataset& ds) {
    const auto d = digest(ds);
    return {{"rows", d.rows}, {"cols", d.cols}, {"attack_ratio", d.attack_ratio}, {"content_hash", hex64(d.content_hash)}};
}

json make_report(std::string_view command, const Common& c, const Settings& s, const Dataset& ds, json result,
                 double seconds) {
    json input = c.synthetic ? json{{"synthetic_rows", *c.synthetic}} : json{{"path", c.data}};
    json report{{"tool", "ztids"},
                {"version", kToolVersion},
                {"command", command},
                {"input", input},
                {"config", settings_json(s)},
                {"dataset", digest_json(ds)},
                {"seeds", {{"seed", s.seed}}},
                {"result", std::move(result)}};
    report["runtime"] = {{"threads", num_threads()}, {"total_seconds", seconds}};
    report["content_hash"] = content_hash(report);
    return report;
}

void write_json(const std::filesystem::path& p, const json& j) {
    write_atomic(p, j.dump(2) + "\n");
    spdlog::info("wrote {}", p.string());
}

optimize::OfflineConfig offline_config(const Settings& s) {
    optimize::OfflineConfig cfg;
    cfg.k_folds = s.k_folds;
    cfg.seed = s.seed;
    cfg.autodp.outlier_threshold = s.outlier_threshold;
    cfg.autodp.balance = s.balance;
    cfg.feature_selection = s.feature_selection;
    cfg.pearson_threshold = s.pearson_threshold;
    cfg.autofe.pso.swarm = s.fe_pso_swarm;
    cfg.autofe.pso.iters = s.fe_pso_iters;
    cfg.top_k = s.top_k;
    cfg.pso.swarm = s.pso_swarm;
    cfg.pso.iters = s.pso_iters;
    return cfg;
}

int cmd_offline(const Common& c, const std::string& report_path, const std::string& model_path) {
    const Settings s = resolve(c, false);
    set_num_threads(s.threads);
    const auto ds = load_input(c, s);
    const auto [r, secs] = timed([&] { return optimize::run_automl_offline(ds, offline_config(s)); });
    spdlog::info("winner {} with CV F1 {:.5f}", models::to_string(r.winner.kind), r.winner_cv.mean.f1);
    write_atomic(model_path, optimize::serialize(r.pipeline));
    spdlog::info("wrote {}", model_path);
    write_json(report_path, make_report("automl-offline", c, s, ds, optimize::to_json(r), secs));
    return kOk;
}

int cmd_online(const Common& c, const std::string& report_path, const std::string& curves_path) {
    const Settings s = resolve(c, true);
    set_num_threads(s.threads);
    const auto ds = load_input(c, s);
    online::OnlineConfig cfg;
    cfg.seed = s.seed;
    cfg.window = s.window;
    cfg.top_k = s.online_top_k;
    cfg.pso.swarm = s.online_pso_swarm;
    cfg.pso.iters = s.online_pso_iters;
    cfg.outlier_threshold = s.outlier_threshold;
    cfg.redundancy_filter = s.feature_selection;
    cfg.pearson_threshold = s.pearson_threshold;
    for (const auto& k : s.always_tune) cfg.always_tune.push_back(online::online_kind_from_string(k));
    const auto [r, secs] = timed([&] { return online::run_automl_online(ds, cfg); });
    spdlog::info("winner {} with prequential accuracy {:.5f}", online::to_string(r.winner), r.winner_accuracy);

    std::vector<std::pair<std::string, const online::PrequentialCurve*>> curves;
    for (const auto& [name, curve] : r.curves) curves.emplace_back(name, &curve);
    std::ostringstream csv;
    online::write_curves_csv(curves, csv);
    write_atomic(curves_path, csv.str());
    spdlog::info("wrote {}", curves_path);
    write_json(report_path,
               make_report("automl-online", c, s, ds, online::to_json(r), secs));
    return kOk;
}

int cmd_attack(const Common& c, const std::string& model_path, const std::string& out_path,
               const std::string& report_path) {
    const Settings s = resolve(c, false);
    set_num_threads(s.threads);
    const auto raw = load_input(c, s);
    const auto kind = adversarial::attack_from_string(s.attack);
    const auto& p = s.attack_params;

    Dataset rows;
    models::TrainedModel victim;
    adversarial::FeatureBox box;
    json victim_info;
    Dataset surrogate_train;  // rows the MLP surrogate of a gradient attack is fitted on
    if (!model_path.empty()) {
        std::ifstream in(model_path, std::ios::binary);
        if (!in) fail(ErrorCode::Io, "cannot open " + model_path);
        const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
        const auto pipeline = optimize::deserialize_pipeline(bytes);
        rows = pipeline.transform(raw);
        victim = pipeline.model;
        for (const auto& [lo, hi] : pipeline.preprocess.feature_box) {
            box.lo.push_back(lo);
            box.hi.push_back(hi);
        }
        victim_info = {{"source", "pipeline"}, {"kind", models::to_string(victim.kind)}};
        surrogate_train = rows;
    } else {
        // Fit a tuned IDS on a training split and attack the held-out rows.
        const auto [train_idx, test_idx] = stratified_split(raw.labels, s.test_fraction, mix_seed(s.seed, 1));
        autodp::AutoDpOptions dp;
        dp.outlier_threshold = s.outlier_threshold;
        dp.balance = s.balance;
        dp.adasyn.seed = mix_seed(s.seed, 2);
        const auto prepared = autodp::fit_preprocess(raw.subset(train_idx), dp);
        rows = autodp::apply_preprocess(prepared.report, raw.subset(test_idx));
        box = adversarial::FeatureBox::of(prepared.train.features);
        victim = models::fit(adversarial::tuned_ids_config(), prepared.train, mix_seed(s.seed, 3));
        victim_info = {{"source", "tuned"}, {"kind", models::to_string(victim.kind)}};
        surrogate_train = prepared.train;
    }

    adversarial::AdversarialBatch batch;
    const double attack_seconds = timed([&] {
        if (kind == adversarial::AttackKind::DTA) {
            batch = adversarial::dta(victim, rows.features, rows.labels, p.offset, box);
            return;
        }
        const auto sur = models::fit(models::default_config(models::ModelKind::MLP), surrogate_train, mix_seed(s.seed, 5));
        batch = kind == adversarial::AttackKind::FGSM
                    ? adversarial::fgsm(sur, rows.features, rows.labels, p.eps, box)
                    : adversarial::bim(sur, rows.features, rows.labels, p.eps, p.alpha, p.iters, box);
    });

    Scores clean = score(rows.labels, models::predict(victim, rows.features));
    Scores attacked = score(batch.labels, models::predict(victim, batch.adv));
    attacked.seconds = attack_seconds;
    spdlog::info("{}: F1 {:.5f} -> {:.5f} on {} rows", s.attack, clean.f1, attacked.f1, batch.rows());

    Dataset adv = Dataset::from_matrix(batch.adv, batch.labels, rows.feature_names);
    std::ostringstream csv;
    write_csv(adv, csv, s.label_column);
    write_atomic(out_path, csv.str());
    spdlog::info("wrote {}", out_path);

    const json result{{"attack", adversarial::to_string(kind)},
                      {"params", ztids::to_json(batch.params)},
                      {"victim", victim_info},
                      {"rows", batch.rows()},
                      {"flipped", batch.flipped_count()},
                      {"clean", to_json(clean)},
                      {"under_attack", to_json(attacked)}};
    write_json(report_path, make_report("attack", c, s, raw, result, attack_seconds));
    return kOk;
}

int cmd_exercise(const Common& c, const std::string& out_path) {
    const Settings s = resolve(c, false);
    set_num_threads(s.threads);
    const auto raw = load_input(c, s);
    adversarial::ExerciseConfig cfg;
    cfg.attack = adversarial::attack_from_string(s.attack);
    cfg.params = s.attack_params;
    cfg.seed = s.seed;
    cfg.test_fraction = s.test_fraction;
    cfg.adversarial_fraction = s.adversarial_fraction;
    cfg.autodp.outlier_threshold = s.outlier_threshold;
    cfg.autodp.balance = s.balance;
    const auto [r, secs] = timed([&] { return adversarial::run_defense_exercise(raw, cfg); });
    spdlog::info("baseline F1 {:.5f}, under attack {:.5f}, detector {:.5f}, recovered {:.5f}", r.baseline.f1,
                 r.under_attack.f1, r.detector.f1, r.recovered.f1);
    write_json(out_path, make_report("exercise", c, s, raw, adversarial::to_json(r), secs));
    return kOk;
}

int cmd_report(const std::string& in_path, std::ostream& out) {
    std::ifstream in(in_path);
    if (!in) fail(ErrorCode::Io, "cannot open " + in_path);
    json report;
    try {
        report = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::CorruptModel, in_path + " is not JSON: " + e.what());
    }
    out << render_table(report);
    return kOk;
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
    auto logger = std::make_shared<spdlog::logger>("ztids", sink);
    logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
    auto level = spdlog::level::info;
    if (const char* env = std::getenv("ZTIDS_LOG"); env && *env) {
        level = spdlog::level::from_str(env);
        // from_str maps unknown names to off; only honor real names.
        if (level == spdlog::level::off && std::string_view(env) != "off") level = spdlog::level::info;
    }
    logger->set_level(level);
    return logger;
}

// Row cells as percentages or "-" when a block lacks the metric.
struct Row {
    std::string stage;
    std::optional<double> acc, prec, rec, f1, secs;
};

std::optional<double> num(const json& j, const char* key) {
    if (j.contains(key) && j.at(key).is_number()) return j.at(key).get<double>();
    return std::nullopt;
}

Row block_row(std::string stage, const json& b) {
    return {std::move(stage), num(b, "accuracy"), num(b, "precision"), num(b, "recall"), num(b, "f1"), num(b, "seconds")};
}

}  // namespace

std::string content_hash(const json& report) {
    json hashed = report;
    hashed.erase("content_hash");
    hashed.erase("runtime");
    const std::function<void(json&)> strip = [&](json& j) {
        if (j.is_object()) {
            for (auto it = j.begin(); it != j.end();) {
                const auto& k = it.key();
                if (k == "seconds" || k == "timing" || k.ends_with("_seconds"))
                    it = j.erase(it);
                else
                    strip(*it++);
            }
        } else if (j.is_array()) {
            for (auto& e : j) strip(e);
        }
    };
    strip(hashed);
    return hex64(fnv1a(hashed.dump()));
}

void write_atomic(const std::filesystem::path& path, std::string_view bytes) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::Io, "cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) fail(ErrorCode::Io, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        fail(ErrorCode::Io, "cannot rename onto " + path.string() + ": " + ec.message());
    }
}

std::string render_table(const json& report) {
    std::vector<Row> rows;
    const std::string command = report.value("command", "");
    const json& r = report.contains("result") ? report.at("result") : report;
    if (command == "automl-offline") {
        for (const auto& e : r.at("model_selection"))
            rows.push_back({"default " + e.at("kind").get<std::string>(), std::nullopt, std::nullopt, std::nullopt,
                            (1.0 - e.at("objective").get<double>()) * 100.0, num(e, "seconds")});
        auto win = block_row("optimized " + r.at("winner").at("kind").get<std::string>(), r.at("cv_metrics"));
        if (r.contains("timing")) win.secs = num(r.at("timing"), "final_fit_seconds");
        rows.push_back(std::move(win));
    } else if (command == "automl-online") {
        for (const auto& cv : r.at("curves"))
            rows.push_back({cv.at("learner").get<std::string>(), num(cv, "final_accuracy"), std::nullopt, std::nullopt,
                            std::nullopt, num(cv, "seconds")});
    } else if (command == "attack") {
        rows.push_back(block_row("clean", r.at("clean")));
        rows.push_back(block_row("under attack", r.at("under_attack")));
    } else if (command == "exercise") {
        for (const char* k : {"baseline", "under_attack", "under_attack_mixed", "detector", "recovered"})
            rows.push_back(block_row(k, r.at(k)));
    } else {
        fail(ErrorCode::InvalidArgument, "unknown report command '" + command + "'");
    }

    std::size_t width = 5;
    for (const auto& row : rows) width = std::max(width, row.stage.size());
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(width)) << "Stage" << std::right;
    for (const char* h : {"Accuracy", "Precision", "Recall", "F1", "Time (s)"}) os << std::setw(11) << h;
    os << '\n';
    const auto cell = [&](const std::optional<double>& v, int precision) {
        if (v)
            os << std::setw(11) << std::fixed << std::setprecision(precision) << *v;
        else
            os << std::setw(11) << "-";
    };
    for (const auto& row : rows) {
        os << std::left << std::setw(static_cast<int>(width)) << row.stage << std::right;
        cell(row.acc, 3);
        cell(row.prec, 3);
        cell(row.rec, 3);
        cell(row.f1, 3);
        cell(row.secs, 2);
        os << '\n';
    }
    return os.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    auto logger = make_logger(err);
    const auto previous = spdlog::default_logger();
    spdlog::set_default_logger(logger);
    struct Restore {
        std::shared_ptr<spdlog::logger> prev;
        ~Restore() { spdlog::set_default_logger(prev); }
    } restore{previous};

    CLI::App app{"Intrusion-detection AutoML, online learning and adversarial defense"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    Common off, onl, atk, exr;
    std::string off_report = "report.json", off_model = "model.json";
    auto* offline = app.add_subcommand("automl-offline", "Model selection and tuning on a batch dataset");
    add_common(offline, off);
    offline->add_option("--report", off_report, "Run report path");
    offline->add_option("--model", off_model, "Fitted pipeline path");
    offline->add_option("--k-folds", off.flags.k_folds, "Cross-validation folds");
    offline->add_option("--pso-swarm", off.flags.pso_swarm, "PSO particles");
    offline->add_option("--pso-iters", off.flags.pso_iters, "PSO iterations");
    offline->add_flag("--no-feature-selection", off.flags.no_feature_selection, "Skip the Pearson filter and RFE");

    std::string onl_report = "report.json", onl_curves = "curves.csv";
    auto* onl_cmd = app.add_subcommand("automl-online", "Prequential selection and tuning of stream learners");
    add_common(onl_cmd, onl);
    onl_cmd->add_option("--report", onl_report, "Run report path");
    onl_cmd->add_option("--out", onl_curves, "Prequential curves CSV path");
    onl_cmd->add_option("--window", onl.flags.window, "Windowed-accuracy width");
    onl_cmd->add_option("--pso-swarm", onl.flags.pso_swarm, "PSO particles");
    onl_cmd->add_option("--pso-iters", onl.flags.pso_iters, "PSO iterations");
    onl_cmd->add_option("--always-tune", onl.flags.always_tune, "Kinds tuned besides the top ones (HT, KNN-ADWIN, ARF, SRP)");

    std::string atk_model, atk_out = "adversarial.csv", atk_report = "attack.json";
    auto* atk_cmd = app.add_subcommand("attack", "Generate adversarial rows against an IDS");
    add_common(atk_cmd, atk);
    add_attack_flags(atk_cmd, atk.flags);
    atk_cmd->add_option("--model", atk_model, "Pipeline from automl-offline to attack")->check(CLI::ExistingFile);
    atk_cmd->add_option("--out", atk_out, "Adversarial rows CSV path");
    atk_cmd->add_option("--report", atk_report, "Attack metrics path");

    std::string exr_out = "exercise.json";
    auto* exr_cmd = app.add_subcommand("exercise", "Attack, detect, filter and retrain");
    add_common(exr_cmd, exr);
    add_attack_flags(exr_cmd, exr.flags);
    exr_cmd->add_option("--out", exr_out, "Exercise report path");

    std::string report_in;
    auto* rep_cmd = app.add_subcommand("report", "Print a run report as a table");
    rep_cmd->add_option("--in", report_in, "Report JSON")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return kUsage;
    }

    try {
        if (offline->parsed()) return cmd_offline(off, off_report, off_model);
        if (onl_cmd->parsed()) return cmd_online(onl, onl_report, onl_curves);
        if (atk_cmd->parsed()) return cmd_attack(atk, atk_model, atk_out, atk_report);
        if (exr_cmd->parsed()) return cmd_exercise(exr, exr_out);
        return cmd_report(report_in, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n";
        err << app.get_subcommands().front()->help();
        return kUsage;
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return kRuntimeFailure;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kRuntimeFailure;
    }
}

}  // namespace ztids::cli
