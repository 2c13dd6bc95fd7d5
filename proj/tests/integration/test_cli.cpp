#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "ztids/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome ztids_run(const std::vector<std::string>& args) {
    std::vector<std::string> owned{"ztids"};
    owned.insert(owned.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : owned) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = ztids::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("ztids_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

json read_json(const std::string& p) {
    std::ifstream in(p);
    return json::parse(in);
}

void write_text(const std::string& p, const std::string& text) { std::ofstream(p) << text; }

std::vector<std::string> small_offline(const TempDir& dir, const std::string& tag) {
    return {"automl-offline", "--synthetic", "800", "--k-folds", "3", "--pso-swarm", "2", "--pso-iters", "2",
            "--report", dir / (tag + ".json"), "--model", dir / (tag + ".model.json")};
}

}  // namespace

TEST_CASE("usage errors exit with 2 and print usage") {
    const auto none = ztids_run({});
    CHECK(none.code == 2);
    CHECK(none.err.find("Usage") != std::string::npos);

    const auto missing = ztids_run({"automl-offline", "--seed", "7"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("--data") != std::string::npos);
    CHECK(missing.err.find("Usage") != std::string::npos);

    CHECK(ztids_run({"automl-online", "--data", "/nonexistent/flows.csv"}).code == 2);
    CHECK(ztids_run({"exercise", "--synthetic", "100", "--attack", "jsma"}).code == 2);
    CHECK(ztids_run({"report"}).code == 2);
    CHECK(ztids_run({"attack", "--synthetic", "100", "--eps", "abc"}).code == 2);
    CHECK(ztids_run({"frobnicate"}).code == 2);
}

TEST_CASE("help and version exit with 0") {
    const auto help = ztids_run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("automl-offline") != std::string::npos);
    const auto version = ztids_run({"--version"});
    CHECK(version.code == 0);
    CHECK(version.out.find(ztids::cli::kToolVersion) != std::string::npos);
}

TEST_CASE("runtime failures exit with 1") {
    TempDir dir;
    write_text(dir / "nolabel.csv", "a,b\n1,2\n3,4\n");
    const auto r = ztids_run({"exercise", "--data", dir / "nolabel.csv", "--out", dir / "x.json"});
    CHECK(r.code == 1);
    CHECK(r.err.find("MissingLabelColumn") != std::string::npos);
    CHECK(!fs::exists(dir / "x.json"));

    write_text(dir / "broken.json", "{not json");
    CHECK(ztids_run({"report", "--in", dir / "broken.json"}).code == 1);
    write_text(dir / "other.json", R"({"command": "train"})");
    CHECK(ztids_run({"report", "--in", dir / "other.json"}).code == 1);
}

TEST_CASE("bad config files are usage errors") {
    TempDir dir;
    write_text(dir / "bad.toml", "[offline]\nk_folds = \"five\"\n");
    CHECK(ztids_run({"automl-offline", "--synthetic", "100", "--config", dir / "bad.toml"}).code == 2);
    write_text(dir / "syntax.toml", "[offline\n");
    CHECK(ztids_run({"automl-offline", "--synthetic", "100", "--config", dir / "syntax.toml"}).code == 2);
    write_text(dir / "attack.toml", "[attack]\nattack = \"jsma\"\n");
    CHECK(ztids_run({"exercise", "--synthetic", "100", "--config", dir / "attack.toml"}).code == 2);
}

TEST_CASE("offline runs with one seed give identical content hashes across thread counts") {
    TempDir dir;
    auto a = small_offline(dir, "a");
    a.insert(a.end(), {"--seed", "7", "--threads", "1"});
    auto b = small_offline(dir, "b");
    b.insert(b.end(), {"--seed", "7", "--threads", "3"});
    auto c = small_offline(dir, "c");
    c.insert(c.end(), {"--seed", "8", "--threads", "1"});
    REQUIRE(ztids_run(a).code == 0);
    REQUIRE(ztids_run(b).code == 0);
    REQUIRE(ztids_run(c).code == 0);
    const auto ra = read_json(dir / "a.json"), rb = read_json(dir / "b.json"), rc = read_json(dir / "c.json");
    CHECK(ra.at("content_hash") == rb.at("content_hash"));
    CHECK(ra.at("content_hash") != rc.at("content_hash"));
    CHECK(ra.at("runtime").at("threads") == 1);
    CHECK(rb.at("runtime").at("threads") == 3);
    CHECK(ztids::cli::content_hash(ra) == ra.at("content_hash"));

    std::ifstream ma(dir / "a.model.json"), mb(dir / "b.model.json");
    CHECK(std::string(std::istreambuf_iterator<char>(ma), {}) == std::string(std::istreambuf_iterator<char>(mb), {}));

    const auto table = ztids_run({"report", "--in", dir / "a.json"});
    CHECK(table.code == 0);
    const auto header = table.out.substr(0, table.out.find('\n'));
    std::istringstream words(header);
    std::vector<std::string> cols{std::istream_iterator<std::string>(words), {}};
    CHECK(cols == std::vector<std::string>{"Stage", "Accuracy", "Precision", "Recall", "F1", "Time", "(s)"});
    CHECK(table.out.find("optimized") != std::string::npos);
}

TEST_CASE("config file values apply and flags override them") {
    TempDir dir;
    write_text(dir / "cfg.toml",
               "[run]\nseed = 42\n[attack]\nattack = \"fgsm\"\neps = 0.2\n[offline]\nbalance = false\n");
    const auto r = ztids_run({"exercise", "--synthetic", "600", "--config", dir / "cfg.toml", "--eps", "0.3", "--out",
                              dir / "ex.json"});
    REQUIRE(r.code == 0);
    const auto j = read_json(dir / "ex.json");
    CHECK(j.at("config").at("seed") == 42);
    CHECK(j.at("config").at("attack").at("attack") == "fgsm");
    CHECK(j.at("config").at("attack").at("eps") == 0.3);
    CHECK(j.at("config").at("offline").at("balance") == false);
    CHECK(j.at("result").at("attack") == "FGSM");
    CHECK(j.at("input").at("synthetic_rows") == 600);
}

TEST_CASE("online run writes curves and a report") {
    TempDir dir;
    const auto r = ztids_run({"automl-online", "--synthetic", "800", "--seed", "2", "--window", "100", "--out",
                              dir / "curves.csv", "--report", dir / "on.json"});
    REQUIRE(r.code == 0);
    std::ifstream csv(dir / "curves.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "learner,index,running_acc,windowed_acc,drift_flag");
    const auto j = read_json(dir / "on.json");
    CHECK(j.at("config").at("online").at("window") == 100);
    CHECK(j.at("result").at("curves").size() == 5);
    CHECK(ztids_run({"report", "--in", dir / "on.json"}).code == 0);
}

TEST_CASE("attack writes adversarial rows against a saved pipeline") {
    TempDir dir;
    auto off = small_offline(dir, "p");
    REQUIRE(ztids_run(off).code == 0);
    const auto r = ztids_run({"attack", "--synthetic", "800", "--model", dir / "p.model.json", "--attack", "DTA",
                              "--out", dir / "adv.csv", "--report", dir / "atk.json"});
    REQUIRE(r.code == 0);
    const auto j = read_json(dir / "atk.json");
    CHECK(j.at("result").at("victim").at("source") == "pipeline");
    CHECK(j.at("result").at("rows") == 800);
    std::ifstream csv(dir / "adv.csv");
    std::size_t lines = 0;
    for (std::string line; std::getline(csv, line);) ++lines;
    CHECK(lines == 801);

    const auto fresh = ztids_run({"attack", "--synthetic", "800", "--attack", "fgsm", "--out", dir / "adv2.csv",
                                  "--report", dir / "atk2.json"});
    REQUIRE(fresh.code == 0);
    CHECK(read_json(dir / "atk2.json").at("result").at("victim").at("source") == "tuned");
}

TEST_CASE("atomic writes replace the target and leave no temporaries") {
    TempDir dir;
    ztids::cli::write_atomic(dir / "f.txt", "one");
    ztids::cli::write_atomic(dir / "f.txt", "two");
    std::ifstream in(dir / "f.txt");
    CHECK(std::string(std::istreambuf_iterator<char>(in), {}) == "two");
    CHECK(std::distance(fs::directory_iterator(dir.path), fs::directory_iterator{}) == 1);
    CHECK_THROWS(ztids::cli::write_atomic(dir / "missing/dir/f.txt", "x"));
}

TEST_CASE("log level comes from the environment") {
    ::setenv("ZTIDS_LOG", "error", 1);
    TempDir dir;
    const auto quiet = ztids_run({"exercise", "--synthetic", "300", "--out", dir / "q.json"});
    ::unsetenv("ZTIDS_LOG");
    CHECK(quiet.code == 0);
    CHECK(quiet.err.find("[info]") == std::string::npos);
    const auto loud = ztids_run({"exercise", "--synthetic", "300", "--out", dir / "l.json"});
    CHECK(loud.err.find("[info]") != std::string::npos);
}
