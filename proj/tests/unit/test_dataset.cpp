#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "support.hpp"
#include "ztids/dataset.hpp"
#include "ztids/error.hpp"

using namespace ztids;

TEST_CASE("labels are binarized against the benign set") {
    const auto ds = parse_csv("a,b,Label\n1,2,BENIGN\n3,4,DoS\n5,6,BENIGN\n");
    CHECK(ds.labels == std::vector<int>{0, 1, 0});
    CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
    CHECK(ds.positive_label_name == "DoS");
    CHECK(ds.features(1, 1) == 4.0);
}

TEST_CASE("infinite and non-numeric cells become missing") {
    const auto ds = parse_csv(" Flow Bytes/s, Flow Duration,x, Label\nInfinity,-5,1,BENIGN\n12.5,7,oops,PortScan\nNaN,3,2,BENIGN\n");
    CHECK(ds.feature_names[0] == "Flow Bytes/s");
    CHECK(is_missing(ds.features(0, 0)));
    CHECK(ds.features(1, 0) == 12.5);
    CHECK(is_missing(ds.features(2, 0)));
    CHECK(is_missing(ds.features(0, 1)));  // negative duration
    CHECK(ds.features(1, 1) == 7.0);
    CHECK(ds.column_kinds[2] == ColumnKind::Numeric);
    CHECK(is_missing(ds.features(1, 2)));
}

TEST_CASE("mostly textual columns are categorical") {
    const auto ds = parse_csv("proto,v,Label\ntcp,1,BENIGN\nudp,2,DoS\ntcp,3,BENIGN\n");
    CHECK(ds.column_kinds[0] == ColumnKind::Categorical);
    CHECK(ds.categorical_values[0] == std::vector<std::string>{"tcp", "udp", "tcp"});
}

TEST_CASE("quoted fields follow RFC-4180") {
    const auto ds = parse_csv("\"a,1\",\"Label\"\r\n\"1.5\",\"say \"\"hi\"\"\"\r\n");
    CHECK(ds.feature_names[0] == "a,1");
    CHECK(ds.labels == std::vector<int>{1});
    CHECK(ds.positive_label_name == "say \"hi\"");
}

TEST_CASE("ingestion errors") {
    CHECK_THROWS_WITH_AS(parse_csv("a,b\n1,2\n"), doctest::Contains("MissingLabelColumn"), Error);
    CHECK_THROWS_AS(parse_csv(""), Error);
    try {
        parse_csv("a,Label\n1,BENIGN,3\n");
        FAIL("expected RaggedRow");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RaggedRow);
    }
    const auto tmp = std::filesystem::temp_directory_path() / "ztids_empty.csv";
    std::ofstream(tmp).close();
    try {
        load_csv(tmp);
        FAIL("expected EmptyFile");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyFile);
    }
    std::filesystem::remove(tmp);
}

TEST_CASE("custom benign labels") {
    CsvOptions o;
    o.label_column = "class";
    o.benign_labels = {"normal"};
    const auto ds = parse_csv("x,class\n1,normal\n2,BENIGN\n", o);
    CHECK(ds.labels == std::vector<int>{0, 1});
}

TEST_CASE("csv write then load preserves numeric values and order") {
    const auto ds = testing::blobs(50, 3, 2.0, 4);
    std::ostringstream out;
    write_csv(ds, out);
    const auto back = parse_csv(out.str());
    CHECK(back.features == ds.features);
    CHECK(back.labels == ds.labels);
    std::size_t i = 0;
    for (auto s : stream(back)) {
        CHECK(s.y == ds.labels[i]);
        CHECK(std::equal(s.x.begin(), s.x.end(), ds.features.row(i).begin()));
        ++i;
    }
    CHECK(i == ds.rows());
}

TEST_CASE("stream yields rows in order, once, repeatably") {
    const auto ds = Dataset::from_matrix(Matrix(3, 1), {0, 1, 0});
    auto s = stream(ds);
    std::vector<int> a, b;
    for (auto smp : s) a.push_back(smp.y);
    for (auto smp : s) b.push_back(smp.y);
    CHECK(a == std::vector<int>{0, 1, 0});
    CHECK(a == b);
    const auto empty = Dataset::from_matrix(Matrix(0, 2), {});
    std::size_t count = 0;
    for ([[maybe_unused]] auto smp : stream(empty)) ++count;
    CHECK(count == 0);
}

TEST_CASE("stratified 5-fold on a balanced 100-row set") {
    std::vector<int> y(100);
    for (int i = 0; i < 100; ++i) y[i] = i % 2;
    const auto ds = Dataset::from_matrix(Matrix(100, 1), y);
    const auto plan = stratified_kfold(ds, 5, 11);
    REQUIRE(plan.folds.size() == 5);
    for (const auto& f : plan.folds) {
        CHECK(f.test.size() == 20);
        const auto ones = std::count_if(f.test.begin(), f.test.end(), [&](auto i) { return y[i] == 1; });
        CHECK(ones == 10);
    }
    const auto again = stratified_kfold(ds, 5, 11);
    for (std::size_t f = 0; f < 5; ++f) CHECK(again.folds[f].test == plan.folds[f].test);
}

TEST_CASE("too few samples per class") {
    const auto ds = Dataset::from_matrix(Matrix(4, 1), {1, 1, 1, 1});
    try {
        stratified_kfold(ds, 5, 0);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooFewSamplesPerClass);
    }
}

TEST_CASE("fold partition laws hold for random n, k, seeds") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t k = 2 + rng() % 9;
        const std::size_t n1 = k + rng() % 80, n0 = k + rng() % 80;
        std::vector<int> y;
        for (std::size_t i = 0; i < n0; ++i) y.push_back(0);
        for (std::size_t i = 0; i < n1; ++i) y.push_back(1);
        std::shuffle(y.begin(), y.end(), rng);
        const auto ds = Dataset::from_matrix(Matrix(y.size(), 1), y);
        const auto plan = stratified_kfold(ds, k, rng());
        std::vector<int> test_hits(y.size(), 0), train_hits(y.size(), 0);
        for (const auto& f : plan.folds) {
            for (auto i : f.test) ++test_hits[i];
            for (auto i : f.train) ++train_hits[i];
            for (int label : {0, 1}) {
                const double total = label ? static_cast<double>(n1) : static_cast<double>(n0);
                const auto got = std::count_if(f.test.begin(), f.test.end(), [&](auto i) { return y[i] == label; });
                CHECK(std::abs(static_cast<double>(got) - total / static_cast<double>(k)) <= 1.0);
            }
        }
        for (std::size_t i = 0; i < y.size(); ++i) {
            CHECK(test_hits[i] == 1);
            CHECK(train_hits[i] == static_cast<int>(k - 1));
        }
    }
}

TEST_CASE("subsample is stratified and digest is content-sensitive") {
    const auto ds = testing::blobs(1000, 2, 1.0, 3, 0.3);
    const auto sub = stratified_subsample(ds, 200, 1);
    CHECK(sub.rows() == 200);
    CHECK(std::abs(digest(sub).attack_ratio - digest(ds).attack_ratio) < 0.01);
    auto tweaked = ds;
    tweaked.features(0, 0) += 1.0;
    CHECK(digest(tweaked).content_hash != digest(ds).content_hash);
    CHECK(digest(ds).content_hash == digest(ds).content_hash);
}
