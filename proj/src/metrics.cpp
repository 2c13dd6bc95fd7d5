#include "ztids/metrics.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "ztids/error.hpp"

namespace ztids {

Scores score(const Confusion& c) {
    require(c.total() > 0, ErrorCode::Empty, "no samples to score");
    Scores s;
    s.confusion = c;
    const auto ratio = [](std::size_t num, std::size_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    s.precision = ratio(c.tp, c.tp + c.fp);
    s.recall = ratio(c.tp, c.tp + c.fn);
    s.f1 = (s.precision + s.recall) == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    s.accuracy = ratio(c.tp + c.tn, c.total());
    return s;
}

Scores score(std::span<const int> truth, std::span<const int> predicted) {
    require(truth.size() == predicted.size(), ErrorCode::LengthMismatch, "truth and prediction lengths differ");
    require(!truth.empty(), ErrorCode::Empty, "no samples to score");
    Confusion c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool t = truth[i] == 1, p = predicted[i] == 1;
        if (t && p) ++c.tp;
        else if (!t && p) ++c.fp;
        else if (t) ++c.fn;
        else ++c.tn;
    }
    return score(c);
}

nlohmann::json to_json(const Scores& s) {
    const auto pct = [](double v) { return std::round(v * 100.0 * 1000.0) / 1000.0; };
    return {{"accuracy", pct(s.accuracy)},
            {"precision", pct(s.precision)},
            {"recall", pct(s.recall)},
            {"f1", pct(s.f1)},
            {"seconds", s.seconds},
            {"confusion", {{"tp", s.confusion.tp}, {"fp", s.confusion.fp}, {"tn", s.confusion.tn}, {"fn", s.confusion.fn}}}};
}

}  // namespace ztids
