#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sketchgait/manifest.hpp"
#include "sketchgait/metric.hpp"

namespace sketchgait {

enum class Distance { Euclidean, Cosine };

std::string to_string(Distance d);
Distance distance_from_string(const std::string& s);

// One enrolled or queried item: descriptor plus retrieval identity.
struct EvalItem {
    std::string subject;
    std::string condition;
    std::string view;
    int seq = 0;
    std::vector<double> descriptor;

    std::string key() const {
        return subject + "/" + condition + "/" + view + "/" + std::to_string(seq);
    }
};

// D[p][g] = distance between probe p and gallery g.
// Throws ParameterError on embedding dimension mismatch.
Matrix pairwise_distances(const std::vector<std::vector<double>>& gallery,
                          const std::vector<std::vector<double>>& probe,
                          Distance metric = Distance::Euclidean);

struct RankResult {
    double accuracy = 0.0;  // percent over evaluated probes
    int correct = 0;
    int evaluated = 0;
    int excluded = 0;  // probes with zero eligible gallery entries
};

// Rank-k over a distance matrix. exclude[p][g] removes gallery entries from
// probe p's candidate list (a probe's own gallery instance). Ties are broken
// by gallery scan order. Probes with no eligible gallery entry leave the
// denominator and are counted.
RankResult rank_k(const Matrix& distances, const std::vector<std::string>& probe_labels,
                  const std::vector<std::string>& gallery_labels, int k,
                  const std::vector<std::vector<bool>>* exclude = nullptr);

struct ConditionResult {
    std::string condition;
    RankResult rank1;
    RankResult rank5;
};

struct EvalReport {
    std::vector<ConditionResult> conditions;  // probe condition order
    RankResult overall_rank1;                 // probe-weighted micro-average
    RankResult overall_rank5;
    Protocol protocol;
    std::string modality_set;
    std::string distance = "euclidean";
    std::string aggregation = "probe-weighted micro-average";
    bool exclude_identical = true;
    std::vector<std::string> match_log;  // optional per-probe audit lines
};

// Gallery = items whose condition is in protocol.gallery_conditions; one
// probe set per declared probe condition. Identical (subject, condition,
// view, seq) gallery entries are excluded per probe when exclude_identical.
// Protocol tags that match no item raise DataError naming the tag.
EvalReport per_condition_report(const std::vector<EvalItem>& items, const Protocol& protocol,
                                Distance metric = Distance::Euclidean,
                                bool exclude_identical = true, bool with_match_log = false);

// Applies an A-trained head to B's features, then runs the report on B's
// protocol. Layout mismatches raise ParameterError naming the divergence.
EvalReport cross_domain_eval(const MetricHead& head_from_a,
                             const std::vector<SequenceFeatures>& features_b,
                             const Protocol& protocol_b,
                             Distance metric = Distance::Euclidean);

std::vector<EvalItem> items_from_features(const std::vector<SequenceFeatures>& features,
                                          const MetricHead& head);

void write_report_csv(const std::filesystem::path& path, const EvalReport& report);
void write_report_json(const std::filesystem::path& path, const EvalReport& report);
EvalReport read_report_json(const std::filesystem::path& path);

// Fixed-width table mirroring the per-condition column layout.
std::string format_report_table(const EvalReport& report);

}  // namespace sketchgait
