#include "sketchgait/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sketchgait {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(Distance d) { return d == Distance::Euclidean ? "euclidean" : "cosine"; }

Distance distance_from_string(const std::string& s) {
    if (s == "euclidean") return Distance::Euclidean;
    if (s == "cosine") return Distance::Cosine;
    throw ParameterError("unknown distance: " + s);
}

Matrix pairwise_distances(const std::vector<std::vector<double>>& gallery,
                          const std::vector<std::vector<double>>& probe, Distance metric) {
    const size_t dim = gallery.empty() ? (probe.empty() ? 0 : probe[0].size()) : gallery[0].size();
    for (const auto& g : gallery)
        if (g.size() != dim) throw ParameterError("pairwise_distances: gallery dim mismatch");
    for (const auto& p : probe)
        if (p.size() != dim) throw ParameterError("pairwise_distances: probe dim mismatch");

    Matrix d(int(probe.size()), int(gallery.size()));
    for (size_t i = 0; i < probe.size(); ++i) {
        for (size_t j = 0; j < gallery.size(); ++j) {
            double v = 0.0;
            if (metric == Distance::Euclidean) {
                for (size_t k = 0; k < dim; ++k) {
                    const double diff = probe[i][k] - gallery[j][k];
                    v += diff * diff;
                }
                v = std::sqrt(v);
            } else {
                double dot = 0.0, np = 0.0, ng = 0.0;
                for (size_t k = 0; k < dim; ++k) {
                    dot += probe[i][k] * gallery[j][k];
                    np += probe[i][k] * probe[i][k];
                    ng += gallery[j][k] * gallery[j][k];
                }
                const double denom = std::sqrt(np) * std::sqrt(ng);
                v = denom > 0.0 ? 1.0 - dot / denom : 1.0;
            }
            d.at(int(i), int(j)) = v;
        }
    }
    return d;
}

RankResult rank_k(const Matrix& distances, const std::vector<std::string>& probe_labels,
                  const std::vector<std::string>& gallery_labels, int k,
                  const std::vector<std::vector<bool>>* exclude) {
    if (k < 1) throw ParameterError("rank_k: k must be >= 1");
    const int P = distances.rows, G = distances.cols;
    if (int(probe_labels.size()) != P || int(gallery_labels.size()) != G)
        throw ParameterError("rank_k: label counts do not match the distance matrix");

    RankResult r;
    std::vector<int> order(static_cast<size_t>(G));
    for (int p = 0; p < P; ++p) {
        std::iota(order.begin(), order.end(), 0);
        // Stable sort on distance keeps gallery scan order on ties.
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return distances.at(p, a) < distances.at(p, b); });

        int seen = 0;
        bool hit = false, any = false;
        for (int g : order) {
            if (exclude && (*exclude)[size_t(p)][size_t(g)]) continue;
            any = true;
            if (gallery_labels[size_t(g)] == probe_labels[size_t(p)]) {
                hit = true;
                break;
            }
            if (++seen >= k) break;
        }
        if (!any) {
            ++r.excluded;
            continue;
        }
        ++r.evaluated;
        if (hit) ++r.correct;
    }
    r.accuracy = r.evaluated > 0 ? 100.0 * r.correct / r.evaluated : 0.0;
    return r;
}

EvalReport per_condition_report(const std::vector<EvalItem>& items, const Protocol& protocol,
                                Distance metric, bool exclude_identical, bool with_match_log) {
    if (protocol.gallery_conditions.empty())
        throw ParameterError("per_condition_report: protocol declares no gallery conditions");
    if (protocol.probe_conditions.empty())
        throw ParameterError("per_condition_report: protocol declares no probe conditions");

    std::set<std::string> present;
    for (const auto& it : items) present.insert(it.condition);
    for (const auto& tag : protocol.gallery_conditions)
        if (!present.count(tag)) throw DataError("unknown gallery condition tag: " + tag);
    for (const auto& tag : protocol.probe_conditions)
        if (!present.count(tag)) throw DataError("unknown probe condition tag: " + tag);

    std::vector<const EvalItem*> gallery;
    for (const auto& it : items)
        if (std::find(protocol.gallery_conditions.begin(), protocol.gallery_conditions.end(),
                      it.condition) != protocol.gallery_conditions.end())
            gallery.push_back(&it);

    std::vector<std::vector<double>> gallery_desc;
    std::vector<std::string> gallery_labels, gallery_keys;
    for (const auto* g : gallery) {
        gallery_desc.push_back(g->descriptor);
        gallery_labels.push_back(g->subject);
        gallery_keys.push_back(g->key());
    }

    EvalReport report;
    report.protocol = protocol;
    report.distance = to_string(metric);
    report.exclude_identical = exclude_identical;

    for (const auto& tag : protocol.probe_conditions) {
        std::vector<const EvalItem*> probes;
        for (const auto& it : items)
            if (it.condition == tag) probes.push_back(&it);

        std::vector<std::vector<double>> probe_desc;
        std::vector<std::string> probe_labels;
        for (const auto* p : probes) {
            probe_desc.push_back(p->descriptor);
            probe_labels.push_back(p->subject);
        }

        const Matrix d = pairwise_distances(gallery_desc, probe_desc, metric);

        std::vector<std::vector<bool>> exclude;
        const std::vector<std::vector<bool>>* exclude_ptr = nullptr;
        if (exclude_identical) {
            exclude.assign(probes.size(), std::vector<bool>(gallery.size(), false));
            for (size_t p = 0; p < probes.size(); ++p)
                for (size_t g = 0; g < gallery.size(); ++g)
                    if (probes[p]->key() == gallery_keys[g]) exclude[p][g] = true;
            exclude_ptr = &exclude;
        }

        ConditionResult cr;
        cr.condition = tag;
        cr.rank1 = rank_k(d, probe_labels, gallery_labels, 1, exclude_ptr);
        cr.rank5 = rank_k(d, probe_labels, gallery_labels, 5, exclude_ptr);
        report.conditions.push_back(cr);

        if (with_match_log) {
            for (size_t p = 0; p < probes.size(); ++p) {
                int best = -1;
                for (int g = 0; g < d.cols; ++g) {
                    if (exclude_ptr && exclude[p][size_t(g)]) continue;
                    if (best < 0 || d.at(int(p), g) < d.at(int(p), best)) best = g;
                }
                std::ostringstream line;
                line << probes[p]->key() << " -> "
                     << (best >= 0 ? gallery_keys[size_t(best)] : std::string("<none>"));
                if (best >= 0)
                    line << " dist=" << d.at(int(p), best)
                         << (gallery_labels[size_t(best)] == probe_labels[p] ? " hit" : " miss");
                report.match_log.push_back(line.str());
            }
        }
    }

    auto aggregate = [&](auto pick) {
        RankResult total;
        for (const auto& c : report.conditions) {
            const RankResult& r = pick(c);
            total.correct += r.correct;
            total.evaluated += r.evaluated;
            total.excluded += r.excluded;
        }
        total.accuracy = total.evaluated > 0 ? 100.0 * total.correct / total.evaluated : 0.0;
        return total;
    };
    report.overall_rank1 = aggregate([](const ConditionResult& c) { return c.rank1; });
    report.overall_rank5 = aggregate([](const ConditionResult& c) { return c.rank5; });
    return report;
}

std::vector<EvalItem> items_from_features(const std::vector<SequenceFeatures>& features,
                                          const MetricHead& head) {
    std::vector<EvalItem> items;
    for (const auto& f : features) {
        EvalItem it;
        it.subject = f.meta.subject;
        it.condition = f.meta.condition;
        it.view = f.meta.view;
        it.seq = f.meta.seq;
        it.descriptor = apply_head(f, head).data;
        items.push_back(std::move(it));
    }
    return items;
}

EvalReport cross_domain_eval(const MetricHead& head_from_a,
                             const std::vector<SequenceFeatures>& features_b,
                             const Protocol& protocol_b, Distance metric) {
    return per_condition_report(items_from_features(features_b, head_from_a), protocol_b, metric);
}

void write_report_csv(const fs::path& path, const EvalReport& report) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot open for writing: " + path.string());
    f.precision(10);
    f << "condition,rank1,rank5,probes,excluded\n";
    for (const auto& c : report.conditions)
        f << c.condition << "," << c.rank1.accuracy << "," << c.rank5.accuracy << ","
          << c.rank1.evaluated << "," << c.rank1.excluded << "\n";
    f << "overall," << report.overall_rank1.accuracy << "," << report.overall_rank5.accuracy << ","
      << report.overall_rank1.evaluated << "," << report.overall_rank1.excluded << "\n";
}

namespace {

json rank_to_json(const RankResult& r) {
    return {{"accuracy", r.accuracy},
            {"correct", r.correct},
            {"evaluated", r.evaluated},
            {"excluded", r.excluded}};
}

RankResult rank_from_json(const json& j) {
    RankResult r;
    r.accuracy = j.at("accuracy").get<double>();
    r.correct = j.at("correct").get<int>();
    r.evaluated = j.at("evaluated").get<int>();
    r.excluded = j.at("excluded").get<int>();
    return r;
}

}  // namespace

void write_report_json(const fs::path& path, const EvalReport& report) {
    json root;
    root["protocol"] = {{"gallery_conditions", report.protocol.gallery_conditions},
                        {"probe_conditions", report.protocol.probe_conditions}};
    root["modality_set"] = report.modality_set;
    root["distance"] = report.distance;
    root["aggregation"] = report.aggregation;
    root["exclude_identical"] = report.exclude_identical;
    json conditions = json::array();
    for (const auto& c : report.conditions)
        conditions.push_back(
            {{"condition", c.condition}, {"rank1", rank_to_json(c.rank1)}, {"rank5", rank_to_json(c.rank5)}});
    root["conditions"] = conditions;
    root["overall"] = {{"rank1", rank_to_json(report.overall_rank1)},
                       {"rank5", rank_to_json(report.overall_rank5)}};
    if (!report.match_log.empty()) root["match_log"] = report.match_log;

    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot open for writing: " + path.string());
    f << root.dump(2) << "\n";
}

EvalReport read_report_json(const fs::path& path) {
    if (!fs::exists(path)) throw DataError("report not found: " + path.string());
    json root;
    try {
        std::ifstream f(path);
        root = json::parse(f);
    } catch (const json::parse_error& e) {
        throw DataError("report is not valid JSON: " + std::string(e.what()));
    }

    EvalReport report;
    report.protocol.gallery_conditions =
        root.at("protocol").at("gallery_conditions").get<std::vector<std::string>>();
    report.protocol.probe_conditions =
        root.at("protocol").at("probe_conditions").get<std::vector<std::string>>();
    report.modality_set = root.value("modality_set", "");
    report.distance = root.value("distance", "euclidean");
    report.aggregation = root.value("aggregation", "");
    report.exclude_identical = root.value("exclude_identical", true);
    for (const auto& c : root.at("conditions")) {
        ConditionResult cr;
        cr.condition = c.at("condition").get<std::string>();
        cr.rank1 = rank_from_json(c.at("rank1"));
        cr.rank5 = rank_from_json(c.at("rank5"));
        report.conditions.push_back(cr);
    }
    report.overall_rank1 = rank_from_json(root.at("overall").at("rank1"));
    report.overall_rank5 = rank_from_json(root.at("overall").at("rank5"));
    if (root.contains("match_log"))
        report.match_log = root["match_log"].get<std::vector<std::string>>();
    return report;
}

std::string format_report_table(const EvalReport& report) {
    std::ostringstream out;

    auto cell = [](const std::string& s, size_t w) {
        return s.size() < w ? std::string(w - s.size(), ' ') + s : s;
    };
    const size_t w = 8;
    auto acc_cell = [&](double a) {
        std::ostringstream v;
        v.setf(std::ios::fixed);
        v.precision(1);
        v << a;
        return cell(v.str(), w);
    };

    out << cell("metric", 8);
    for (const auto& c : report.conditions) out << " " << cell(c.condition, w);
    out << " " << cell("OA@R1", w) << " " << cell("OA@R5", w) << "\n";

    out << cell("rank1", 8);
    for (const auto& c : report.conditions) out << " " << acc_cell(c.rank1.accuracy);
    out << " " << acc_cell(report.overall_rank1.accuracy) << " " << cell("-", w) << "\n";

    out << cell("rank5", 8);
    for (const auto& c : report.conditions) out << " " << acc_cell(c.rank5.accuracy);
    out << " " << cell("-", w) << " " << acc_cell(report.overall_rank5.accuracy) << "\n";

    out << cell("probes", 8);
    for (const auto& c : report.conditions) out << " " << cell(std::to_string(c.rank1.evaluated), w);
    out << " " << cell(std::to_string(report.overall_rank1.evaluated), w) << " " << cell("-", w)
        << "\n";
    return out.str();
}

}  // namespace sketchgait
