#include "sketchgait/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

namespace sketchgait {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void schema_error(const std::string& pointer, const std::string& why) {
    throw DataError("manifest schema violation at " + pointer + ": " + why);
}

std::vector<std::string> string_list(const json& j, const std::string& pointer) {
    if (!j.is_array()) schema_error(pointer, "expected an array of strings");
    std::vector<std::string> out;
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_string()) schema_error(pointer + "/" + std::to_string(i), "expected a string");
        out.push_back(j[i].get<std::string>());
    }
    return out;
}

void check_paths_exist(const std::vector<std::string>& paths, const fs::path& base,
                       const std::string& pointer) {
    for (size_t i = 0; i < paths.size(); ++i) {
        fs::path p(paths[i]);
        if (p.is_relative()) p = base / p;
        if (!fs::exists(p))
            schema_error(pointer + "/" + std::to_string(i), "file not found: " + p.string());
    }
}

}  // namespace

std::vector<std::string> DatasetIndex::subjects() const {
    std::set<std::string> s;
    for (const auto& e : entries) s.insert(e.subject);
    return {s.begin(), s.end()};
}

DatasetIndex scan_manifest(const fs::path& path, bool check_files) {
    if (!fs::exists(path)) throw DataError("manifest not found: " + path.string());

    json root;
    try {
        std::ifstream f(path);
        root = json::parse(f);
    } catch (const json::parse_error& e) {
        throw DataError("manifest is not valid JSON: " + std::string(e.what()));
    }
    if (!root.is_object()) schema_error("", "top level must be an object");

    DatasetIndex index;
    const fs::path base = path.parent_path();

    if (root.contains("palette")) {
        if (!root["palette"].is_object()) schema_error("/palette", "expected an object");
        for (const auto& [k, v] : root["palette"].items()) {
            int label = 0;
            try {
                label = std::stoi(k);
            } catch (...) {
                schema_error("/palette/" + k, "label key must be an integer string");
            }
            if (label <= 0) schema_error("/palette/" + k, "palette labels must be positive (0 is background)");
            if (!v.is_string()) schema_error("/palette/" + k, "expected a string name");
            index.palette[label] = v.get<std::string>();
        }
    }

    if (root.contains("grouping")) {
        if (!root["grouping"].is_object()) schema_error("/grouping", "expected an object");
        std::set<int> seen;
        for (const auto& [name, labels] : root["grouping"].items()) {
            if (!labels.is_array()) schema_error("/grouping/" + name, "expected an array of labels");
            std::vector<int> ids;
            for (size_t i = 0; i < labels.size(); ++i) {
                if (!labels[i].is_number_integer())
                    schema_error("/grouping/" + name + "/" + std::to_string(i), "expected an integer label");
                const int label = labels[i].get<int>();
                if (!index.palette.count(label))
                    schema_error("/grouping/" + name + "/" + std::to_string(i),
                                 "label " + std::to_string(label) + " is not in the palette");
                if (!seen.insert(label).second)
                    schema_error("/grouping/" + name + "/" + std::to_string(i),
                                 "label " + std::to_string(label) + " appears in more than one group");
                ids.push_back(label);
            }
            index.grouping.groups.emplace_back(name, std::move(ids));
        }
        for (const auto& [label, name] : index.palette) {
            if (!seen.count(label))
                schema_error("/grouping", "palette label " + std::to_string(label) + " (" + name +
                                              ") is not covered by any group");
        }
    }

    if (root.contains("protocol")) {
        const json& p = root["protocol"];
        if (!p.is_object()) schema_error("/protocol", "expected an object");
        if (p.contains("gallery_conditions"))
            index.protocol.gallery_conditions = string_list(p["gallery_conditions"], "/protocol/gallery_conditions");
        if (p.contains("probe_conditions"))
            index.protocol.probe_conditions = string_list(p["probe_conditions"], "/protocol/probe_conditions");
    }

    if (!root.contains("entries")) schema_error("", "missing required field 'entries'");
    if (!root["entries"].is_array()) schema_error("/entries", "expected an array");

    std::set<std::string> keys;
    for (size_t i = 0; i < root["entries"].size(); ++i) {
        const std::string ep = "/entries/" + std::to_string(i);
        const json& e = root["entries"][i];
        if (!e.is_object()) schema_error(ep, "expected an object");

        SequenceMeta meta;
        for (const char* field : {"subject", "condition", "view"}) {
            if (!e.contains(field) || !e[field].is_string())
                schema_error(ep + "/" + field, "expected a string");
        }
        meta.subject = e["subject"].get<std::string>();
        meta.condition = e["condition"].get<std::string>();
        meta.view = e["view"].get<std::string>();
        if (!e.contains("seq") || !e["seq"].is_number_integer())
            schema_error(ep + "/seq", "expected an integer");
        meta.seq = e["seq"].get<int>();

        if (!e.contains("frames")) schema_error(ep, "missing required field 'frames'");
        meta.frames = string_list(e["frames"], ep + "/frames");
        if (meta.frames.empty()) schema_error(ep + "/frames", "path list must be non-empty");

        if (e.contains("masks")) meta.masks = string_list(e["masks"], ep + "/masks");
        if (e.contains("parsing")) meta.parsing = string_list(e["parsing"], ep + "/parsing");
        if (e.contains("modalities")) {
            if (!e["modalities"].is_object()) schema_error(ep + "/modalities", "expected an object");
            for (const auto& [name, list] : e["modalities"].items())
                meta.modalities[name] = string_list(list, ep + "/modalities/" + name);
        }

        const size_t n = meta.frames.size();
        if (!meta.masks.empty() && meta.masks.size() != n)
            schema_error(ep + "/masks", "length " + std::to_string(meta.masks.size()) +
                                            " does not match frames length " + std::to_string(n));
        if (!meta.parsing.empty() && meta.parsing.size() != n)
            schema_error(ep + "/parsing", "length " + std::to_string(meta.parsing.size()) +
                                              " does not match frames length " + std::to_string(n));
        for (const auto& [name, list] : meta.modalities) {
            if (list.size() != n)
                schema_error(ep + "/modalities/" + name,
                             "length " + std::to_string(list.size()) +
                                 " does not match frames length " + std::to_string(n));
        }
        if (meta.masks.empty() && meta.parsing.empty())
            schema_error(ep, "entry needs 'masks' or 'parsing' to define the foreground");

        if (!keys.insert(meta.key()).second)
            schema_error(ep, "duplicate sequence key " + meta.key());

        if (check_files) {
            check_paths_exist(meta.frames, base, ep + "/frames");
            check_paths_exist(meta.masks, base, ep + "/masks");
            check_paths_exist(meta.parsing, base, ep + "/parsing");
            for (const auto& [name, list] : meta.modalities)
                check_paths_exist(list, base, ep + "/modalities/" + name);
        }
        index.entries.push_back(std::move(meta));
    }

    std::sort(index.entries.begin(), index.entries.end(),
              [](const SequenceMeta& a, const SequenceMeta& b) { return a.key() < b.key(); });
    return index;
}

void write_manifest(const fs::path& path, const DatasetIndex& index) {
    json root = json::object();
    json palette = json::object();
    for (const auto& [label, name] : index.palette) palette[std::to_string(label)] = name;
    root["palette"] = palette;

    json grouping = json::object();
    for (const auto& [name, labels] : index.grouping.groups) grouping[name] = labels;
    root["grouping"] = grouping;

    root["protocol"] = {{"gallery_conditions", index.protocol.gallery_conditions},
                        {"probe_conditions", index.protocol.probe_conditions}};

    json entries = json::array();
    for (const auto& e : index.entries) {
        json je = {{"subject", e.subject}, {"condition", e.condition},
                   {"view", e.view},       {"seq", e.seq},
                   {"frames", e.frames}};
        if (!e.masks.empty()) je["masks"] = e.masks;
        if (!e.parsing.empty()) je["parsing"] = e.parsing;
        if (!e.modalities.empty()) {
            json m = json::object();
            for (const auto& [name, list] : e.modalities) m[name] = list;
            je["modalities"] = m;
        }
        entries.push_back(je);
    }
    root["entries"] = entries;

    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot open for writing: " + path.string());
    f << root.dump(2) << "\n";
}

}  // namespace sketchgait
