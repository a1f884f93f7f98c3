#include "sketchgait/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace sketchgait {

namespace {

struct TomlValue {
    enum class Kind { String, Number, Boolean, Array } kind = Kind::String;
    std::string str;
    double num = 0.0;
    bool boolean = false;
    std::vector<TomlValue> items;
};

class Parser {
public:
    Parser(const std::string& text, const std::string& origin) : text_(text), origin_(origin) {}

    std::map<std::string, TomlValue> parse() {
        std::map<std::string, TomlValue> out;
        std::istringstream in(text_);
        std::string line;
        std::string section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string trimmed = strip(strip_comment(line));
            if (trimmed.empty()) continue;
            if (trimmed.front() == '[') {
                if (trimmed.back() != ']')
                    fail(lineno, "malformed section header: " + trimmed);
                section = strip(trimmed.substr(1, trimmed.size() - 2));
                if (section.empty()) fail(lineno, "empty section name");
                continue;
            }
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos) fail(lineno, "expected key = value: " + trimmed);
            std::string key = strip(trimmed.substr(0, eq));
            const std::string value = strip(trimmed.substr(eq + 1));
            if (key.empty()) fail(lineno, "empty key");
            if (!section.empty()) key = section + "." + key;
            if (out.count(key)) fail(lineno, "duplicate key: " + key);
            out[key] = parse_value(value, lineno);
        }
        return out;
    }

private:
    [[noreturn]] void fail(int lineno, const std::string& why) {
        throw ParameterError(origin_ + ":" + std::to_string(lineno) + ": " + why);
    }

    static std::string strip(const std::string& s) {
        size_t a = 0, b = s.size();
        while (a < b && std::isspace((unsigned char)s[a])) ++a;
        while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
        return s.substr(a, b - a);
    }

    static std::string strip_comment(const std::string& s) {
        bool in_string = false;
        for (size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') in_string = !in_string;
            if (s[i] == '#' && !in_string) return s.substr(0, i);
        }
        return s;
    }

    TomlValue parse_value(const std::string& v, int lineno) {
        TomlValue out;
        if (v.empty()) fail(lineno, "empty value");
        if (v.front() == '"') {
            if (v.size() < 2 || v.back() != '"') fail(lineno, "unterminated string: " + v);
            out.kind = TomlValue::Kind::String;
            out.str = v.substr(1, v.size() - 2);
            return out;
        }
        if (v == "true" || v == "false") {
            out.kind = TomlValue::Kind::Boolean;
            out.boolean = v == "true";
            return out;
        }
        if (v.front() == '[') {
            if (v.back() != ']') fail(lineno, "unterminated array: " + v);
            out.kind = TomlValue::Kind::Array;
            std::string inner = v.substr(1, v.size() - 2);
            std::string item;
            std::istringstream items(inner);
            while (std::getline(items, item, ',')) {
                const std::string t = strip(item);
                if (!t.empty()) out.items.push_back(parse_value(t, lineno));
            }
            return out;
        }
        out.kind = TomlValue::Kind::Number;
        try {
            size_t used = 0;
            out.num = std::stod(v, &used);
            if (used != v.size()) fail(lineno, "trailing characters in number: " + v);
        } catch (const std::exception&) {
            fail(lineno, "cannot parse value: " + v);
        }
        return out;
    }

    const std::string& text_;
    std::string origin_;
};

// Schema: one setter per known key.
using Setter = std::function<void(RunConfig&, const TomlValue&)>;

[[noreturn]] void type_error(const std::string& key, const std::string& want) {
    throw ParameterError("config key '" + key + "' expects " + want);
}

double as_number(const TomlValue& v, const std::string& key) {
    if (v.kind != TomlValue::Kind::Number) type_error(key, "a number");
    return v.num;
}

int as_int(const TomlValue& v, const std::string& key) {
    const double d = as_number(v, key);
    if (d != double(long(d))) type_error(key, "an integer");
    return int(d);
}

bool as_bool(const TomlValue& v, const std::string& key) {
    if (v.kind != TomlValue::Kind::Boolean) type_error(key, "true or false");
    return v.boolean;
}

std::string as_string(const TomlValue& v, const std::string& key) {
    if (v.kind != TomlValue::Kind::String) type_error(key, "a quoted string");
    return v.str;
}

std::vector<int> as_int_list(const TomlValue& v, const std::string& key) {
    if (v.kind != TomlValue::Kind::Array) type_error(key, "an array of integers");
    std::vector<int> out;
    for (const auto& item : v.items) out.push_back(as_int(item, key));
    return out;
}

std::vector<double> as_number_list(const TomlValue& v, const std::string& key) {
    if (v.kind != TomlValue::Kind::Array) type_error(key, "an array of numbers");
    std::vector<double> out;
    for (const auto& item : v.items) out.push_back(as_number(item, key));
    return out;
}

const std::map<std::string, Setter>& schema() {
    static const std::map<std::string, Setter> table = {
        {"seed", [](RunConfig& c, const TomlValue& v) { c.seed = uint64_t(as_number(v, "seed")); c.train.seed = c.seed; }},
        {"jobs", [](RunConfig& c, const TomlValue& v) { c.jobs = as_int(v, "jobs"); }},

        {"detector.kind",
         [](RunConfig& c, const TomlValue& v) {
             c.detector_kind = as_string(v, "detector.kind");
             if (c.detector_kind != "sobel" && c.detector_kind != "canny" && c.detector_kind != "external")
                 throw ParameterError("detector.kind must be sobel, canny, or external");
         }},
        {"detector.canny_sigma",
         [](RunConfig& c, const TomlValue& v) { c.canny.sigma = as_number(v, "detector.canny_sigma"); }},
        {"detector.canny_low",
         [](RunConfig& c, const TomlValue& v) { c.canny.low = as_number(v, "detector.canny_low"); }},
        {"detector.canny_high",
         [](RunConfig& c, const TomlValue& v) { c.canny.high = as_number(v, "detector.canny_high"); }},
        {"detector.external_command",
         [](RunConfig& c, const TomlValue& v) { c.external_command = as_string(v, "detector.external_command"); }},
        {"detector.external_timeout_s",
         [](RunConfig& c, const TomlValue& v) { c.external_timeout_s = as_number(v, "detector.external_timeout_s"); }},

        {"modality.set",
         [](RunConfig& c, const TomlValue& v) {
             c.modality_set = modality_set_from_string(as_string(v, "modality.set"));
             c.descriptor.modality_set = c.modality_set;
         }},
        {"modality.sketch_source",
         [](RunConfig& c, const TomlValue& v) {
             const std::string s = as_string(v, "modality.sketch_source");
             if (s == "detector")
                 c.sketch_source = SketchSource::Detector;
             else if (s == "parsing-edge")
                 c.sketch_source = SketchSource::ParsingEdge;
             else
                 throw ParameterError("modality.sketch_source must be detector or parsing-edge");
         }},
        {"modality.silhouette_source",
         [](RunConfig& c, const TomlValue& v) {
             const std::string s = as_string(v, "modality.silhouette_source");
             if (s == "mask")
                 c.silhouette_source = SilhouetteSource::Mask;
             else if (s == "parsing")
                 c.silhouette_source = SilhouetteSource::Parsing;
             else
                 throw ParameterError("modality.silhouette_source must be mask or parsing");
         }},
        {"modality.parsing_edge_include_outer",
         [](RunConfig& c, const TomlValue& v) {
             c.parsing_edge_include_outer = as_bool(v, "modality.parsing_edge_include_outer");
         }},

        {"normalize.height",
         [](RunConfig& c, const TomlValue& v) { c.target_height = as_int(v, "normalize.height"); }},
        {"normalize.width",
         [](RunConfig& c, const TomlValue& v) { c.target_width = as_int(v, "normalize.width"); }},

        {"descriptor.stages",
         [](RunConfig& c, const TomlValue& v) {
             const int s = as_int(v, "descriptor.stages");
             c.descriptor.sketch_branch.stages = s;
             c.descriptor.parsing_branch.stages = s;
             c.descriptor.fusion_branch.stages = s;
         }},
        {"descriptor.orientations",
         [](RunConfig& c, const TomlValue& v) {
             const int k = as_int(v, "descriptor.orientations");
             c.descriptor.sketch_branch.orientations = k;
             c.descriptor.parsing_branch.orientations = k;
             c.descriptor.fusion_branch.orientations = k;
         }},
        {"descriptor.fusion",
         [](RunConfig& c, const TomlValue& v) {
             c.descriptor.fusion = fusion_op_from_string(as_string(v, "descriptor.fusion"));
         }},
        {"descriptor.hpp_levels",
         [](RunConfig& c, const TomlValue& v) {
             c.descriptor.hpp_levels = as_int_list(v, "descriptor.hpp_levels");
             if (c.descriptor.hpp_levels.empty())
                 throw ParameterError("descriptor.hpp_levels must be non-empty");
         }},
        {"descriptor.embed_dim",
         [](RunConfig& c, const TomlValue& v) {
             c.descriptor.embed_dim = as_int(v, "descriptor.embed_dim");
             c.train.embed_dim = c.descriptor.embed_dim;
         }},

        {"train.identities_per_batch",
         [](RunConfig& c, const TomlValue& v) { c.train.identities_per_batch = as_int(v, "train.identities_per_batch"); }},
        {"train.sequences_per_identity",
         [](RunConfig& c, const TomlValue& v) { c.train.sequences_per_identity = as_int(v, "train.sequences_per_identity"); }},
        {"train.margin", [](RunConfig& c, const TomlValue& v) { c.train.margin = as_number(v, "train.margin"); }},
        {"train.lr", [](RunConfig& c, const TomlValue& v) { c.train.lr = as_number(v, "train.lr"); }},
        {"train.milestones",
         [](RunConfig& c, const TomlValue& v) {
             c.train.milestone_fractions = as_number_list(v, "train.milestones");
             for (double f : c.train.milestone_fractions)
                 if (f < 0.0 || f > 1.0)
                     throw ParameterError("train.milestones are fractions of the iteration count");
         }},
        {"train.lr_decay", [](RunConfig& c, const TomlValue& v) { c.train.lr_decay = as_number(v, "train.lr_decay"); }},
        {"train.momentum", [](RunConfig& c, const TomlValue& v) { c.train.momentum = as_number(v, "train.momentum"); }},
        {"train.weight_decay",
         [](RunConfig& c, const TomlValue& v) { c.train.weight_decay = as_number(v, "train.weight_decay"); }},
        {"train.iterations",
         [](RunConfig& c, const TomlValue& v) { c.train.iterations = as_int(v, "train.iterations"); }},

        {"eval.distance",
         [](RunConfig& c, const TomlValue& v) { c.distance = distance_from_string(as_string(v, "eval.distance")); }},
        {"eval.exclude_identical",
         [](RunConfig& c, const TomlValue& v) { c.exclude_identical = as_bool(v, "eval.exclude_identical"); }},
        {"eval.match_log",
         [](RunConfig& c, const TomlValue& v) { c.match_log = as_bool(v, "eval.match_log"); }},
    };
    return table;
}

}  // namespace

DetectorSpec RunConfig::detector_spec() const {
    if (detector_kind == "sobel") return SobelDetector{};
    if (detector_kind == "canny") return CannyDetector{canny};
    ExternalDetector ext;
    ext.hook.command = external_command;
    ext.hook.timeout_seconds = external_timeout_s;
    return ext;
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    Parser parser(text, origin);
    const auto values = parser.parse();

    RunConfig cfg;
    const auto& table = schema();
    for (const auto& [key, value] : values) {
        const auto it = table.find(key);
        if (it == table.end()) throw ParameterError("unknown config key: " + key);
        it->second(cfg, value);
    }
    if (cfg.detector_kind == "external" && cfg.external_command.empty())
        throw ParameterError("detector.kind = external requires detector.external_command");
    return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ParameterError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str(), path.string());
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    out.precision(12);
    out << "seed = " << cfg.seed << "\n";
    out << "jobs = " << cfg.jobs << "\n\n";

    out << "[detector]\n";
    out << "kind = \"" << cfg.detector_kind << "\"\n";
    out << "canny_sigma = " << cfg.canny.sigma << "\n";
    out << "canny_low = " << cfg.canny.low << "\n";
    out << "canny_high = " << cfg.canny.high << "\n";
    out << "external_command = \"" << cfg.external_command << "\"\n";
    out << "external_timeout_s = " << cfg.external_timeout_s << "\n\n";

    out << "[modality]\n";
    out << "set = \"" << to_string(cfg.modality_set) << "\"\n";
    out << "sketch_source = \""
        << (cfg.sketch_source == SketchSource::Detector ? "detector" : "parsing-edge") << "\"\n";
    out << "silhouette_source = \""
        << (cfg.silhouette_source == SilhouetteSource::Mask ? "mask" : "parsing") << "\"\n";
    out << "parsing_edge_include_outer = " << (cfg.parsing_edge_include_outer ? "true" : "false")
        << "\n\n";

    out << "[normalize]\n";
    out << "height = " << cfg.target_height << "\n";
    out << "width = " << cfg.target_width << "\n\n";

    out << "[descriptor]\n";
    out << "stages = " << cfg.descriptor.sketch_branch.stages << "\n";
    out << "orientations = " << cfg.descriptor.sketch_branch.orientations << "\n";
    out << "fusion = \"" << to_string(cfg.descriptor.fusion) << "\"\n";
    out << "hpp_levels = [";
    for (size_t i = 0; i < cfg.descriptor.hpp_levels.size(); ++i)
        out << (i ? ", " : "") << cfg.descriptor.hpp_levels[i];
    out << "]\n";
    out << "embed_dim = " << cfg.descriptor.embed_dim << "\n\n";

    out << "[train]\n";
    out << "identities_per_batch = " << cfg.train.identities_per_batch << "\n";
    out << "sequences_per_identity = " << cfg.train.sequences_per_identity << "\n";
    out << "margin = " << cfg.train.margin << "\n";
    out << "lr = " << cfg.train.lr << "\n";
    out << "milestones = [";
    for (size_t i = 0; i < cfg.train.milestone_fractions.size(); ++i)
        out << (i ? ", " : "") << cfg.train.milestone_fractions[i];
    out << "]\n";
    out << "lr_decay = " << cfg.train.lr_decay << "\n";
    out << "momentum = " << cfg.train.momentum << "\n";
    out << "weight_decay = " << cfg.train.weight_decay << "\n";
    out << "iterations = " << cfg.train.iterations << "\n\n";

    out << "[eval]\n";
    out << "distance = \"" << to_string(cfg.distance) << "\"\n";
    out << "exclude_identical = " << (cfg.exclude_identical ? "true" : "false") << "\n";
    out << "match_log = " << (cfg.match_log ? "true" : "false") << "\n";
    return out.str();
}

void echo_config(const std::filesystem::path& out_dir, const RunConfig& cfg) {
    std::filesystem::create_directories(out_dir);
    const auto path = out_dir / "config_resolved.toml";
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot open for writing: " + path.string());
    f << serialize_config(cfg);
}

}  // namespace sketchgait
