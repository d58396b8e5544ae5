#include "condmtl/dataset_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "condmtl/error.hpp"

namespace condmtl {

namespace {

constexpr char kModelMagic[8] = {'C', 'M', 'T', 'L', 'M', 'O', 'D', 'L'};
constexpr std::uint32_t kModelVersion = 1;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

double parse_double(const std::string& text, std::size_t line_no, const std::string& what) {
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0') {
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse " + what + " '" +
                         text + "'");
    }
    return value;
}

std::uint8_t parse_flag(const std::string& text, std::size_t line_no, const std::string& what) {
    if (text == "0") {
        return 0;
    }
    if (text == "1") {
        return 1;
    }
    throw ParseError("line " + std::to_string(line_no) + ": " + what + " must be 0 or 1, got '" +
                     text + "'");
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

GroupedDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataFormatError("cannot open dataset file: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError("dataset file has no header: " + path.string());
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const auto header = split_csv_line(line);
    if (header.size() < 4 || header[0] != "id") {
        throw SchemaError("header must start with 'id' and contain features, group flags and y");
    }
    std::size_t n_features = 0;
    std::size_t col = 1;
    while (col < header.size() && header[col].rfind("f", 0) == 0 &&
           header[col].rfind("targets_", 0) != 0) {
        const std::string expected = "f" + std::to_string(n_features);
        if (header[col] != expected) {
            throw SchemaError("expected feature column '" + expected + "', found '" +
                              header[col] + "'");
        }
        ++n_features;
        ++col;
    }
    GroupedDataset dataset;
    while (col < header.size() && header[col].rfind("targets_", 0) == 0) {
        dataset.group_names.push_back(header[col].substr(8));
        ++col;
    }
    if (n_features == 0 || dataset.group_names.empty() || col + 1 != header.size() ||
        header[col] != "y") {
        throw SchemaError("header must be id,f0..f{F-1},targets_<group>..,y");
    }

    const std::size_t n_columns = header.size();
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != n_columns) {
            throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(n_columns) + " fields, got " +
                              std::to_string(fields.size()));
        }
        GroupedExample ex;
        ex.features.reserve(n_features);
        for (std::size_t f = 0; f < n_features; ++f) {
            ex.features.push_back(parse_double(fields[1 + f], line_no, header[1 + f]));
        }
        for (std::size_t g = 0; g < dataset.group_names.size(); ++g) {
            ex.group_flags.push_back(
                parse_flag(fields[1 + n_features + g], line_no, header[1 + n_features + g]));
        }
        ex.toxic = parse_flag(fields.back(), line_no, "y") != 0;
        bool any_flag = false;
        for (std::uint8_t f : ex.group_flags) {
            any_flag = any_flag || f != 0;
        }
        if (!any_flag) {
            throw ValidationError("line " + std::to_string(line_no) + ": targets no group");
        }
        dataset.examples.push_back(std::move(ex));
    }
    validate_dataset(dataset);
    return dataset;
}

void save_dataset(const GroupedDataset& dataset, const std::filesystem::path& path) {
    validate_dataset(dataset);
    std::ofstream out(path);
    if (!out) {
        throw PersistenceError("cannot write dataset file: " + path.string());
    }
    out << "id";
    for (std::size_t f = 0; f < dataset.feature_dim(); ++f) {
        out << ",f" << f;
    }
    for (const auto& g : dataset.group_names) {
        out << ",targets_" << g;
    }
    out << ",y\n";
    for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
        const auto& ex = dataset.examples[i];
        out << i;
        for (double f : ex.features) {
            out << ',' << format_double(f);
        }
        for (std::uint8_t flag : ex.group_flags) {
            out << ',' << static_cast<int>(flag);
        }
        out << ',' << (ex.toxic ? 1 : 0) << '\n';
    }
    if (!out) {
        throw PersistenceError("failed while writing dataset file: " + path.string());
    }
}

std::vector<std::pair<std::string, BranchCounts>> split_summary(const GroupedDataset& dataset) {
    std::vector<std::pair<std::string, BranchCounts>> summary;
    summary.emplace_back("all", BranchCounts{});
    for (const auto& name : dataset.group_names) {
        summary.emplace_back(name, BranchCounts{});
    }
    for (const auto& ex : dataset.examples) {
        auto bump = [&](BranchCounts& c) {
            (ex.toxic ? c.toxic : c.non_toxic)++;
            ++c.total;
        };
        bump(summary[0].second);
        for (std::size_t g = 0; g < dataset.n_groups(); ++g) {
            if (ex.group_flags[g]) {
                bump(summary[g + 1].second);
            }
        }
    }
    return summary;
}

namespace {

class BinaryWriter {
public:
    explicit BinaryWriter(const std::filesystem::path& path)
        : out_(path, std::ios::binary), path_(path.string()) {
        if (!out_) {
            throw PersistenceError("cannot write model file: " + path_);
        }
    }

    void u32(std::uint32_t v) { raw_le(v); }
    void u64(std::uint64_t v) { raw_le(v); }
    void f64(double v) { raw_le(std::bit_cast<std::uint64_t>(v)); }
    void bytes(const char* data, std::size_t n) { out_.write(data, static_cast<std::streamsize>(n)); }
    void finish() {
        out_.flush();
        if (!out_) {
            throw PersistenceError("failed while writing model file: " + path_);
        }
    }

private:
    template <typename T>
    void raw_le(T v) {
        char buf[sizeof(T)];
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        }
        out_.write(buf, sizeof(T));
    }

    std::ofstream out_;
    std::string path_;
};

class BinaryReader {
public:
    explicit BinaryReader(const std::filesystem::path& path)
        : in_(path, std::ios::binary), path_(path.string()) {
        if (!in_) {
            throw PersistenceError("cannot open model file: " + path_);
        }
    }

    std::uint32_t u32() { return raw_le<std::uint32_t>(); }
    std::uint64_t u64() { return raw_le<std::uint64_t>(); }
    double f64() { return std::bit_cast<double>(raw_le<std::uint64_t>()); }
    void bytes(char* data, std::size_t n) {
        in_.read(data, static_cast<std::streamsize>(n));
        if (!in_) {
            throw PersistenceError("corrupt model file (truncated): " + path_);
        }
    }
    void expect_eof() {
        char c;
        if (in_.read(&c, 1)) {
            throw PersistenceError("corrupt model file (trailing data): " + path_);
        }
    }

private:
    template <typename T>
    T raw_le() {
        char buf[sizeof(T)];
        bytes(buf, sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            v |= static_cast<T>(static_cast<unsigned char>(buf[i])) << (8 * i);
        }
        return v;
    }

    std::ifstream in_;
    std::string path_;
};

void write_dims(BinaryWriter& w, const std::vector<std::size_t>& dims) {
    w.u64(dims.size());
    for (std::size_t d : dims) {
        w.u64(d);
    }
}

std::vector<std::size_t> read_dims(BinaryReader& r) {
    std::vector<std::size_t> dims(r.u64());
    for (auto& d : dims) {
        d = r.u64();
    }
    return dims;
}

}  // namespace

void save_model(const MtlModel& model, const std::filesystem::path& path) {
    BinaryWriter w(path);
    w.bytes(kModelMagic, sizeof(kModelMagic));
    w.u32(kModelVersion);
    w.u32(static_cast<std::uint32_t>(model.spec.variant));
    w.u64(model.spec.input_dim);
    write_dims(w, model.spec.shared_dims);
    write_dims(w, model.spec.head_dims);
    w.u64(model.spec.n_branches);
    w.u32(static_cast<std::uint32_t>(model.spec.hidden_activation));
    w.u32(static_cast<std::uint32_t>(model.spec.output_activation));
    w.u64(model.rng_seed);
    auto write_layer = [&w](const DenseLayer& layer) {
        w.u64(layer.weights.rows);
        w.u64(layer.weights.cols);
        for (double v : layer.weights.data) {
            w.f64(v);
        }
        for (double b : layer.bias) {
            w.f64(b);
        }
    };
    for (const auto& layer : model.shared_layers) {
        write_layer(layer);
    }
    for (const auto& branch : model.branch_layers) {
        for (const auto& layer : branch) {
            write_layer(layer);
        }
    }
    w.u64(model.cs_units.size());
    for (const auto& unit : model.cs_units) {
        for (double v : unit.matrix.data) {
            w.f64(v);
        }
    }
    w.finish();
}

MtlModel load_model(const std::filesystem::path& path) {
    BinaryReader r(path);
    char magic[sizeof(kModelMagic)];
    r.bytes(magic, sizeof(magic));
    if (std::memcmp(magic, kModelMagic, sizeof(kModelMagic)) != 0) {
        throw PersistenceError("not a model file: " + path.string());
    }
    const std::uint32_t version = r.u32();
    if (version != kModelVersion) {
        throw PersistenceError("unsupported model file version " + std::to_string(version) +
                               " (expected " + std::to_string(kModelVersion) + ")");
    }
    ArchitectureSpec spec;
    const std::uint32_t variant = r.u32();
    if (variant > static_cast<std::uint32_t>(ModelVariant::CsMtl)) {
        throw PersistenceError("corrupt model file (bad variant): " + path.string());
    }
    spec.variant = static_cast<ModelVariant>(variant);
    spec.input_dim = r.u64();
    spec.shared_dims = read_dims(r);
    spec.head_dims = read_dims(r);
    spec.n_branches = r.u64();
    const std::uint32_t hidden = r.u32();
    const std::uint32_t output = r.u32();
    if (hidden > static_cast<std::uint32_t>(Activation::Sigmoid) ||
        output > static_cast<std::uint32_t>(Activation::Sigmoid)) {
        throw PersistenceError("corrupt model file (bad activation): " + path.string());
    }
    spec.hidden_activation = static_cast<Activation>(hidden);
    spec.output_activation = static_cast<Activation>(output);
    const std::uint64_t seed = r.u64();

    MtlModel model;
    try {
        model = build(spec, seed);
    } catch (const ConfigError& e) {
        throw PersistenceError("corrupt model file (invalid architecture): " +
                               std::string(e.what()));
    }
    auto read_layer = [&r, &path](DenseLayer& layer) {
        const std::uint64_t rows = r.u64();
        const std::uint64_t cols = r.u64();
        if (rows != layer.weights.rows || cols != layer.weights.cols) {
            throw PersistenceError("corrupt model file (layer shape mismatch): " + path.string());
        }
        for (double& v : layer.weights.data) {
            v = r.f64();
        }
        for (double& b : layer.bias) {
            b = r.f64();
        }
    };
    for (auto& layer : model.shared_layers) {
        read_layer(layer);
    }
    for (auto& branch : model.branch_layers) {
        for (auto& layer : branch) {
            read_layer(layer);
        }
    }
    const std::uint64_t n_units = r.u64();
    if (n_units != model.cs_units.size()) {
        throw PersistenceError("corrupt model file (cross-stitch count mismatch): " +
                               path.string());
    }
    for (auto& unit : model.cs_units) {
        for (double& v : unit.matrix.data) {
            v = r.f64();
        }
    }
    r.expect_eof();
    return model;
}

TrainConfig ExperimentConfig::train_config() const {
    TrainConfig config;
    config.epochs = epochs;
    config.steps_per_epoch = steps_per_epoch;
    config.batch_size = batch_size;
    config.optimizer.learning_rate = learning_rate;
    config.seed = seed;
    config.weighting = weighting;
    config.loss = LossKind::WeightedBce;
    return config;
}

void validate_config(const ExperimentConfig& config) {
    if (config.runs == 0 || config.epochs == 0 || config.steps_per_epoch == 0 ||
        config.batch_size == 0) {
        throw ConfigError("runs, epochs, steps_per_epoch and batch_size must be positive");
    }
    if (!(config.learning_rate > 0.0)) {
        throw ConfigError("learning_rate must be positive");
    }
    if (!(config.threshold > 0.0 && config.threshold < 1.0)) {
        throw ConfigError("threshold must lie in (0, 1)");
    }
    if (config.head_dims.empty() || config.head_dims.back() != 1) {
        throw ConfigError("head_dims must end in a width-1 output layer");
    }
}

namespace {

WeightingMode weighting_from_string(const std::string& name) {
    if (name == "global") {
        return WeightingMode::Global;
    }
    if (name == "per_batch") {
        return WeightingMode::PerBatch;
    }
    throw ConfigError("weighting must be 'global' or 'per_batch', got '" + name + "'");
}

std::string to_string(WeightingMode mode) {
    return mode == WeightingMode::Global ? "global" : "per_batch";
}

LabelSchema label_schema_from_string(const std::string& name) {
    if (name == "conditional") {
        return LabelSchema::Conditional;
    }
    if (name == "traditional") {
        return LabelSchema::Traditional;
    }
    throw ConfigError("label_schema must be 'conditional' or 'traditional', got '" + name + "'");
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataFormatError("cannot open config file: " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config " + path.string() + ": " + e.what());
    }
    ExperimentConfig config;
    try {
        config.variant = variant_from_string(j.at("variant").get<std::string>());
        config.train_path = j.at("train_path").get<std::string>();
        if (j.contains("shared_dims")) {
            config.shared_dims = j["shared_dims"].get<std::vector<std::size_t>>();
        }
        if (j.contains("head_dims")) {
            config.head_dims = j["head_dims"].get<std::vector<std::size_t>>();
        }
        if (j.contains("hidden_activation")) {
            config.hidden_activation =
                activation_from_string(j["hidden_activation"].get<std::string>());
        }
        if (j.contains("output_activation")) {
            config.output_activation =
                activation_from_string(j["output_activation"].get<std::string>());
        }
        config.seed = j.value("seed", config.seed);
        config.runs = j.value("runs", config.runs);
        config.epochs = j.value("epochs", config.epochs);
        config.steps_per_epoch = j.value("steps_per_epoch", config.steps_per_epoch);
        config.batch_size = j.value("batch_size", config.batch_size);
        config.learning_rate = j.value("learning_rate", config.learning_rate);
        if (j.contains("weighting")) {
            config.weighting = weighting_from_string(j["weighting"].get<std::string>());
        }
        config.threshold = j.value("threshold", config.threshold);
        if (j.contains("test_path")) {
            config.test_path = j["test_path"].get<std::string>();
        }
        if (j.contains("label_schema")) {
            const auto schema = j["label_schema"].get<std::string>();
            if (schema != "auto") {
                config.label_schema = label_schema_from_string(schema);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config " + path.string() + ": " + e.what());
    }
    validate_config(config);
    return config;
}

void save_config(const ExperimentConfig& config, const std::filesystem::path& path) {
    nlohmann::json j;
    j["variant"] = to_string(config.variant);
    j["shared_dims"] = config.shared_dims;
    j["head_dims"] = config.head_dims;
    j["hidden_activation"] = to_string(config.hidden_activation);
    j["output_activation"] = to_string(config.output_activation);
    j["seed"] = config.seed;
    j["runs"] = config.runs;
    j["epochs"] = config.epochs;
    j["steps_per_epoch"] = config.steps_per_epoch;
    j["batch_size"] = config.batch_size;
    j["learning_rate"] = config.learning_rate;
    j["weighting"] = to_string(config.weighting);
    j["threshold"] = config.threshold;
    j["train_path"] = config.train_path;
    if (config.test_path) {
        j["test_path"] = *config.test_path;
    }
    if (config.label_schema) {
        j["label_schema"] =
            *config.label_schema == LabelSchema::Conditional ? "conditional" : "traditional";
    }
    std::ofstream out(path);
    if (!out) {
        throw PersistenceError("cannot write config file: " + path.string());
    }
    out << j.dump(2) << '\n';
}

}  // namespace condmtl
