// tumorscope command line: train, extract, classify, localize, evaluate,
// search, and synth, all driven through the C API in tumorscope.h.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or input error.
// Every setting resolves as: built-in default, then config file, then flag;
// the result is echoed to <out>/config.echo so a run can be repeated from
// its own echo.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "svgplot.hpp"
#include "tumorscope.h"

namespace {

using cli::ConfigFile;
using cli::Echo;
using cli::RunError;
using cli::UsageError;

void check(ts_status status) {
    if (status == TS_OK) return;
    if (status == TS_EINVAL || status == TS_EFORMAT) throw UsageError(ts_last_error());
    throw RunError(ts_last_error());
}

struct DatasetDeleter {
    void operator()(ts_dataset* p) const { ts_dataset_free(p); }
};
struct ModelDeleter {
    void operator()(ts_model* p) const { ts_model_free(p); }
};
struct FeaturesDeleter {
    void operator()(ts_features* p) const { ts_features_free(p); }
};
struct GridDeleter {
    void operator()(ts_grid* p) const { ts_grid_free(p); }
};
struct HeatmapDeleter {
    void operator()(ts_heatmap* p) const { ts_heatmap_free(p); }
};
struct SearchDeleter {
    void operator()(ts_search* p) const { ts_search_free(p); }
};
using DatasetPtr = std::unique_ptr<ts_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<ts_model, ModelDeleter>;
using FeaturesPtr = std::unique_ptr<ts_features, FeaturesDeleter>;
using GridPtr = std::unique_ptr<ts_grid, GridDeleter>;
using HeatmapPtr = std::unique_ptr<ts_heatmap, HeatmapDeleter>;
using SearchPtr = std::unique_ptr<ts_search, SearchDeleter>;

// Applies the default < config file < flag precedence and remembers which
// config keys the command understands, so leftovers in owned sections can
// be rejected as typos.
struct Resolve {
    const ConfigFile& file;
    std::set<std::string> known;

    bool from_file(const CLI::Option* opt, const std::string& key) {
        known.insert(key);
        return (!opt || opt->count() == 0) && file.has(key);
    }
    void str(const CLI::Option* o, const std::string& key, std::string* v) {
        if (from_file(o, key)) *v = file.get(key);
    }
    void i32(const CLI::Option* o, const std::string& key, int* v) {
        if (from_file(o, key)) *v = static_cast<int>(cli::parse_int(file.get(key), key));
    }
    void u64(const CLI::Option* o, const std::string& key, uint64_t* v) {
        if (from_file(o, key)) *v = cli::parse_uint(file.get(key), key);
    }
    void f64(const CLI::Option* o, const std::string& key, double* v) {
        if (from_file(o, key)) *v = cli::parse_double(file.get(key), key);
    }
    void boolean(const CLI::Option* o, const std::string& key, bool* v) {
        if (from_file(o, key)) *v = cli::parse_bool(file.get(key), key);
    }
    void ignore(const std::string& key) { known.insert(key); }

    void reject_unknown(std::initializer_list<const char*> owned_sections) const {
        for (const auto& [key, value] : file.values) {
            const size_t dot = key.find('.');
            if (dot == std::string::npos)
                throw UsageError("config key outside any section: " + key);
            const std::string section = key.substr(0, dot);
            const bool owned = std::any_of(owned_sections.begin(), owned_sections.end(),
                                           [&](const char* s) { return section == s; });
            if (owned && !known.count(key)) throw UsageError("unknown config key: " + key);
        }
    }
};

ConfigFile load_config(const std::string& path) {
    return path.empty() ? ConfigFile{} : cli::parse_config(path);
}

std::string prepare_out_dir(const std::string& out) {
    if (out.empty()) throw UsageError("--out is required");
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw RunError("cannot create output directory " + out + ": " + ec.message());
    return out;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void write_echo(const Echo& echo, const std::string& out, const std::string& command) {
    echo.write(join_path(out, "config.echo"), "tumorscope " + command + ", resolved configuration");
}

std::string file_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

// Positional paths ride through a config.echo round trip as a
// semicolon-joined run.inputs value.
std::string join_inputs(const std::vector<std::string>& paths) {
    std::string joined;
    for (const auto& p : paths) {
        if (!joined.empty()) joined += ';';
        joined += p;
    }
    return joined;
}

std::vector<std::string> split_inputs(const std::string& joined) {
    std::vector<std::string> paths;
    size_t start = 0;
    while (start <= joined.size()) {
        size_t end = joined.find(';', start);
        if (end == std::string::npos) end = joined.size();
        if (end > start) paths.push_back(joined.substr(start, end - start));
        start = end + 1;
    }
    return paths;
}

std::string sanitize(const std::string& id) {
    std::string out;
    for (char ch : id)
        out += std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.'
                   ? ch
                   : '_';
    return out;
}

// Filesystem-safe stem for per-image outputs: directory part joined in,
// image extension dropped.
std::string id_base(const std::string& id) {
    const std::filesystem::path p(id);
    const std::string dir = p.parent_path().string();
    const std::string stem = p.stem().string();
    return sanitize(dir.empty() ? stem : dir + "_" + stem);
}

std::array<int, 4> parse_filters(const std::string& text) {
    std::array<int, 4> out{};
    size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        const size_t comma = text.find(',', pos);
        const bool last = i == 3;
        if (last != (comma == std::string::npos))
            throw UsageError("filters: expected four comma-separated integers, got \"" + text +
                             "\"");
        const std::string part = text.substr(pos, last ? std::string::npos : comma - pos);
        out[static_cast<size_t>(i)] = static_cast<int>(cli::parse_int(part, "filters"));
        pos = comma + 1;
    }
    return out;
}

std::string filters_text(const int filters[4], char sep = ',') {
    std::string out;
    for (int i = 0; i < 4; ++i) {
        if (i) out += sep;
        out += std::to_string(filters[i]);
    }
    return out;
}

int parse_split(const std::string& text) {
    if (text == "train") return TS_SPLIT_TRAIN;
    if (text == "val") return TS_SPLIT_VAL;
    if (text == "all") return TS_SPLIT_ALL;
    throw UsageError("split: expected train, val, or all, got \"" + text + "\"");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RunError("cannot open " + path + " for writing");
    out << text;
    if (!out.flush()) throw RunError("cannot write " + path);
}

/* ---- shared dataset plumbing ---- */

struct DataOpts {
    std::string root;
    int size = 32;
    double fraction = 0.8;
    uint64_t seed = 1;
    std::string pos = "yes";
    std::string neg = "no";
    int synthetic = 0;
};

struct DataFlags {
    CLI::Option* root = nullptr;
    CLI::Option* size = nullptr;
    CLI::Option* fraction = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* pos = nullptr;
    CLI::Option* neg = nullptr;
    CLI::Option* synthetic = nullptr;
};

// with_size is off for commands whose dataset extent is dictated by the
// loaded model.
DataFlags add_data_flags(CLI::App* cmd, DataOpts* d, bool with_size, const char* seed_flag) {
    DataFlags f;
    f.root = cmd->add_option("--data", d->root, "Dataset directory with positive/negative subdirs");
    if (with_size) f.size = cmd->add_option("--size", d->size, "Target image extent in pixels");
    f.fraction = cmd->add_option("--fraction", d->fraction, "Train fraction of the stratified split");
    f.seed = cmd->add_option(seed_flag, d->seed, "Seed for the split (and synthetic generation)");
    f.pos = cmd->add_option("--pos", d->pos, "Positive-class subdirectory name");
    f.neg = cmd->add_option("--neg", d->neg, "Negative-class subdirectory name");
    f.synthetic =
        cmd->add_option("--synthetic", d->synthetic, "Generate N images per class instead of --data");
    return f;
}

void resolve_data(Resolve* r, const DataFlags& f, DataOpts* d) {
    r->str(f.root, "data.root", &d->root);
    r->i32(f.size, "data.size", &d->size);
    r->f64(f.fraction, "data.fraction", &d->fraction);
    r->u64(f.seed, "data.seed", &d->seed);
    r->str(f.pos, "data.pos", &d->pos);
    r->str(f.neg, "data.neg", &d->neg);
    r->i32(f.synthetic, "data.synthetic", &d->synthetic);
}

void echo_data(Echo* e, const DataOpts& d, int size_used) {
    e->add("data", "root", d.root);
    e->add("data", "size", static_cast<int64_t>(size_used));
    e->add("data", "fraction", d.fraction);
    e->add("data", "seed", d.seed);
    e->add("data", "pos", d.pos);
    e->add("data", "neg", d.neg);
    e->add("data", "synthetic", static_cast<int64_t>(d.synthetic));
}

DatasetPtr open_dataset(const DataOpts& d, int size) {
    ts_dataset* raw = nullptr;
    if (d.synthetic > 0) {
        check(ts_dataset_synth(d.synthetic, size, d.seed, d.fraction, &raw));
    } else {
        if (d.root.empty()) throw UsageError("no dataset: pass --data DIR or --synthetic N");
        if (!std::filesystem::is_directory(d.root))
            throw UsageError("dataset directory does not exist: " + d.root);
        check(ts_dataset_load(d.root.c_str(), size, d.fraction, d.seed, d.pos.c_str(),
                              d.neg.c_str(), &raw));
    }
    DatasetPtr ds(raw);
    for (int i = 0; i < ts_dataset_warning_count(ds.get()); ++i)
        std::fprintf(stderr, "warning: %s\n", ts_dataset_warning(ds.get(), i));
    return ds;
}

ModelPtr load_model(const std::string& path) {
    if (path.empty()) throw UsageError("--model is required");
    if (!std::filesystem::is_regular_file(path))
        throw UsageError("model checkpoint does not exist: " + path);
    ts_model* raw = nullptr;
    check(ts_model_load(path.c_str(), &raw));
    return ModelPtr(raw);
}

// Model-consuming commands take the image extent from the checkpoint; an
// explicit conflicting --size is refused rather than silently ignored.
int model_bound_size(const ts_model* model, const DataOpts& d, bool size_given) {
    const int need = ts_model_input_size(model);
    if (size_given && d.size != need)
        throw UsageError("--size " + std::to_string(d.size) +
                         " conflicts with the model's input size " + std::to_string(need));
    return need;
}

/* ---- train ---- */

struct TrainCmd {
    DataOpts data;
    DataFlags data_flags;
    std::string out;
    std::string config_path;
    int epochs = 20;
    int batch_size = 32;
    double lr = 1e-3;
    uint64_t seed = 42;
    bool deterministic = false;
    std::string filters = "32,64,128,128";
    int kernel = 3;
    double dropout = 0.3;
    CLI::Option* out_flag = nullptr;
    CLI::Option* epochs_flag = nullptr;
    CLI::Option* batch_flag = nullptr;
    CLI::Option* lr_flag = nullptr;
    CLI::Option* seed_flag = nullptr;
    CLI::Option* det_flag = nullptr;
    CLI::Option* filters_flag = nullptr;
    CLI::Option* kernel_flag = nullptr;
    CLI::Option* dropout_flag = nullptr;
};

struct TrainProgress {
    std::vector<std::array<double, 4>> rows;
};

int train_progress(void* user, int epoch, double train_loss, double train_acc, double val_loss,
                   double val_acc) {
    static_cast<TrainProgress*>(user)->rows.push_back({train_loss, train_acc, val_loss, val_acc});
    std::printf("epoch %3d  train loss %.4f acc %.4f  val loss %.4f acc %.4f\n", epoch, train_loss,
                train_acc, val_loss, val_acc);
    std::fflush(stdout);
    return 0;
}

void run_train(TrainCmd& c) {
    const ConfigFile file = load_config(c.config_path);
    Resolve r{file, {}};
    r.ignore("run.command");
    r.str(c.out_flag, "run.out", &c.out);
    resolve_data(&r, c.data_flags, &c.data);
    r.i32(c.epochs_flag, "train.epochs", &c.epochs);
    r.i32(c.batch_flag, "train.batch_size", &c.batch_size);
    r.f64(c.lr_flag, "train.lr", &c.lr);
    r.u64(c.seed_flag, "train.seed", &c.seed);
    r.boolean(c.det_flag, "train.deterministic", &c.deterministic);
    r.str(c.filters_flag, "train.filters", &c.filters);
    r.i32(c.kernel_flag, "train.kernel", &c.kernel);
    r.f64(c.dropout_flag, "train.dropout", &c.dropout);
    r.reject_unknown({"run", "data", "train"});

    const std::array<int, 4> filters = parse_filters(c.filters);
    const std::string out = prepare_out_dir(c.out);

    Echo echo;
    echo.add("run", "command", std::string("train"));
    echo.add("run", "out", out);
    echo_data(&echo, c.data, c.data.size);
    echo.add("train", "epochs", static_cast<int64_t>(c.epochs));
    echo.add("train", "batch_size", static_cast<int64_t>(c.batch_size));
    echo.add("train", "lr", c.lr);
    echo.add("train", "seed", c.seed);
    echo.add("train", "deterministic", c.deterministic);
    echo.add("train", "filters", filters_text(filters.data()));
    echo.add("train", "kernel", static_cast<int64_t>(c.kernel));
    echo.add("train", "dropout", c.dropout);
    write_echo(echo, out, "train");

    DatasetPtr ds = open_dataset(c.data, c.data.size);
    std::printf("dataset: %d images (%d train / %d val)\n", ts_dataset_size(ds.get()),
                ts_dataset_count(ds.get(), 0, TS_SPLIT_TRAIN) +
                    ts_dataset_count(ds.get(), 1, TS_SPLIT_TRAIN),
                ts_dataset_count(ds.get(), 0, TS_SPLIT_VAL) +
                    ts_dataset_count(ds.get(), 1, TS_SPLIT_VAL));

    ts_train_params params;
    ts_train_params_init(&params);
    params.epochs = c.epochs;
    params.batch_size = c.batch_size;
    params.lr = c.lr;
    params.seed = c.seed;
    params.deterministic = c.deterministic ? 1 : 0;
    for (int i = 0; i < 4; ++i) params.filters[i] = filters[static_cast<size_t>(i)];
    params.kernel = c.kernel;
    params.dropout = c.dropout;

    TrainProgress progress;
    ts_model* raw = nullptr;
    check(ts_model_train(ds.get(), &params, train_progress, &progress, &raw));
    ModelPtr model(raw);

    check(ts_model_save(model.get(), join_path(out, "model.tsck").c_str()));
    check(ts_model_write_epochs_csv(model.get(), join_path(out, "epochs.csv").c_str()));
    cli::write_training_curves_svg(join_path(out, "curves.svg"), progress.rows);
    std::printf("best val accuracy %.4f at epoch %d; checkpoint %s\n",
                ts_model_best_val_accuracy(model.get()), ts_model_trained_epochs(model.get()),
                join_path(out, "model.tsck").c_str());
}

/* ---- extract ---- */

struct ExtractCmd {
    DataOpts data;
    DataFlags data_flags;
    std::string out;
    std::string config_path;
    std::string model_path;
    std::string split = "all";
    bool val_only = false;
    int batch_size = 32;
    CLI::Option* out_flag = nullptr;
    CLI::Option* model_flag = nullptr;
    CLI::Option* split_flag = nullptr;
    CLI::Option* batch_flag = nullptr;
};

void run_extract(ExtractCmd& c) {
    const ConfigFile file = load_config(c.config_path);
    Resolve r{file, {}};
    r.ignore("run.command");
    r.str(c.out_flag, "run.out", &c.out);
    r.str(c.model_flag, "run.model", &c.model_path);
    resolve_data(&r, c.data_flags, &c.data);
    r.str(c.split_flag, "extract.split", &c.split);
    r.i32(c.batch_flag, "extract.batch_size", &c.batch_size);
    r.reject_unknown({"run", "data", "extract"});
    if (c.val_only) c.split = "val";
    const int split = parse_split(c.split);
    if (c.model_path.empty())
        throw UsageError("--model is required (or run.model in a config)");

    ModelPtr model = load_model(c.model_path);
    const int size = model_bound_size(model.get(), c.data, file.has("data.size"));
    const std::string out = prepare_out_dir(c.out);

    Echo echo;
    echo.add("run", "command", std::string("extract"));
    echo.add("run", "out", out);
    echo.add("run", "model", c.model_path);
    echo_data(&echo, c.data, size);
    echo.add("extract", "split", c.split);
    echo.add("extract", "batch_size", static_cast<int64_t>(c.batch_size));
    write_echo(echo, out, "extract");

    DatasetPtr ds = open_dataset(c.data, size);
    ts_features* raw = nullptr;
    check(ts_features_extract(model.get(), ds.get(), split, c.batch_size, &raw));
    FeaturesPtr features(raw);
    const std::string path = join_path(out, "features.csv");
    check(ts_features_write(features.get(), path.c_str()));
    std::printf("wrote %d rows x %d features to %s\n", ts_features_rows(features.get()),
                ts_features_dim(features.get()), path.c_str());
}

/* ---- classify ---- */

struct ClassifyCmd {
    std::vector<std::string> files;
    std::string out;
    std::string config_path;
    double split_fraction = 0.8;
    uint64_t split_seed = 1;
    ts_classifier_params params{};
    CLI::Option* out_flag = nullptr;
    CLI::Option* fraction_flag = nullptr;
    CLI::Option* seed_flag = nullptr;
    CLI::Option* knn_k = nullptr;
    CLI::Option* logistic_l2 = nullptr;
    CLI::Option* logistic_epochs = nullptr;
    CLI::Option* logistic_lr = nullptr;
    CLI::Option* svm_c = nullptr;
    CLI::Option* svm_epochs = nullptr;
    CLI::Option* svm_lr = nullptr;
    CLI::Option* rf_trees = nullptr;
    CLI::Option* rf_depth = nullptr;
    CLI::Option* rf_seed = nullptr;
    CLI::Option* mlp_hidden = nullptr;
    CLI::Option* mlp_epochs = nullptr;
    CLI::Option* mlp_lr = nullptr;
    CLI::Option* mlp_seed = nullptr;
};

const char* kClassifierNames[] = {"knn", "logistic", "svm", "naive_bayes", "random_forest", "mlp"};

void run_classify(ClassifyCmd& c) {
    const ConfigFile file = load_config(c.config_path);
    Resolve r{file, {}};
    r.ignore("run.command");
    r.ignore("run.inputs");
    r.str(c.out_flag, "run.out", &c.out);
    r.f64(c.fraction_flag, "classify.split_fraction", &c.split_fraction);
    r.u64(c.seed_flag, "classify.split_seed", &c.split_seed);
    r.i32(c.knn_k, "classify.knn_k", &c.params.knn_k);
    r.f64(c.logistic_l2, "classify.logistic_l2", &c.params.logistic_l2);
    r.i32(c.logistic_epochs, "classify.logistic_epochs", &c.params.logistic_epochs);
    r.f64(c.logistic_lr, "classify.logistic_lr", &c.params.logistic_lr);
    r.f64(c.svm_c, "classify.svm_c", &c.params.svm_c);
    r.i32(c.svm_epochs, "classify.svm_epochs", &c.params.svm_epochs);
    r.f64(c.svm_lr, "classify.svm_lr", &c.params.svm_lr);
    r.i32(c.rf_trees, "classify.rf_trees", &c.params.rf_trees);
    r.i32(c.rf_depth, "classify.rf_max_depth", &c.params.rf_max_depth);
    r.u64(c.rf_seed, "classify.rf_seed", &c.params.rf_seed);
    r.i32(c.mlp_hidden, "classify.mlp_hidden", &c.params.mlp_hidden);
    r.i32(c.mlp_epochs, "classify.mlp_epochs", &c.params.mlp_epochs);
    r.f64(c.mlp_lr, "classify.mlp_lr", &c.params.mlp_lr);
    r.u64(c.mlp_seed, "classify.mlp_seed", &c.params.mlp_seed);
    r.reject_unknown({"run", "classify"});

    if (c.files.empty() && file.has("run.inputs")) c.files = split_inputs(file.get("run.inputs"));
    if (c.files.empty()) throw UsageError("classify needs at least one feature CSV");
    for (const auto& f : c.files)
        if (!std::filesystem::is_regular_file(f))
            throw UsageError("feature file does not exist: " + f);
    const std::string out = prepare_out_dir(c.out);

    Echo echo;
    echo.add("run", "command", std::string("classify"));
    echo.add("run", "out", out);
    echo.add("run", "inputs", join_inputs(c.files));
    echo.add("classify", "split_fraction", c.split_fraction);
    echo.add("classify", "split_seed", c.split_seed);
    echo.add("classify", "knn_k", static_cast<int64_t>(c.params.knn_k));
    echo.add("classify", "logistic_l2", c.params.logistic_l2);
    echo.add("classify", "logistic_epochs", static_cast<int64_t>(c.params.logistic_epochs));
    echo.add("classify", "logistic_lr", c.params.logistic_lr);
    echo.add("classify", "svm_c", c.params.svm_c);
    echo.add("classify", "svm_epochs", static_cast<int64_t>(c.params.svm_epochs));
    echo.add("classify", "svm_lr", c.params.svm_lr);
    echo.add("classify", "rf_trees", static_cast<int64_t>(c.params.rf_trees));
    echo.add("classify", "rf_max_depth", static_cast<int64_t>(c.params.rf_max_depth));
    echo.add("classify", "rf_seed", c.params.rf_seed);
    echo.add("classify", "mlp_hidden", static_cast<int64_t>(c.params.mlp_hidden));
    echo.add("classify", "mlp_epochs", static_cast<int64_t>(c.params.mlp_epochs));
    echo.add("classify", "mlp_lr", c.params.mlp_lr);
    echo.add("classify", "mlp_seed", c.params.mlp_seed);
    write_echo(echo, out, "classify");

    std::string grid_csv = "model";
    for (const char* name : kClassifierNames) grid_csv += std::string(",") + name;
    grid_csv += "\n";
    std::string table;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-18s", "model");
    table += buf;
    for (const char* name : kClassifierNames) {
        std::snprintf(buf, sizeof(buf), "%-15s", name);
        table += buf;
    }
    table += "\n";

    const std::string metrics_path = join_path(out, "metrics.csv");
    for (size_t fi = 0; fi < c.files.size(); ++fi) {
        const std::string name = file_stem(c.files[fi]);
        ts_features* raw = nullptr;
        check(ts_features_read(c.files[fi].c_str(), &raw));
        FeaturesPtr features(raw);

        ts_features* tr_raw = nullptr;
        ts_features* ev_raw = nullptr;
        check(ts_features_split(features.get(), c.split_fraction, c.split_seed, &tr_raw, &ev_raw));
        FeaturesPtr train_rows(tr_raw);
        FeaturesPtr eval_rows(ev_raw);

        ts_grid* grid_raw = nullptr;
        check(ts_grid_fit(train_rows.get(), eval_rows.get(), &c.params, &grid_raw));
        GridPtr grid(grid_raw);

        grid_csv += name;
        std::snprintf(buf, sizeof(buf), "%-18s", name.c_str());
        table += buf;
        for (int i = 0; i < ts_grid_size(grid.get()); ++i) {
            std::string cell = "err";
            double acc = 0.0;
            if (ts_grid_ok(grid.get(), i) &&
                ts_grid_metric(grid.get(), i, TS_METRIC_ACCURACY, &acc)) {
                std::snprintf(buf, sizeof(buf), "%.4f", acc);
                cell = buf;
            } else if (!ts_grid_ok(grid.get(), i)) {
                std::fprintf(stderr, "warning: %s on %s failed: %s\n",
                             ts_grid_name(grid.get(), i), name.c_str(),
                             ts_grid_error(grid.get(), i));
            }
            grid_csv += "," + cell;
            std::snprintf(buf, sizeof(buf), "%-15s", cell.c_str());
            table += buf;
        }
        grid_csv += "\n";
        table += "\n";
        check(ts_grid_write_csv(grid.get(), name.c_str(), metrics_path.c_str(), fi > 0 ? 1 : 0));
    }

    write_text(join_path(out, "grid.csv"), grid_csv);
    write_text(join_path(out, "grid.txt"), table);
    std::fputs(table.c_str(), stdout);
    std::printf("wrote %s, grid.txt, metrics.csv\n", join_path(out, "grid.csv").c_str());
}

/* ---- localize ---- */

struct LocalizeCmd {
    DataOpts data;
    DataFlags data_flags;
    std::vector<std::string> images;
    std::string out;
    std::string config_path;
    std::string model_path;
    std::string split = "val";
    int target_class = -1;
    double alpha = 0.35;
    bool nearest = false;
    int limit = 0;
    CLI::Option* out_flag = nullptr;
    CLI::Option* model_flag = nullptr;
    CLI::Option* split_flag = nullptr;
    CLI::Option* class_flag = nullptr;
    CLI::Option* alpha_flag = nullptr;
    CLI::Option* nearest_flag = nullptr;
    CLI::Option* limit_flag = nullptr;
};

void run_localize(LocalizeCmd& c) {
    const ConfigFile file = load_config(c.config_path);
    Resolve r{file, {}};
    r.ignore("run.command");
    r.ignore("run.inputs");
    r.str(c.out_flag, "run.out", &c.out);
    r.str(c.model_flag, "run.model", &c.model_path);
    resolve_data(&r, c.data_flags, &c.data);
    r.str(c.split_flag, "localize.split", &c.split);
    r.i32(c.class_flag, "localize.class", &c.target_class);
    r.f64(c.alpha_flag, "localize.alpha", &c.alpha);
    r.boolean(c.nearest_flag, "localize.nearest", &c.nearest);
    r.i32(c.limit_flag, "localize.limit", &c.limit);
    r.reject_unknown({"run", "data", "localize"});
    if (c.target_class < -1 || c.target_class > 1)
        throw UsageError("--class must be 0, 1, or -1 for the predicted class");
    const bool data_on_cli = (c.data_flags.root && c.data_flags.root->count() > 0) ||
                             (c.data_flags.synthetic && c.data_flags.synthetic->count() > 0);
    if (c.images.empty() && !data_on_cli && file.has("run.inputs"))
        c.images = split_inputs(file.get("run.inputs"));
    if (c.model_path.empty())
        throw UsageError("--model is required (or run.model in a config)");

    ModelPtr model = load_model(c.model_path);
    const int size = model_bound_size(model.get(), c.data, file.has("data.size"));
    const std::string out = prepare_out_dir(c.out);

    Echo echo;
    echo.add("run", "command", std::string("localize"));
    echo.add("run", "out", out);
    echo.add("run", "model", c.model_path);
    if (!c.images.empty()) echo.add("run", "inputs", join_inputs(c.images));
    echo_data(&echo, c.data, size);
    echo.add("localize", "split", c.split);
    echo.add("localize", "class", static_cast<int64_t>(c.target_class));
    echo.add("localize", "alpha", c.alpha);
    echo.add("localize", "nearest", c.nearest);
    echo.add("localize", "limit", static_cast<int64_t>(c.limit));
    write_echo(echo, out, "localize");

    DatasetPtr ds;
    int split = parse_split(c.split);
    if (!c.images.empty()) {
        for (const auto& p : c.images)
            if (!std::filesystem::is_regular_file(p))
                throw UsageError("image does not exist: " + p);
        std::vector<const char*> paths;
        for (const auto& p : c.images) paths.push_back(p.c_str());
        ts_dataset* raw = nullptr;
        check(ts_dataset_from_files(paths.data(), static_cast<int>(paths.size()), size, &raw));
        ds.reset(raw);
        split = TS_SPLIT_ALL;
    } else {
        ds = open_dataset(c.data, size);
    }

    std::vector<int> selected;
    for (int i = 0; i < ts_dataset_size(ds.get()); ++i) {
        if (split != TS_SPLIT_ALL && ts_dataset_image_split(ds.get(), i) != split) continue;
        selected.push_back(i);
        if (c.limit > 0 && static_cast<int>(selected.size()) == c.limit) break;
    }
    if (selected.empty()) throw UsageError("no images selected for localization");

    std::string summary = "id,predicted_class,target_class,degenerate\n";
    int failures = 0;
    for (size_t n = 0; n < selected.size(); ++n) {
        const int idx = selected[n];
        const std::string id = ts_dataset_image_id(ds.get(), idx);
        try {
            int predicted = -1;
            check(ts_model_predict(model.get(), ds.get(), idx, &predicted));
            const int target = c.target_class == -1 ? predicted : c.target_class;
            ts_heatmap* raw = nullptr;
            check(ts_gradcam(model.get(), ds.get(), idx, target, c.nearest ? 1 : 0, &raw));
            HeatmapPtr heat(raw);

            char prefix[32];
            std::snprintf(prefix, sizeof(prefix), "img-%03zu-", n);
            const std::string base = prefix + id_base(id);
            check(ts_heatmap_write_pgm(heat.get(), join_path(out, base + ".pgm").c_str()));
            check(ts_heatmap_write_overlay(heat.get(), ds.get(), idx, c.alpha,
                                           join_path(out, base + "_overlay.ppm").c_str()));
            check(ts_heatmap_write_sidecar(heat.get(), join_path(out, base + ".txt").c_str()));

            const bool degenerate = ts_heatmap_degenerate(heat.get()) != 0;
            summary += id + "," + std::to_string(predicted) + "," + std::to_string(target) + "," +
                       (degenerate ? "yes" : "no") + "\n";
            std::printf("%s: predicted %d, target %d%s\n", id.c_str(), predicted, target,
                        degenerate ? " (degenerate map, no positive evidence)" : "");
        } catch (const std::exception& e) {
            ++failures;
            std::fprintf(stderr, "warning: %s failed: %s\n", id.c_str(), e.what());
        }
    }
    write_text(join_path(out, "localize.csv"), summary);
    if (failures == static_cast<int>(selected.size()))
        throw RunError("localization failed for all " + std::to_string(failures) + " images");
    if (failures > 0)
        std::fprintf(stderr, "warning: %d of %zu images failed\n", failures, selected.size());
}

/* ---- evaluate ---- */

struct EvaluateCmd {
    DataOpts data;
    DataFlags data_flags;
    std::string out;
    std::string config_path;
    std::string model_path;
    std::string split = "val";
    std::string name;
    int batch_size = 32;
    CLI::Option* out_flag = nullptr;
    CLI::Option* model_flag = nullptr;
    CLI::Option* split_flag = nullptr;
    CLI::Option* name_flag = nullptr;
    CLI::Option* batch_flag = nullptr;
};

void run_evaluate(EvaluateCmd& c) {
    const ConfigFile file = load_config(c.config_path);
    Resolve r{file, {}};
    r.ignore("run.command");
    r.str(c.out_flag, "run.out", &c.out);
    r.str(c.model_flag, "run.model", &c.model_path);
    resolve_data(&r, c.data_flags, &c.data);
    r.str(c.split_flag, "evaluate.split", &c.split);
    r.str(c.name_flag, "evaluate.name", &c.name);
    r.i32(c.batch_flag, "evaluate.batch_size", &c.batch_size);
    r.reject_unknown({"run", "data", "evaluate"});
    const int split = parse_split(c.split);
    if (c.model_path.empty())
        throw UsageError("--model is required (or run.model in a config)");

    ModelPtr model = load_model(c.model_path);
    const int size = model_bound_size(model.get(), c.data, file.has("data.size"));
    if (c.name.empty()) c.name = "scratch";
    const std::string out = prepare_out_dir(c.out);

    Echo echo;
    echo.add("run", "command", std::string("evaluate"));
    echo.add("run", "out", out);
    echo.add("run", "model", c.model_path);
    echo_data(&echo, c.data, size);
    echo.add("evaluate", "split", c.split);
    echo.add("evaluate", "name", c.name);
    echo.add("evaluate", "batch_size", static_cast<int64_t>(c.batch_size));
    write_echo(echo, out, "evaluate");

    DatasetPtr ds = open_dataset(c.data, size);
    double loss = 0.0;
    double accuracy = 0.0;
    check(ts_model_evaluate(model.get(), ds.get(), split, c.batch_size, &loss, &accuracy));
    const std::string path = join_path(out, "metrics.csv");
    check(ts_model_write_metrics_csv(model.get(), ds.get(), split, c.batch_size, c.name.c_str(),
                                     "cnn", path.c_str()));
    std::printf("%s split: loss %.4f, accuracy %.4f; metrics in %s\n", c.split.c_str(), loss,
                accuracy, path.c_str());
}

/* ---- search ---- */

struct SearchCmd {
    DataOpts data;
    DataFlags data_flags;
    std::string out;
    std::string config_path;
    int trials = 10;
    int budget_epochs = 3;
    uint64_t seed = 7;
    CLI::Option* out_flag = nullptr;
    CLI::Option* trials_flag = nullptr;
    CLI::Option* budget_flag = nullptr;
    CLI::Option* seed_flag = nullptr;
};

void run_search(SearchCmd& c) {
    const ConfigFile file = load_config(c.config_path);
    Resolve r{file, {}};
    r.ignore("run.command");
    r.str(c.out_flag, "run.out", &c.out);
    resolve_data(&r, c.data_flags, &c.data);
    r.i32(c.trials_flag, "search.trials", &c.trials);
    r.i32(c.budget_flag, "search.budget_epochs", &c.budget_epochs);
    r.u64(c.seed_flag, "search.seed", &c.seed);
    r.reject_unknown({"run", "data", "search"});
    const std::string out = prepare_out_dir(c.out);

    Echo echo;
    echo.add("run", "command", std::string("search"));
    echo.add("run", "out", out);
    echo_data(&echo, c.data, c.data.size);
    echo.add("search", "trials", static_cast<int64_t>(c.trials));
    echo.add("search", "budget_epochs", static_cast<int64_t>(c.budget_epochs));
    echo.add("search", "seed", c.seed);
    write_echo(echo, out, "search");

    DatasetPtr ds = open_dataset(c.data, c.data.size);
    ts_search* raw = nullptr;
    check(ts_search_run(ds.get(), c.trials, c.budget_epochs, c.seed, &raw));
    SearchPtr search(raw);

    std::string csv =
        "trial,filters,kernel,dropout,lr,batch_size,val_accuracy,val_loss,diverged\n";
    for (int i = 0; i < ts_search_trial_count(search.get()); ++i) {
        ts_trial t;
        check(ts_search_trial(search.get(), i, &t));
        csv += std::to_string(t.index) + "," + filters_text(t.filters, 'x') + "," +
               std::to_string(t.kernel) + "," + cli::format_double(t.dropout) + "," +
               cli::format_double(t.lr) + "," + std::to_string(t.batch_size) + "," +
               cli::format_double(t.val_accuracy) + "," + cli::format_double(t.val_loss) + "," +
               (t.diverged ? "yes" : "no") + "\n";
        std::printf("trial %2d: filters %s kernel %d dropout %.3f lr %.5f batch %d -> val %.4f%s\n",
                    t.index, filters_text(t.filters).c_str(), t.kernel, t.dropout, t.lr,
                    t.batch_size, t.val_accuracy, t.diverged ? " (diverged)" : "");
    }
    write_text(join_path(out, "search.csv"), csv);

    ts_trial best;
    check(ts_search_trial(search.get(), ts_search_best_index(search.get()), &best));
    Echo best_echo;
    best_echo.add("train", "filters", filters_text(best.filters));
    best_echo.add("train", "kernel", static_cast<int64_t>(best.kernel));
    best_echo.add("train", "dropout", best.dropout);
    best_echo.add("train", "lr", best.lr);
    best_echo.add("train", "batch_size", static_cast<int64_t>(best.batch_size));
    best_echo.write(join_path(out, "best.config"),
                    "search best trial, reusable via train --config");
    std::printf("best trial %d: val accuracy %.4f; settings in %s\n", best.index,
                best.val_accuracy, join_path(out, "best.config").c_str());
}

/* ---- synth ---- */

struct SynthCmd {
    std::string out;
    std::string config_path;
    int per_class = 200;
    int size = 64;
    uint64_t seed = 1;
    double fraction = 0.8;
    std::string pos = "yes";
    std::string neg = "no";
    CLI::Option* out_flag = nullptr;
    CLI::Option* per_class_flag = nullptr;
    CLI::Option* size_flag = nullptr;
    CLI::Option* seed_flag = nullptr;
    CLI::Option* fraction_flag = nullptr;
    CLI::Option* pos_flag = nullptr;
    CLI::Option* neg_flag = nullptr;
};

void run_synth(SynthCmd& c) {
    const ConfigFile file = load_config(c.config_path);
    Resolve r{file, {}};
    r.ignore("run.command");
    r.str(c.out_flag, "run.out", &c.out);
    r.i32(c.per_class_flag, "synth.per_class", &c.per_class);
    r.i32(c.size_flag, "synth.size", &c.size);
    r.u64(c.seed_flag, "synth.seed", &c.seed);
    r.f64(c.fraction_flag, "synth.fraction", &c.fraction);
    r.str(c.pos_flag, "synth.pos", &c.pos);
    r.str(c.neg_flag, "synth.neg", &c.neg);
    r.reject_unknown({"run", "synth"});
    const std::string out = prepare_out_dir(c.out);

    Echo echo;
    echo.add("run", "command", std::string("synth"));
    echo.add("run", "out", out);
    echo.add("synth", "per_class", static_cast<int64_t>(c.per_class));
    echo.add("synth", "size", static_cast<int64_t>(c.size));
    echo.add("synth", "seed", c.seed);
    echo.add("synth", "fraction", c.fraction);
    echo.add("synth", "pos", c.pos);
    echo.add("synth", "neg", c.neg);
    write_echo(echo, out, "synth");

    ts_dataset* raw = nullptr;
    check(ts_dataset_synth(c.per_class, c.size, c.seed, c.fraction, &raw));
    DatasetPtr ds(raw);
    check(ts_dataset_export(ds.get(), out.c_str(), c.pos.c_str(), c.neg.c_str()));
    check(ts_dataset_write_manifest(ds.get(), join_path(out, "manifest.tsv").c_str()));
    check(ts_dataset_write_truth(ds.get(), join_path(out, "truth.csv").c_str()));
    std::printf("wrote %d images per class at %dx%d under %s (manifest.tsv, truth.csv)\n",
                c.per_class, c.size, c.size, out.c_str());
}

void add_config_flag(CLI::App* cmd, std::string* config_path) {
    cmd->add_option("--config", *config_path, "Config file; flags override its values");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Brain-MRI tumor pipeline: scratch CNN, feature classifiers, Grad-CAM"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ts_version()));

    TrainCmd train_cmd;
    CLI::App* train = app.add_subcommand("train", "Train the CNN and write the best checkpoint");
    train_cmd.out_flag = train->add_option("--out", train_cmd.out, "Output directory");
    add_config_flag(train, &train_cmd.config_path);
    train_cmd.data_flags = add_data_flags(train, &train_cmd.data, true, "--split-seed");
    train_cmd.epochs_flag = train->add_option("--epochs", train_cmd.epochs, "Training epochs");
    train_cmd.batch_flag = train->add_option("--batch-size", train_cmd.batch_size, "Batch size");
    train_cmd.lr_flag = train->add_option("--lr", train_cmd.lr, "Adam learning rate");
    train_cmd.seed_flag = train->add_option("--seed", train_cmd.seed, "Training seed");
    train_cmd.det_flag =
        train->add_flag("--deterministic", train_cmd.deterministic, "Bit-reproducible runs");
    train_cmd.filters_flag =
        train->add_option("--filters", train_cmd.filters, "Conv widths, e.g. 32,64,128,128");
    train_cmd.kernel_flag = train->add_option("--kernel", train_cmd.kernel, "Conv kernel extent");
    train_cmd.dropout_flag = train->add_option("--dropout", train_cmd.dropout, "Dropout rate");
    train->callback([&] { run_train(train_cmd); });

    ExtractCmd extract_cmd;
    CLI::App* extract =
        app.add_subcommand("extract", "Write flatten-layer features for a dataset");
    extract_cmd.out_flag = extract->add_option("--out", extract_cmd.out, "Output directory");
    add_config_flag(extract, &extract_cmd.config_path);
    extract_cmd.model_flag =
        extract->add_option("--model", extract_cmd.model_path, "Trained checkpoint");
    extract_cmd.data_flags = add_data_flags(extract, &extract_cmd.data, false, "--seed");
    extract_cmd.split_flag =
        extract->add_option("--split", extract_cmd.split, "Rows to extract: train, val, or all");
    extract->add_flag("--val-only", extract_cmd.val_only, "Shorthand for --split val");
    extract_cmd.batch_flag =
        extract->add_option("--batch-size", extract_cmd.batch_size, "Forward batch size");
    extract->callback([&] { run_extract(extract_cmd); });

    ClassifyCmd classify_cmd;
    CLI::App* classify =
        app.add_subcommand("classify", "Fit the six classifiers on feature CSVs");
    classify->add_option("files", classify_cmd.files, "Feature CSV files (one grid row each)");
    classify_cmd.out_flag = classify->add_option("--out", classify_cmd.out, "Output directory");
    add_config_flag(classify, &classify_cmd.config_path);
    ts_classifier_params_init(&classify_cmd.params);
    classify_cmd.fraction_flag = classify->add_option(
        "--split-fraction", classify_cmd.split_fraction, "Train fraction of each feature file");
    classify_cmd.seed_flag =
        classify->add_option("--seed", classify_cmd.split_seed, "Seed for the row split");
    classify_cmd.knn_k = classify->add_option("--knn-k", classify_cmd.params.knn_k, "KNN votes");
    classify_cmd.logistic_l2 =
        classify->add_option("--logistic-l2", classify_cmd.params.logistic_l2, "Logistic L2");
    classify_cmd.logistic_epochs = classify->add_option(
        "--logistic-epochs", classify_cmd.params.logistic_epochs, "Logistic epochs");
    classify_cmd.logistic_lr =
        classify->add_option("--logistic-lr", classify_cmd.params.logistic_lr, "Logistic rate");
    classify_cmd.svm_c = classify->add_option("--svm-c", classify_cmd.params.svm_c, "SVM C");
    classify_cmd.svm_epochs =
        classify->add_option("--svm-epochs", classify_cmd.params.svm_epochs, "SVM epochs");
    classify_cmd.svm_lr = classify->add_option("--svm-lr", classify_cmd.params.svm_lr, "SVM rate");
    classify_cmd.rf_trees =
        classify->add_option("--rf-trees", classify_cmd.params.rf_trees, "Forest size");
    classify_cmd.rf_depth =
        classify->add_option("--rf-depth", classify_cmd.params.rf_max_depth, "Tree depth cap");
    classify_cmd.rf_seed =
        classify->add_option("--rf-seed", classify_cmd.params.rf_seed, "Forest seed");
    classify_cmd.mlp_hidden =
        classify->add_option("--mlp-hidden", classify_cmd.params.mlp_hidden, "MLP hidden width");
    classify_cmd.mlp_epochs =
        classify->add_option("--mlp-epochs", classify_cmd.params.mlp_epochs, "MLP epochs");
    classify_cmd.mlp_lr = classify->add_option("--mlp-lr", classify_cmd.params.mlp_lr, "MLP rate");
    classify_cmd.mlp_seed =
        classify->add_option("--mlp-seed", classify_cmd.params.mlp_seed, "MLP seed");
    classify->callback([&] { run_classify(classify_cmd); });

    LocalizeCmd localize_cmd;
    CLI::App* localize =
        app.add_subcommand("localize", "Write Grad-CAM heatmaps and overlays per image");
    localize->add_option("images", localize_cmd.images,
                         "Explicit image files (otherwise --data/--synthetic)");
    localize_cmd.out_flag = localize->add_option("--out", localize_cmd.out, "Output directory");
    add_config_flag(localize, &localize_cmd.config_path);
    localize_cmd.model_flag =
        localize->add_option("--model", localize_cmd.model_path, "Trained checkpoint");
    localize_cmd.data_flags = add_data_flags(localize, &localize_cmd.data, false, "--seed");
    localize_cmd.split_flag =
        localize->add_option("--split", localize_cmd.split, "Dataset rows to map: train, val, all");
    localize_cmd.class_flag = localize->add_option(
        "--class", localize_cmd.target_class, "Target class (0/1); -1 follows the prediction");
    localize_cmd.alpha_flag =
        localize->add_option("--alpha", localize_cmd.alpha, "Overlay blend weight in [0,1]");
    localize_cmd.nearest_flag =
        localize->add_flag("--nearest", localize_cmd.nearest, "Blocky nearest upsampling");
    localize_cmd.limit_flag =
        localize->add_option("--limit", localize_cmd.limit, "Map at most N images (0 = all)");
    localize->callback([&] { run_localize(localize_cmd); });

    EvaluateCmd evaluate_cmd;
    CLI::App* evaluate =
        app.add_subcommand("evaluate", "Metrics CSV for CNN argmax on one split");
    evaluate_cmd.out_flag = evaluate->add_option("--out", evaluate_cmd.out, "Output directory");
    add_config_flag(evaluate, &evaluate_cmd.config_path);
    evaluate_cmd.model_flag =
        evaluate->add_option("--model", evaluate_cmd.model_path, "Trained checkpoint");
    evaluate_cmd.data_flags = add_data_flags(evaluate, &evaluate_cmd.data, false, "--seed");
    evaluate_cmd.split_flag =
        evaluate->add_option("--split", evaluate_cmd.split, "Split to score: train, val, or all");
    evaluate_cmd.name_flag = evaluate->add_option("--name", evaluate_cmd.name,
                                                  "Model column in the CSV (default scratch)");
    evaluate_cmd.batch_flag =
        evaluate->add_option("--batch-size", evaluate_cmd.batch_size, "Forward batch size");
    evaluate->callback([&] { run_evaluate(evaluate_cmd); });

    SearchCmd search_cmd;
    CLI::App* search = app.add_subcommand("search", "Random hyperparameter search");
    search_cmd.out_flag = search->add_option("--out", search_cmd.out, "Output directory");
    add_config_flag(search, &search_cmd.config_path);
    search_cmd.data_flags = add_data_flags(search, &search_cmd.data, true, "--split-seed");
    search_cmd.trials_flag = search->add_option("--trials", search_cmd.trials, "Trial count");
    search_cmd.budget_flag =
        search->add_option("--budget", search_cmd.budget_epochs, "Epochs per trial");
    search_cmd.seed_flag = search->add_option("--seed", search_cmd.seed, "Search seed");
    search->callback([&] { run_search(search_cmd); });

    SynthCmd synth_cmd;
    CLI::App* synth =
        app.add_subcommand("synth", "Generate a synthetic dataset on disk");
    synth_cmd.out_flag = synth->add_option("--out", synth_cmd.out, "Output directory");
    add_config_flag(synth, &synth_cmd.config_path);
    synth_cmd.per_class_flag =
        synth->add_option("--per-class", synth_cmd.per_class, "Images per class");
    synth_cmd.size_flag = synth->add_option("--size", synth_cmd.size, "Image extent in pixels");
    synth_cmd.seed_flag = synth->add_option("--seed", synth_cmd.seed, "Generation seed");
    synth_cmd.fraction_flag =
        synth->add_option("--fraction", synth_cmd.fraction, "Train fraction in the manifest");
    synth_cmd.pos_flag = synth->add_option("--pos", synth_cmd.pos, "Positive subdirectory name");
    synth_cmd.neg_flag = synth->add_option("--neg", synth_cmd.neg, "Negative subdirectory name");
    synth->callback([&] { run_synth(synth_cmd); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const RunError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
