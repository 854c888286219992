// Implements the C surface declared in include/tumorscope.h. Each handle
// wraps one core object; every entry point funnels through guard(), which
// converts thrown errors into status codes and stashes the message for
// ts_last_error().

#include "tumorscope.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "classifiers.hpp"
#include "common.hpp"
#include "dataset.hpp"
#include "features.hpp"
#include "gradcam.hpp"
#include "image.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "persistence.hpp"
#include "rng.hpp"
#include "train.hpp"

struct ts_dataset {
    ts::Dataset data;
    std::vector<std::string> warnings;
};

struct ts_model {
    ts::Model<float> model;
    std::vector<ts::EpochLog> logs;
};

struct ts_features {
    ts::FeatureMatrix fm;
};

struct ts_grid {
    std::vector<ts::GridEntry> entries;
};

struct ts_heatmap {
    ts::Heatmap h;
};

struct ts_search {
    ts::SearchResult result;
};

namespace {

thread_local std::string g_last_error = "no error";

ts_status status_of(ts::ErrorKind kind) {
    switch (kind) {
        case ts::ErrorKind::invalid_argument: return TS_EINVAL;
        case ts::ErrorKind::io: return TS_EIO;
        case ts::ErrorKind::format: return TS_EFORMAT;
        case ts::ErrorKind::runtime: return TS_ERUNTIME;
    }
    return TS_ERUNTIME;
}

template <typename Fn>
ts_status guard(Fn&& fn) {
    try {
        fn();
        return TS_OK;
    } catch (const ts::Error& e) {
        g_last_error = e.what();
        return status_of(e.kind());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TS_ERUNTIME;
    }
}

void require(bool ok, const char* what) {
    if (!ok) ts::fail_invalid(std::string(what));
}

const ts::LabeledImage& image_at(const ts_dataset* ds, int index) {
    require(ds != nullptr, "dataset handle is null");
    require(index >= 0 && index < static_cast<int>(ds->data.images.size()),
            "image index out of range");
    return ds->data.images[static_cast<size_t>(index)];
}

std::vector<const ts::LabeledImage*> split_members(const ts_dataset* ds, int split) {
    require(ds != nullptr, "dataset handle is null");
    if (split == TS_SPLIT_ALL) {
        std::vector<const ts::LabeledImage*> all;
        for (const auto& im : ds->data.images) all.push_back(&im);
        return all;
    }
    require(split == TS_SPLIT_TRAIN || split == TS_SPLIT_VAL, "unknown split selector");
    return ds->data.members(split == TS_SPLIT_TRAIN ? ts::Split::train : ts::Split::val);
}

ts::ModelSpec spec_from_params(const ts_train_params& p, int input_size) {
    ts::ModelSpec spec;
    spec.input_size = input_size;
    for (size_t i = 0; i < spec.convs.size(); ++i)
        spec.convs[i] = {p.filters[i], p.kernel, 1, p.kernel / 2};
    spec.dropout_rate = p.dropout;
    spec.validate();
    return spec;
}

// Argmax predictions and matching labels over one batch-iterated split.
void predict_split(ts_model* m, const std::vector<const ts::LabeledImage*>& images, int batch_size,
                   std::vector<int>* preds, std::vector<int>* labels) {
    require(m != nullptr, "model handle is null");
    ts::check_arg(batch_size >= 1, "predict: batch size must be positive");
    ts::check_arg(!images.empty(), "predict: split is empty");
    for (size_t start = 0; start < images.size(); start += static_cast<size_t>(batch_size)) {
        const size_t stop = std::min(images.size(), start + static_cast<size_t>(batch_size));
        std::vector<const ts::LabeledImage*> batch(images.begin() + static_cast<long>(start),
                                                   images.begin() + static_cast<long>(stop));
        auto x = ts::batch_tensor<float>(batch);
        auto fwd = ts::forward<float>(nullptr, m->model, x, ts::Mode::eval);
        for (size_t i = 0; i < batch.size(); ++i) {
            preds->push_back(ts::argmax_row(fwd.logits, static_cast<int>(i)));
            labels->push_back(batch[i]->label);
        }
    }
}

void write_text_file(const std::string& path, const std::string& text, bool append) {
    std::ofstream out(path, append ? std::ios::binary | std::ios::app : std::ios::binary);
    if (!out) ts::fail_io(ts::strformat("cannot open %s for writing", path.c_str()));
    out << text;
    if (!out.flush()) ts::fail_io(ts::strformat("cannot write %s", path.c_str()));
}

std::string export_name(const std::string& id) {
    std::string name = id;
    std::replace(name.begin(), name.end(), '/', '_');
    if (name.size() < 4 || name.substr(name.size() - 4) != ".pgm") name += ".pgm";
    return name;
}

}  // namespace

extern "C" {

const char* ts_last_error(void) { return g_last_error.c_str(); }

const char* ts_version(void) { return "0.1.0"; }

/* ---- datasets ---- */

ts_status ts_dataset_load(const char* root, int target_size, double train_fraction, uint64_t seed,
                          const char* positive_subdir, const char* negative_subdir,
                          ts_dataset** out) {
    return guard([&] {
        require(root && positive_subdir && negative_subdir && out, "null argument");
        ts::LoadReport report;
        auto handle = std::make_unique<ts_dataset>();
        handle->data = ts::load_dataset(root, target_size, train_fraction, seed, positive_subdir,
                                        negative_subdir, &report);
        handle->warnings = std::move(report.warnings);
        *out = handle.release();
    });
}

ts_status ts_dataset_synth(int per_class, int size, uint64_t seed, double train_fraction,
                           ts_dataset** out) {
    return guard([&] {
        require(out != nullptr, "null argument");
        auto handle = std::make_unique<ts_dataset>();
        handle->data = ts::synthesize_dataset(per_class, size, seed, train_fraction);
        *out = handle.release();
    });
}

ts_status ts_dataset_from_files(const char* const* paths, int count, int target_size,
                                ts_dataset** out) {
    return guard([&] {
        require(paths && out, "null argument");
        ts::check_arg(count >= 1, "from_files: need at least one image");
        auto handle = std::make_unique<ts_dataset>();
        handle->data.target_size = target_size;
        handle->data.source = "files";
        for (int i = 0; i < count; ++i) {
            require(paths[i] != nullptr, "null path");
            ts::RawRecord rec;
            rec.id = std::filesystem::path(paths[i]).filename().string();
            rec.label = 0;
            rec.image = ts::decode_pnm(paths[i]);
            ts::LabeledImage im = ts::preprocess(rec, target_size);
            im.split = ts::Split::val;
            handle->data.images.push_back(std::move(im));
        }
        *out = handle.release();
    });
}

void ts_dataset_free(ts_dataset* ds) { delete ds; }

int ts_dataset_size(const ts_dataset* ds) {
    return ds ? static_cast<int>(ds->data.images.size()) : 0;
}

int ts_dataset_target_size(const ts_dataset* ds) { return ds ? ds->data.target_size : 0; }

int ts_dataset_count(const ts_dataset* ds, int label, int split) {
    if (!ds || (split != TS_SPLIT_TRAIN && split != TS_SPLIT_VAL)) return 0;
    return ds->data.count(label, split == TS_SPLIT_TRAIN ? ts::Split::train : ts::Split::val);
}

const char* ts_dataset_image_id(const ts_dataset* ds, int index) {
    if (!ds || index < 0 || index >= static_cast<int>(ds->data.images.size())) return nullptr;
    return ds->data.images[static_cast<size_t>(index)].id.c_str();
}

int ts_dataset_image_label(const ts_dataset* ds, int index) {
    if (!ds || index < 0 || index >= static_cast<int>(ds->data.images.size())) return -1;
    return ds->data.images[static_cast<size_t>(index)].label;
}

int ts_dataset_image_split(const ts_dataset* ds, int index) {
    if (!ds || index < 0 || index >= static_cast<int>(ds->data.images.size())) return -1;
    return ds->data.images[static_cast<size_t>(index)].split == ts::Split::train ? TS_SPLIT_TRAIN
                                                                                 : TS_SPLIT_VAL;
}

int ts_dataset_warning_count(const ts_dataset* ds) {
    return ds ? static_cast<int>(ds->warnings.size()) : 0;
}

const char* ts_dataset_warning(const ts_dataset* ds, int index) {
    if (!ds || index < 0 || index >= static_cast<int>(ds->warnings.size())) return nullptr;
    return ds->warnings[static_cast<size_t>(index)].c_str();
}

ts_status ts_dataset_write_manifest(const ts_dataset* ds, const char* path) {
    return guard([&] {
        require(ds && path, "null argument");
        ts::write_manifest(path, ds->data);
    });
}

ts_status ts_dataset_export(const ts_dataset* ds, const char* dir, const char* positive_subdir,
                            const char* negative_subdir) {
    return guard([&] {
        require(ds && dir && positive_subdir && negative_subdir, "null argument");
        ts::check_arg(!ds->data.images.empty(), "export: dataset is empty");
        const std::filesystem::path root(dir);
        std::error_code ec;
        std::filesystem::create_directories(root / positive_subdir, ec);
        std::filesystem::create_directories(root / negative_subdir, ec);
        if (ec) ts::fail_io(ts::strformat("cannot create %s: %s", dir, ec.message().c_str()));
        for (const auto& im : ds->data.images) {
            std::vector<uint8_t> bytes(im.pixels.size());
            for (size_t i = 0; i < im.pixels.size(); ++i)
                bytes[i] = static_cast<uint8_t>(
                    std::lround(std::clamp(im.pixels[i], 0.0f, 1.0f) * 255.0f));
            const auto sub = im.label == 1 ? positive_subdir : negative_subdir;
            ts::write_pgm((root / sub / export_name(im.id)).string(), im.size, im.size, bytes);
        }
    });
}

ts_status ts_dataset_write_truth(const ts_dataset* ds, const char* path) {
    return guard([&] {
        require(ds && path, "null argument");
        std::string text = "id,cy,cx,sigma\n";
        for (const auto& [id, truth] : ds->data.blob_truth)
            text += ts::strformat("%s,%s,%s,%s\n", id.c_str(), ts::fmt_g9(truth.cy).c_str(),
                                  ts::fmt_g9(truth.cx).c_str(), ts::fmt_g9(truth.sigma).c_str());
        write_text_file(path, text, false);
    });
}

/* ---- model training and evaluation ---- */

void ts_train_params_init(ts_train_params* p) {
    if (!p) return;
    ts::TrainConfig defaults;
    ts::ModelSpec spec;
    p->epochs = defaults.epochs;
    p->batch_size = defaults.batch_size;
    p->lr = defaults.lr;
    p->seed = defaults.seed;
    p->deterministic = 0;
    for (size_t i = 0; i < spec.convs.size(); ++i) p->filters[i] = spec.convs[i].filters;
    p->kernel = spec.convs[0].kernel;
    p->dropout = spec.dropout_rate;
}

ts_status ts_model_train(const ts_dataset* ds, const ts_train_params* params, ts_epoch_fn on_epoch,
                         void* user, ts_model** out) {
    return guard([&] {
        require(ds && params && out, "null argument");
        const ts::ModelSpec spec = spec_from_params(*params, ds->data.target_size);
        ts::TrainConfig config;
        config.epochs = params->epochs;
        config.batch_size = params->batch_size;
        config.lr = params->lr;
        config.seed = params->seed;
        config.deterministic = params->deterministic != 0;
        ts::EpochHook hook;
        if (on_epoch)
            hook = [&](const ts::Model<float>&, const ts::EpochLog& log) {
                return on_epoch(user, log.epoch, log.train_loss, log.train_acc, log.val_loss,
                                log.val_acc) == 0;
            };
        ts::TrainResult result = ts::train(spec, ds->data, config, hook);
        auto handle = std::make_unique<ts_model>();
        handle->model = std::move(result.best);
        handle->logs = std::move(result.logs);
        *out = handle.release();
    });
}

ts_status ts_model_save(const ts_model* m, const char* path) {
    return guard([&] {
        require(m && path, "null argument");
        ts::save_model(path, m->model);
    });
}

ts_status ts_model_load(const char* path, ts_model** out) {
    return guard([&] {
        require(path && out, "null argument");
        auto handle = std::make_unique<ts_model>();
        handle->model = ts::load_model(path);
        *out = handle.release();
    });
}

void ts_model_free(ts_model* m) { delete m; }

int ts_model_input_size(const ts_model* m) { return m ? m->model.spec.input_size : 0; }

int ts_model_trained_epochs(const ts_model* m) { return m ? m->model.trained_epochs : 0; }

double ts_model_best_val_accuracy(const ts_model* m) {
    return m ? m->model.best_val_accuracy : 0.0;
}

uint64_t ts_model_seed(const ts_model* m) { return m ? m->model.seed : 0; }

int ts_model_epoch_count(const ts_model* m) { return m ? static_cast<int>(m->logs.size()) : 0; }

ts_status ts_model_epoch_row(const ts_model* m, int index, int* epoch, double* train_loss,
                             double* train_acc, double* val_loss, double* val_acc) {
    return guard([&] {
        require(m != nullptr, "model handle is null");
        require(index >= 0 && index < static_cast<int>(m->logs.size()),
                "epoch index out of range");
        const ts::EpochLog& log = m->logs[static_cast<size_t>(index)];
        if (epoch) *epoch = log.epoch;
        if (train_loss) *train_loss = log.train_loss;
        if (train_acc) *train_acc = log.train_acc;
        if (val_loss) *val_loss = log.val_loss;
        if (val_acc) *val_acc = log.val_acc;
    });
}

ts_status ts_model_write_epochs_csv(const ts_model* m, const char* path) {
    return guard([&] {
        require(m && path, "null argument");
        std::string text = ts::epoch_csv_header() + "\n";
        for (const auto& log : m->logs) text += ts::epoch_csv_row(log) + "\n";
        write_text_file(path, text, false);
    });
}

ts_status ts_model_evaluate(ts_model* m, const ts_dataset* ds, int split, int batch_size,
                            double* loss, double* accuracy) {
    return guard([&] {
        require(m != nullptr, "model handle is null");
        const auto members = split_members(ds, split);
        const ts::EvalScore score = ts::evaluate_model(m->model, members, batch_size);
        if (loss) *loss = score.loss;
        if (accuracy) *accuracy = score.accuracy;
    });
}

ts_status ts_model_predict(ts_model* m, const ts_dataset* ds, int index, int* predicted) {
    return guard([&] {
        require(m && predicted, "null argument");
        const ts::LabeledImage& im = image_at(ds, index);
        auto x = ts::batch_tensor<float>({&im});
        auto fwd = ts::forward<float>(nullptr, m->model, x, ts::Mode::eval);
        *predicted = ts::argmax_row(fwd.logits, 0);
    });
}

ts_status ts_model_confusion(ts_model* m, const ts_dataset* ds, int split, int batch_size,
                             int64_t counts[4]) {
    return guard([&] {
        require(counts != nullptr, "null argument");
        std::vector<int> preds;
        std::vector<int> labels;
        predict_split(m, split_members(ds, split), batch_size, &preds, &labels);
        const ts::ConfusionMatrix cm = ts::confusion(preds, labels);
        counts[0] = cm.tp;
        counts[1] = cm.tn;
        counts[2] = cm.fp;
        counts[3] = cm.fn;
    });
}

ts_status ts_model_write_metrics_csv(ts_model* m, const ts_dataset* ds, int split, int batch_size,
                                     const char* model_name, const char* classifier_name,
                                     const char* path) {
    return guard([&] {
        require(model_name && classifier_name && path, "null argument");
        std::vector<int> preds;
        std::vector<int> labels;
        predict_split(m, split_members(ds, split), batch_size, &preds, &labels);
        const ts::MetricReport rep = ts::report(ts::confusion(preds, labels));
        const std::string text = ts::report_csv_header() + "\n" +
                                 ts::report_csv_row(model_name, classifier_name, rep) + "\n";
        write_text_file(path, text, false);
    });
}

/* ---- feature matrices ---- */

ts_status ts_features_extract(ts_model* m, const ts_dataset* ds, int split, int batch_size,
                              ts_features** out) {
    return guard([&] {
        require(m && out, "null argument");
        auto handle = std::make_unique<ts_features>();
        handle->fm = ts::extract_features(m->model, split_members(ds, split), batch_size);
        *out = handle.release();
    });
}

ts_status ts_features_read(const char* path, ts_features** out) {
    return guard([&] {
        require(path && out, "null argument");
        auto handle = std::make_unique<ts_features>();
        handle->fm = ts::read_features_csv(path);
        *out = handle.release();
    });
}

ts_status ts_features_write(const ts_features* f, const char* path) {
    return guard([&] {
        require(f && path, "null argument");
        ts::write_features_csv(path, f->fm);
    });
}

void ts_features_free(ts_features* f) { delete f; }

int ts_features_rows(const ts_features* f) { return f ? f->fm.rows() : 0; }

int ts_features_dim(const ts_features* f) { return f ? f->fm.dim : 0; }

const char* ts_features_id(const ts_features* f, int row) {
    if (!f || row < 0 || row >= f->fm.rows()) return nullptr;
    return f->fm.ids[static_cast<size_t>(row)].c_str();
}

int ts_features_label(const ts_features* f, int row) {
    if (!f || row < 0 || row >= f->fm.rows()) return -1;
    return f->fm.labels[static_cast<size_t>(row)];
}

ts_status ts_features_split(const ts_features* f, double train_fraction, uint64_t seed,
                            ts_features** train_out, ts_features** eval_out) {
    return guard([&] {
        require(f && train_out && eval_out, "null argument");
        ts::check_arg(train_fraction > 0.0 && train_fraction < 1.0,
                      "feature split: fraction must be in (0,1)");
        ts::check_arg(f->fm.rows() >= 2, "feature split: need at least two rows");
        auto tr = std::make_unique<ts_features>();
        auto ev = std::make_unique<ts_features>();
        tr->fm.dim = f->fm.dim;
        ev->fm.dim = f->fm.dim;
        ts::Rng rng(ts::derive_seed(seed, 0));
        for (int label = 0; label <= 1; ++label) {
            std::vector<int> rows;
            for (int i = 0; i < f->fm.rows(); ++i)
                if (f->fm.labels[static_cast<size_t>(i)] == label) rows.push_back(i);
            rng.shuffle(rows);
            const size_t take = static_cast<size_t>(
                std::floor(static_cast<double>(rows.size()) * train_fraction));
            for (size_t i = 0; i < rows.size(); ++i) {
                const int r = rows[i];
                auto& dst = i < take ? tr->fm : ev->fm;
                dst.append(f->fm.ids[static_cast<size_t>(r)], label, f->fm.row(r));
            }
        }
        ts::check_arg(tr->fm.rows() >= 2, "feature split: train side came out too small");
        ts::check_arg(ev->fm.rows() >= 1, "feature split: eval side came out empty");
        *train_out = tr.release();
        *eval_out = ev.release();
    });
}

/* ---- classifier grid ---- */

void ts_classifier_params_init(ts_classifier_params* p) {
    if (!p) return;
    ts::ClassifierConfig defaults;
    p->knn_k = defaults.knn_k;
    p->logistic_l2 = defaults.logistic_l2;
    p->logistic_epochs = defaults.logistic_epochs;
    p->logistic_lr = defaults.logistic_lr;
    p->svm_c = defaults.svm_c;
    p->svm_epochs = defaults.svm_epochs;
    p->svm_lr = defaults.svm_lr;
    p->rf_trees = defaults.rf_trees;
    p->rf_max_depth = defaults.rf_max_depth;
    p->rf_seed = defaults.rf_seed;
    p->mlp_hidden = defaults.mlp.hidden.empty() ? 0 : defaults.mlp.hidden[0];
    p->mlp_epochs = defaults.mlp.epochs;
    p->mlp_lr = defaults.mlp.lr;
    p->mlp_seed = defaults.mlp.seed;
}

ts_status ts_grid_fit(const ts_features* train, const ts_features* eval_rows,
                      const ts_classifier_params* params, ts_grid** out) {
    return guard([&] {
        require(train && eval_rows && params && out, "null argument");
        ts::ClassifierConfig cfg;
        cfg.knn_k = params->knn_k;
        cfg.logistic_l2 = params->logistic_l2;
        cfg.logistic_epochs = params->logistic_epochs;
        cfg.logistic_lr = params->logistic_lr;
        cfg.svm_c = params->svm_c;
        cfg.svm_epochs = params->svm_epochs;
        cfg.svm_lr = params->svm_lr;
        cfg.rf_trees = params->rf_trees;
        cfg.rf_max_depth = params->rf_max_depth;
        cfg.rf_seed = params->rf_seed;
        cfg.mlp.hidden = {params->mlp_hidden};
        cfg.mlp.epochs = params->mlp_epochs;
        cfg.mlp.lr = params->mlp_lr;
        cfg.mlp.seed = params->mlp_seed;
        auto handle = std::make_unique<ts_grid>();
        handle->entries = ts::fit_all(train->fm, eval_rows->fm, cfg);
        *out = handle.release();
    });
}

void ts_grid_free(ts_grid* g) { delete g; }

int ts_grid_size(const ts_grid* g) { return g ? static_cast<int>(g->entries.size()) : 0; }

const char* ts_grid_name(const ts_grid* g, int index) {
    if (!g || index < 0 || index >= static_cast<int>(g->entries.size())) return nullptr;
    return g->entries[static_cast<size_t>(index)].classifier.c_str();
}

int ts_grid_ok(const ts_grid* g, int index) {
    if (!g || index < 0 || index >= static_cast<int>(g->entries.size())) return 0;
    return g->entries[static_cast<size_t>(index)].ok ? 1 : 0;
}

const char* ts_grid_error(const ts_grid* g, int index) {
    if (!g || index < 0 || index >= static_cast<int>(g->entries.size())) return nullptr;
    return g->entries[static_cast<size_t>(index)].error.c_str();
}

int ts_grid_metric(const ts_grid* g, int index, int metric, double* value) {
    if (!g || !value || index < 0 || index >= static_cast<int>(g->entries.size())) return 0;
    const ts::GridEntry& entry = g->entries[static_cast<size_t>(index)];
    if (!entry.ok) return 0;
    const ts::Metric* m = nullptr;
    switch (metric) {
        case TS_METRIC_ACCURACY: m = &entry.metrics.accuracy; break;
        case TS_METRIC_PRECISION: m = &entry.metrics.precision; break;
        case TS_METRIC_RECALL: m = &entry.metrics.recall; break;
        case TS_METRIC_F1: m = &entry.metrics.f1; break;
        case TS_METRIC_SPECIFICITY: m = &entry.metrics.specificity; break;
        default: return 0;
    }
    if (!m->defined) return 0;
    *value = m->value;
    return 1;
}

ts_status ts_grid_write_csv(const ts_grid* g, const char* model_name, const char* path,
                            int append) {
    return guard([&] {
        require(g && model_name && path, "null argument");
        std::string text = ts::grid_csv(model_name, g->entries);
        if (append) {
            const size_t nl = text.find('\n');
            if (nl != std::string::npos) text.erase(0, nl + 1);
        }
        write_text_file(path, text, append != 0);
    });
}

/* ---- Grad-CAM ---- */

ts_status ts_gradcam(ts_model* m, const ts_dataset* ds, int index, int target_class, int nearest,
                     ts_heatmap** out) {
    return guard([&] {
        require(m && out, "null argument");
        const ts::LabeledImage& im = image_at(ds, index);
        int cls = target_class;
        if (cls == -1) {
            auto x = ts::batch_tensor<float>({&im});
            auto fwd = ts::forward<float>(nullptr, m->model, x, ts::Mode::eval);
            cls = ts::argmax_row(fwd.logits, 0);
        }
        auto handle = std::make_unique<ts_heatmap>();
        handle->h = ts::gradcam(m->model, im, cls,
                                nearest ? ts::UpsampleMode::nearest : ts::UpsampleMode::bilinear);
        *out = handle.release();
    });
}

void ts_heatmap_free(ts_heatmap* h) { delete h; }

int ts_heatmap_size(const ts_heatmap* h) { return h ? h->h.size : 0; }

int ts_heatmap_target_class(const ts_heatmap* h) { return h ? h->h.target_class : -1; }

int ts_heatmap_degenerate(const ts_heatmap* h) { return h && h->h.degenerate ? 1 : 0; }

double ts_heatmap_raw_min(const ts_heatmap* h) { return h ? h->h.raw_min : 0.0; }

double ts_heatmap_raw_max(const ts_heatmap* h) { return h ? h->h.raw_max : 0.0; }

const float* ts_heatmap_values(const ts_heatmap* h) {
    return h && !h->h.values.empty() ? h->h.values.data() : nullptr;
}

ts_status ts_heatmap_write_pgm(const ts_heatmap* h, const char* path) {
    return guard([&] {
        require(h && path, "null argument");
        ts::write_heatmap_pgm(path, h->h);
    });
}

ts_status ts_heatmap_write_overlay(const ts_heatmap* h, const ts_dataset* ds, int index,
                                   double alpha, const char* path) {
    return guard([&] {
        require(h && path, "null argument");
        ts::write_overlay_ppm(path, image_at(ds, index), h->h, alpha);
    });
}

ts_status ts_heatmap_write_sidecar(const ts_heatmap* h, const char* path) {
    return guard([&] {
        require(h && path, "null argument");
        ts::write_heatmap_sidecar(path, h->h);
    });
}

/* ---- hyperparameter search ---- */

ts_status ts_search_run(const ts_dataset* ds, int trials, int budget_epochs, uint64_t seed,
                        ts_search** out) {
    return guard([&] {
        require(ds && out, "null argument");
        auto handle = std::make_unique<ts_search>();
        handle->result = ts::random_search(ds->data, ts::SearchSpace{}, trials, budget_epochs, seed);
        *out = handle.release();
    });
}

void ts_search_free(ts_search* s) { delete s; }

int ts_search_trial_count(const ts_search* s) {
    return s ? static_cast<int>(s->result.trials.size()) : 0;
}

ts_status ts_search_trial(const ts_search* s, int index, ts_trial* out) {
    return guard([&] {
        require(s && out, "null argument");
        require(index >= 0 && index < static_cast<int>(s->result.trials.size()),
                "trial index out of range");
        const ts::TrialResult& t = s->result.trials[static_cast<size_t>(index)];
        out->index = t.index;
        for (size_t i = 0; i < t.spec.convs.size(); ++i) out->filters[i] = t.spec.convs[i].filters;
        out->kernel = t.spec.convs[0].kernel;
        out->dropout = t.spec.dropout_rate;
        out->lr = t.config.lr;
        out->batch_size = t.config.batch_size;
        out->val_accuracy = t.val_accuracy;
        out->val_loss = t.val_loss;
        out->diverged = t.diverged ? 1 : 0;
    });
}

int ts_search_best_index(const ts_search* s) { return s ? s->result.best_index : 0; }

}  // extern "C"
