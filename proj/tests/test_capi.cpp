// Exercises the C API end to end through the shared-library surface alone:
// no core headers, only tumorscope.h. Training runs once on a tiny synthetic
// dataset and the dependent cases share that bundle.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "doctest.h"
#include "tumorscope.h"

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("ts-capi-" + std::to_string(static_cast<long>(getpid())));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text) n += c == '\n';
    return n;
}

struct Bundle {
    ts_dataset* ds = nullptr;
    ts_model* model = nullptr;
    std::vector<double> val_accs;
};

const Bundle& bundle() {
    static Bundle b = [] {
        Bundle out;
        REQUIRE(ts_dataset_synth(14, 16, 7, 0.75, &out.ds) == TS_OK);
        ts_train_params params;
        ts_train_params_init(&params);
        params.epochs = 3;
        params.batch_size = 4;
        params.seed = 5;
        params.filters[0] = 4;
        params.filters[1] = 4;
        params.filters[2] = 8;
        params.filters[3] = 8;
        params.dropout = 0.2;
        auto on_epoch = [](void* user, int, double, double, double, double val_acc) {
            static_cast<Bundle*>(user)->val_accs.push_back(val_acc);
            return 0;
        };
        REQUIRE(ts_model_train(out.ds, &params, on_epoch, &out, &out.model) == TS_OK);
        return out;
    }();
    return b;
}

}  // namespace

TEST_CASE("version and defaults") {
    CHECK(std::string(ts_version()) == "0.1.0");
    CHECK(ts_last_error() != nullptr);

    ts_train_params tp;
    ts_train_params_init(&tp);
    CHECK(tp.epochs == 20);
    CHECK(tp.batch_size == 32);
    CHECK(tp.lr == doctest::Approx(1e-3));
    CHECK(tp.seed == 42);
    CHECK(tp.filters[0] == 32);
    CHECK(tp.filters[3] == 128);
    CHECK(tp.kernel == 3);
    CHECK(tp.dropout == doctest::Approx(0.3));

    ts_classifier_params cp;
    ts_classifier_params_init(&cp);
    CHECK(cp.knn_k == 5);
    CHECK(cp.rf_trees == 100);
    CHECK(cp.mlp_hidden == 64);
}

TEST_CASE("synthetic dataset handle") {
    const Bundle& b = bundle();
    CHECK(ts_dataset_size(b.ds) == 28);
    CHECK(ts_dataset_target_size(b.ds) == 16);
    const int train_total = ts_dataset_count(b.ds, 0, TS_SPLIT_TRAIN) +
                            ts_dataset_count(b.ds, 1, TS_SPLIT_TRAIN);
    const int val_total =
        ts_dataset_count(b.ds, 0, TS_SPLIT_VAL) + ts_dataset_count(b.ds, 1, TS_SPLIT_VAL);
    CHECK(train_total == 20);
    CHECK(val_total == 8);
    CHECK(ts_dataset_warning_count(b.ds) == 0);

    REQUIRE(ts_dataset_image_id(b.ds, 0) != nullptr);
    const int label = ts_dataset_image_label(b.ds, 0);
    CHECK((label == 0 || label == 1));
    const int split = ts_dataset_image_split(b.ds, 0);
    CHECK((split == TS_SPLIT_TRAIN || split == TS_SPLIT_VAL));

    CHECK(ts_dataset_size(nullptr) == 0);
    CHECK(ts_dataset_image_id(b.ds, -1) == nullptr);
    CHECK(ts_dataset_image_label(b.ds, 9999) == -1);

    ts_dataset* bad = nullptr;
    CHECK(ts_dataset_synth(0, 16, 1, 0.75, &bad) == TS_EINVAL);
    CHECK(std::string(ts_last_error()).size() > 0);
    CHECK(ts_dataset_synth(4, 16, 1, 0.75, nullptr) == TS_EINVAL);
}

TEST_CASE("manifest, truth, export, and reload") {
    TempDir tmp;
    const Bundle& b = bundle();

    REQUIRE(ts_dataset_write_manifest(b.ds, tmp.file("manifest.tsv").c_str()) == TS_OK);
    CHECK(slurp(tmp.file("manifest.tsv")).size() > 0);

    REQUIRE(ts_dataset_write_truth(b.ds, tmp.file("truth.csv").c_str()) == TS_OK);
    const std::string truth = slurp(tmp.file("truth.csv"));
    CHECK(truth.rfind("id,cy,cx,sigma\n", 0) == 0);
    CHECK(count_lines(truth) == 15);

    const std::string exported = tmp.file("exported");
    REQUIRE(ts_dataset_export(b.ds, exported.c_str(), "yes", "no") == TS_OK);
    ts_dataset* reloaded = nullptr;
    REQUIRE(ts_dataset_load(exported.c_str(), 16, 0.75, 7, "yes", "no", &reloaded) == TS_OK);
    CHECK(ts_dataset_size(reloaded) == 28);
    CHECK(ts_dataset_count(reloaded, 1, TS_SPLIT_TRAIN) + ts_dataset_count(reloaded, 1, TS_SPLIT_VAL) ==
          14);
    CHECK(ts_dataset_warning_count(reloaded) == 0);
    ts_dataset_free(reloaded);

    const std::string one = exported + "/yes/" + [&] {
        for (const auto& entry : std::filesystem::directory_iterator(exported + "/yes"))
            return entry.path().filename().string();
        return std::string();
    }();
    const char* paths[] = {one.c_str()};
    ts_dataset* files = nullptr;
    REQUIRE(ts_dataset_from_files(paths, 1, 16, &files) == TS_OK);
    CHECK(ts_dataset_size(files) == 1);
    CHECK(ts_dataset_image_split(files, 0) == TS_SPLIT_VAL);
    CHECK(ts_dataset_image_label(files, 0) == 0);
    ts_dataset_free(files);
}

TEST_CASE("training, evaluation, and epoch logs") {
    TempDir tmp;
    const Bundle& b = bundle();

    CHECK(ts_model_input_size(b.model) == 16);
    CHECK(ts_model_seed(b.model) == 5);
    CHECK(ts_model_trained_epochs(b.model) >= 1);
    CHECK(ts_model_epoch_count(b.model) == 3);
    CHECK(b.val_accs.size() == 3);

    int epoch = 0;
    double tl = 0, ta = 0, vl = 0, va = 0;
    REQUIRE(ts_model_epoch_row(b.model, 0, &epoch, &tl, &ta, &vl, &va) == TS_OK);
    CHECK(epoch == 1);
    CHECK(std::isfinite(tl));
    CHECK(va == doctest::Approx(b.val_accs[0]));
    CHECK(ts_model_epoch_row(b.model, 99, &epoch, &tl, &ta, &vl, &va) == TS_EINVAL);

    REQUIRE(ts_model_write_epochs_csv(b.model, tmp.file("epochs.csv").c_str()) == TS_OK);
    const std::string csv = slurp(tmp.file("epochs.csv"));
    CHECK(csv.rfind("epoch,train_loss,train_acc,val_loss,val_acc\n", 0) == 0);
    CHECK(count_lines(csv) == 4);

    double loss = 0.0, acc = -1.0;
    REQUIRE(ts_model_evaluate(b.model, b.ds, TS_SPLIT_VAL, 8, &loss, &acc) == TS_OK);
    CHECK(std::isfinite(loss));
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
    CHECK(acc == doctest::Approx(ts_model_best_val_accuracy(b.model)));

    int predicted = -1;
    REQUIRE(ts_model_predict(b.model, b.ds, 0, &predicted) == TS_OK);
    CHECK((predicted == 0 || predicted == 1));

    int64_t counts[4] = {0, 0, 0, 0};
    REQUIRE(ts_model_confusion(b.model, b.ds, TS_SPLIT_VAL, 8, counts) == TS_OK);
    CHECK(counts[0] + counts[1] + counts[2] + counts[3] == 8);

    REQUIRE(ts_model_write_metrics_csv(b.model, b.ds, TS_SPLIT_VAL, 8, "cnn", "argmax",
                                       tmp.file("metrics.csv").c_str()) == TS_OK);
    const std::string metrics = slurp(tmp.file("metrics.csv"));
    CHECK(metrics.rfind("model,classifier,accuracy,precision,recall,f1,specificity\n", 0) == 0);
    CHECK(metrics.find("cnn,argmax,") != std::string::npos);
    CHECK(count_lines(metrics) == 2);

    CHECK(ts_model_evaluate(b.model, b.ds, 7, 8, &loss, &acc) == TS_EINVAL);
    CHECK(ts_model_predict(b.model, b.ds, -1, &predicted) == TS_EINVAL);
}

TEST_CASE("early stop through the epoch callback") {
    const Bundle& b = bundle();
    ts_train_params params;
    ts_train_params_init(&params);
    params.epochs = 5;
    params.batch_size = 4;
    params.seed = 5;
    for (int i = 0; i < 4; ++i) params.filters[i] = 4;
    auto stop_after_first = [](void*, int, double, double, double, double) { return 1; };
    ts_model* m = nullptr;
    REQUIRE(ts_model_train(b.ds, &params, stop_after_first, nullptr, &m) == TS_OK);
    CHECK(ts_model_epoch_count(m) == 1);
    ts_model_free(m);
}

TEST_CASE("checkpoint round trip") {
    TempDir tmp;
    const Bundle& b = bundle();
    const std::string path = tmp.file("model.tsck");
    REQUIRE(ts_model_save(b.model, path.c_str()) == TS_OK);

    ts_model* loaded = nullptr;
    REQUIRE(ts_model_load(path.c_str(), &loaded) == TS_OK);
    CHECK(ts_model_input_size(loaded) == 16);
    CHECK(ts_model_trained_epochs(loaded) == ts_model_trained_epochs(b.model));
    CHECK(ts_model_epoch_count(loaded) == 0);

    double l1 = 0, a1 = 0, l2 = 0, a2 = 0;
    REQUIRE(ts_model_evaluate(b.model, b.ds, TS_SPLIT_VAL, 8, &l1, &a1) == TS_OK);
    REQUIRE(ts_model_evaluate(loaded, b.ds, TS_SPLIT_VAL, 8, &l2, &a2) == TS_OK);
    CHECK(l1 == l2);
    CHECK(a1 == a2);
    ts_model_free(loaded);

    ts_model* missing = nullptr;
    CHECK(ts_model_load(tmp.file("absent.tsck").c_str(), &missing) == TS_EIO);
    std::ofstream(tmp.file("junk.tsck"), std::ios::binary) << "TSCKgarbage";
    CHECK(ts_model_load(tmp.file("junk.tsck").c_str(), &missing) == TS_EFORMAT);
}

TEST_CASE("feature extraction, csv, and split") {
    TempDir tmp;
    const Bundle& b = bundle();

    ts_features* all = nullptr;
    REQUIRE(ts_features_extract(b.model, b.ds, TS_SPLIT_ALL, 8, &all) == TS_OK);
    CHECK(ts_features_rows(all) == 28);
    CHECK(ts_features_dim(all) == 8);

    ts_features* val = nullptr;
    REQUIRE(ts_features_extract(b.model, b.ds, TS_SPLIT_VAL, 8, &val) == TS_OK);
    CHECK(ts_features_rows(val) == 8);
    ts_features_free(val);

    const std::string path = tmp.file("features.csv");
    REQUIRE(ts_features_write(all, path.c_str()) == TS_OK);
    ts_features* back = nullptr;
    REQUIRE(ts_features_read(path.c_str(), &back) == TS_OK);
    CHECK(ts_features_rows(back) == 28);
    CHECK(ts_features_dim(back) == 8);
    CHECK(std::string(ts_features_id(back, 0)) == ts_features_id(all, 0));
    CHECK(ts_features_label(back, 5) == ts_features_label(all, 5));
    ts_features_free(back);

    ts_features* tr = nullptr;
    ts_features* ev = nullptr;
    REQUIRE(ts_features_split(all, 0.75, 3, &tr, &ev) == TS_OK);
    CHECK(ts_features_rows(tr) == 20);
    CHECK(ts_features_rows(ev) == 8);
    CHECK(ts_features_dim(tr) == 8);
    ts_features_free(tr);
    ts_features_free(ev);

    ts_features* bad = nullptr;
    CHECK(ts_features_split(all, 1.5, 3, &tr, &ev) == TS_EINVAL);
    std::ofstream(tmp.file("garbage.csv"), std::ios::binary) << "not,a,feature\nfile at all\n";
    CHECK(ts_features_read(tmp.file("garbage.csv").c_str(), &bad) == TS_EFORMAT);
    ts_features_free(all);
}

TEST_CASE("classifier grid over extracted features") {
    TempDir tmp;
    const Bundle& b = bundle();

    ts_features* all = nullptr;
    REQUIRE(ts_features_extract(b.model, b.ds, TS_SPLIT_ALL, 8, &all) == TS_OK);
    ts_features* tr = nullptr;
    ts_features* ev = nullptr;
    REQUIRE(ts_features_split(all, 0.75, 3, &tr, &ev) == TS_OK);

    ts_classifier_params params;
    ts_classifier_params_init(&params);
    params.rf_trees = 15;
    params.mlp_epochs = 40;
    ts_grid* grid = nullptr;
    REQUIRE(ts_grid_fit(tr, ev, &params, &grid) == TS_OK);
    REQUIRE(ts_grid_size(grid) == 6);
    const char* expected[] = {"knn", "logistic", "svm", "naive_bayes", "random_forest", "mlp"};
    for (int i = 0; i < 6; ++i) {
        CHECK(std::string(ts_grid_name(grid, i)) == expected[i]);
        CHECK(ts_grid_ok(grid, i) == 1);
        double acc = -1.0;
        CHECK(ts_grid_metric(grid, i, TS_METRIC_ACCURACY, &acc) == 1);
        CHECK(acc >= 0.0);
        CHECK(acc <= 1.0);
    }

    const std::string path = tmp.file("grid.csv");
    REQUIRE(ts_grid_write_csv(grid, "cnn", path.c_str(), 0) == TS_OK);
    REQUIRE(ts_grid_write_csv(grid, "other", path.c_str(), 1) == TS_OK);
    const std::string csv = slurp(path);
    CHECK(csv.rfind("model,classifier,", 0) == 0);
    CHECK(count_lines(csv) == 13);
    CHECK(csv.find("other,mlp,") != std::string::npos);
    ts_grid_free(grid);

    params.knn_k = 4;
    REQUIRE(ts_grid_fit(tr, ev, &params, &grid) == TS_OK);
    CHECK(ts_grid_ok(grid, 0) == 0);
    CHECK(std::string(ts_grid_error(grid, 0)).size() > 0);
    double acc = 0.0;
    CHECK(ts_grid_metric(grid, 0, TS_METRIC_ACCURACY, &acc) == 0);
    CHECK(ts_grid_ok(grid, 1) == 1);
    ts_grid_free(grid);

    ts_features_free(tr);
    ts_features_free(ev);
    ts_features_free(all);
}

TEST_CASE("gradcam handles and writers") {
    TempDir tmp;
    const Bundle& b = bundle();

    ts_heatmap* h = nullptr;
    REQUIRE(ts_gradcam(b.model, b.ds, 2, -1, 0, &h) == TS_OK);
    const int target = ts_heatmap_target_class(h);
    CHECK((target == 0 || target == 1));
    CHECK(ts_heatmap_size(h) == 16);
    const float* values = ts_heatmap_values(h);
    REQUIRE(values != nullptr);
    for (int i = 0; i < 16 * 16; ++i) {
        CHECK(values[i] >= 0.0f);
        CHECK(values[i] <= 1.0f);
    }
    if (!ts_heatmap_degenerate(h)) CHECK(ts_heatmap_raw_max(h) > ts_heatmap_raw_min(h));

    REQUIRE(ts_heatmap_write_pgm(h, tmp.file("map.pgm").c_str()) == TS_OK);
    REQUIRE(ts_heatmap_write_overlay(h, b.ds, 2, 0.35, tmp.file("map.ppm").c_str()) == TS_OK);
    REQUIRE(ts_heatmap_write_sidecar(h, tmp.file("map.txt").c_str()) == TS_OK);
    CHECK(slurp(tmp.file("map.pgm")).rfind("P5", 0) == 0);
    CHECK(slurp(tmp.file("map.ppm")).rfind("P6", 0) == 0);
    CHECK(slurp(tmp.file("map.txt")).find("target_class") != std::string::npos);
    ts_heatmap_free(h);

    REQUIRE(ts_gradcam(b.model, b.ds, 2, 1, 1, &h) == TS_OK);
    CHECK(ts_heatmap_target_class(h) == 1);
    ts_heatmap_free(h);

    CHECK(ts_gradcam(b.model, b.ds, 9999, -1, 0, &h) == TS_EINVAL);
    CHECK(ts_gradcam(b.model, b.ds, 0, 2, 0, &h) == TS_EINVAL);
}

TEST_CASE("random search through the C surface") {
    const Bundle& b = bundle();
    ts_search* s = nullptr;
    REQUIRE(ts_search_run(b.ds, 2, 1, 11, &s) == TS_OK);
    CHECK(ts_search_trial_count(s) == 2);
    const int best = ts_search_best_index(s);
    CHECK(best >= 0);
    CHECK(best < 2);
    ts_trial trial;
    REQUIRE(ts_search_trial(s, best, &trial) == TS_OK);
    CHECK((trial.kernel == 3 || trial.kernel == 5));
    CHECK(trial.dropout >= 0.2);
    CHECK(trial.dropout <= 0.5);
    CHECK(trial.val_accuracy >= 0.0);
    CHECK(trial.val_accuracy <= 1.0);
    CHECK(ts_search_trial(s, 5, &trial) == TS_EINVAL);
    ts_search_free(s);
}
