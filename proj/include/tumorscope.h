#ifndef TUMORSCOPE_H
#define TUMORSCOPE_H

/* C interface to the tumorscope core: dataset handling, CNN training,
 * feature extraction, the classical classifier grid, Grad-CAM heatmaps,
 * checkpoint persistence, and hyperparameter search.
 *
 * Every function that can fail returns ts_status; TS_OK means success and
 * anything else leaves a message in ts_last_error(). Out-parameters are
 * written only on TS_OK. Handles are created by the library and released
 * with the matching *_free, which accepts NULL.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ts_status {
    TS_OK = 0,
    TS_EINVAL = 1,  /* rejected argument or malformed input value */
    TS_ERUNTIME = 2, /* operation failed mid-flight (diverged, no gradient, ...) */
    TS_EIO = 3,      /* filesystem problem */
    TS_EFORMAT = 4   /* file contents violate their format */
} ts_status;

/* Message for the most recent failure on this thread. Valid until the next
 * failing call; never NULL. */
const char* ts_last_error(void);

const char* ts_version(void);

typedef struct ts_dataset ts_dataset;
typedef struct ts_model ts_model;
typedef struct ts_features ts_features;
typedef struct ts_grid ts_grid;
typedef struct ts_heatmap ts_heatmap;
typedef struct ts_search ts_search;

/* Split selectors shared by evaluation, extraction, and export. */
enum { TS_SPLIT_TRAIN = 0, TS_SPLIT_VAL = 1, TS_SPLIT_ALL = -1 };

/* ---- datasets ---- */

/* Loads <root>/<positive_subdir> and <root>/<negative_subdir>, resizes to
 * target_size, and stratifies into train/val with the given fraction and
 * seed. Undecodable files are skipped and reported as warnings. */
ts_status ts_dataset_load(const char* root, int target_size, double train_fraction, uint64_t seed,
                          const char* positive_subdir, const char* negative_subdir, ts_dataset** out);

/* Generates per_class positives and negatives of the given extent, with
 * blob ground truth recorded for the positives. */
ts_status ts_dataset_synth(int per_class, int size, uint64_t seed, double train_fraction,
                           ts_dataset** out);

/* Builds a dataset from explicit image files. Every image lands in the val
 * split with label 0; useful for localizing arbitrary inputs. */
ts_status ts_dataset_from_files(const char* const* paths, int count, int target_size,
                                ts_dataset** out);

void ts_dataset_free(ts_dataset* ds);

int ts_dataset_size(const ts_dataset* ds);
int ts_dataset_target_size(const ts_dataset* ds);
/* Image count with the given label (0/1) in the given split. */
int ts_dataset_count(const ts_dataset* ds, int label, int split);
const char* ts_dataset_image_id(const ts_dataset* ds, int index);
int ts_dataset_image_label(const ts_dataset* ds, int index);
int ts_dataset_image_split(const ts_dataset* ds, int index);

int ts_dataset_warning_count(const ts_dataset* ds);
const char* ts_dataset_warning(const ts_dataset* ds, int index);

ts_status ts_dataset_write_manifest(const ts_dataset* ds, const char* path);

/* Writes every image as <dir>/<subdir>/<id>.pgm with the positive/negative
 * subdirectory chosen by label, creating directories as needed. The layout
 * round-trips through ts_dataset_load. */
ts_status ts_dataset_export(const ts_dataset* ds, const char* dir, const char* positive_subdir,
                            const char* negative_subdir);

/* Blob ground truth CSV (id,cy,cx,sigma) for synthetic positives. */
ts_status ts_dataset_write_truth(const ts_dataset* ds, const char* path);

/* ---- model training and evaluation ---- */

typedef struct ts_train_params {
    int epochs;
    int batch_size;
    double lr;
    uint64_t seed;
    int deterministic;
    int filters[4]; /* conv stage widths */
    int kernel;     /* odd kernel extent shared by all four convs */
    double dropout;
} ts_train_params;

/* Fills in the defaults (20 epochs, batch 32, lr 1e-3, seed 42,
 * filters 32/64/128/128, kernel 3, dropout 0.3). */
void ts_train_params_init(ts_train_params* p);

/* Per-epoch progress callback; return nonzero to stop training early. */
typedef int (*ts_epoch_fn)(void* user, int epoch, double train_loss, double train_acc,
                           double val_loss, double val_acc);

/* Trains on the dataset's train split, validating each epoch. The returned
 * model is the checkpoint with the best val accuracy and carries the full
 * epoch log. */
ts_status ts_model_train(const ts_dataset* ds, const ts_train_params* params, ts_epoch_fn on_epoch,
                         void* user, ts_model** out);

ts_status ts_model_save(const ts_model* m, const char* path);
ts_status ts_model_load(const char* path, ts_model** out);
void ts_model_free(ts_model* m);

int ts_model_input_size(const ts_model* m);
int ts_model_trained_epochs(const ts_model* m);
double ts_model_best_val_accuracy(const ts_model* m);
uint64_t ts_model_seed(const ts_model* m);

/* Epoch log carried by a freshly trained model (empty after ts_model_load). */
int ts_model_epoch_count(const ts_model* m);
ts_status ts_model_epoch_row(const ts_model* m, int index, int* epoch, double* train_loss,
                             double* train_acc, double* val_loss, double* val_acc);
ts_status ts_model_write_epochs_csv(const ts_model* m, const char* path);

/* Eval-mode loss and accuracy over one split. */
ts_status ts_model_evaluate(ts_model* m, const ts_dataset* ds, int split, int batch_size,
                            double* loss, double* accuracy);

/* Argmax prediction for a single image. */
ts_status ts_model_predict(ts_model* m, const ts_dataset* ds, int index, int* predicted);

/* Confusion counts (tp, tn, fp, fn) of argmax predictions over one split. */
ts_status ts_model_confusion(ts_model* m, const ts_dataset* ds, int split, int batch_size,
                             int64_t counts[4]);

/* One-row metrics CSV (accuracy, precision, recall, f1, specificity) for
 * argmax predictions over one split. Undefined ratios print as "undef". */
ts_status ts_model_write_metrics_csv(ts_model* m, const ts_dataset* ds, int split, int batch_size,
                                     const char* model_name, const char* classifier_name,
                                     const char* path);

/* ---- feature matrices ---- */

/* Eval-mode flatten-layer output, one row per image of the chosen split. */
ts_status ts_features_extract(ts_model* m, const ts_dataset* ds, int split, int batch_size,
                              ts_features** out);

ts_status ts_features_read(const char* path, ts_features** out);
ts_status ts_features_write(const ts_features* f, const char* path);
void ts_features_free(ts_features* f);

int ts_features_rows(const ts_features* f);
int ts_features_dim(const ts_features* f);
const char* ts_features_id(const ts_features* f, int row);
int ts_features_label(const ts_features* f, int row);

/* Stratified row split for feature files that carry no split of their own. */
ts_status ts_features_split(const ts_features* f, double train_fraction, uint64_t seed,
                            ts_features** train_out, ts_features** eval_out);

/* ---- classifier grid ---- */

typedef struct ts_classifier_params {
    int knn_k;
    double logistic_l2;
    int logistic_epochs;
    double logistic_lr;
    double svm_c;
    int svm_epochs;
    double svm_lr;
    int rf_trees;
    int rf_max_depth;
    uint64_t rf_seed;
    int mlp_hidden;
    int mlp_epochs;
    double mlp_lr;
    uint64_t mlp_seed;
} ts_classifier_params;

void ts_classifier_params_init(ts_classifier_params* p);

/* Fits all six classifiers on the train rows and scores them on the eval
 * rows. A classifier that rejects its configuration fails alone; the grid
 * still comes back with its error recorded. */
ts_status ts_grid_fit(const ts_features* train, const ts_features* eval_rows,
                      const ts_classifier_params* params, ts_grid** out);
void ts_grid_free(ts_grid* g);

int ts_grid_size(const ts_grid* g);
const char* ts_grid_name(const ts_grid* g, int index);
int ts_grid_ok(const ts_grid* g, int index);
const char* ts_grid_error(const ts_grid* g, int index);

enum {
    TS_METRIC_ACCURACY = 0,
    TS_METRIC_PRECISION = 1,
    TS_METRIC_RECALL = 2,
    TS_METRIC_F1 = 3,
    TS_METRIC_SPECIFICITY = 4
};

/* Writes the metric value and returns 1 when defined, 0 when the metric is
 * undefined or the classifier failed. */
int ts_grid_metric(const ts_grid* g, int index, int metric, double* value);

/* Appends (or creates with header when append is 0) the per-classifier
 * metrics CSV rows under the given model name. */
ts_status ts_grid_write_csv(const ts_grid* g, const char* model_name, const char* path, int append);

/* ---- Grad-CAM ---- */

/* Heatmap for one image. target_class -1 means the model's own prediction.
 * nearest selects blocky nearest-neighbour upsampling instead of bilinear. */
ts_status ts_gradcam(ts_model* m, const ts_dataset* ds, int index, int target_class, int nearest,
                     ts_heatmap** out);
void ts_heatmap_free(ts_heatmap* h);

int ts_heatmap_size(const ts_heatmap* h);
int ts_heatmap_target_class(const ts_heatmap* h);
/* 1 when no positive evidence reached the map and it is all zeros. */
int ts_heatmap_degenerate(const ts_heatmap* h);
double ts_heatmap_raw_min(const ts_heatmap* h);
double ts_heatmap_raw_max(const ts_heatmap* h);
/* size*size normalized values in [0,1], row-major. */
const float* ts_heatmap_values(const ts_heatmap* h);

ts_status ts_heatmap_write_pgm(const ts_heatmap* h, const char* path);
/* Jet overlay on the source image; alpha 0 reproduces the source. */
ts_status ts_heatmap_write_overlay(const ts_heatmap* h, const ts_dataset* ds, int index,
                                   double alpha, const char* path);
ts_status ts_heatmap_write_sidecar(const ts_heatmap* h, const char* path);

/* ---- hyperparameter search ---- */

typedef struct ts_trial {
    int index;
    int filters[4];
    int kernel;
    double dropout;
    double lr;
    int batch_size;
    double val_accuracy;
    double val_loss;
    int diverged;
} ts_trial;

/* Random search over the built-in space (filters 16/32/64/128, kernel 3/5,
 * dropout 0.2..0.5, lr 1e-4..1e-2 log-uniform, batch 16/32/64), each trial
 * trained for budget_epochs. */
ts_status ts_search_run(const ts_dataset* ds, int trials, int budget_epochs, uint64_t seed,
                        ts_search** out);
void ts_search_free(ts_search* s);

int ts_search_trial_count(const ts_search* s);
ts_status ts_search_trial(const ts_search* s, int index, ts_trial* out);
int ts_search_best_index(const ts_search* s);

#ifdef __cplusplus
}
#endif

#endif /* TUMORSCOPE_H */
