#pragma once

// Training loop for the scratch CNN plus the hyperparameter random search.

#include <functional>
#include <vector>

#include "dataset.hpp"
#include "model.hpp"

namespace ts {

struct TrainConfig {
    int epochs = 20;
    int batch_size = 32;
    double lr = 1e-3;
    uint64_t seed = 42;
    bool deterministic = false;
    int checkpoint_interval = 1;

    void validate() const {
        check_arg(epochs >= 1, "train config: epochs must be positive");
        check_arg(batch_size >= 2, "train config: batch size must be at least 2 (batchnorm)");
        check_arg(lr > 0.0, "train config: learning rate must be positive");
        check_arg(checkpoint_interval >= 1, "train config: checkpoint interval must be positive");
    }
};

struct EpochLog {
    int epoch = 0;
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_loss = 0.0;
    double val_acc = 0.0;
};

std::string epoch_csv_header();
std::string epoch_csv_row(const EpochLog& log);

struct TrainResult {
    Model<float> model;  // final weights after the last epoch
    Model<float> best;   // checkpoint with the highest val accuracy
    std::vector<EpochLog> logs;
    int best_epoch = 0;
    double best_val_accuracy = 0.0;
};

// Called after each epoch; return false to stop early. The model passed is
// the live training model at that epoch.
using EpochHook = std::function<bool(const Model<float>&, const EpochLog&)>;

TrainResult train(const ModelSpec& spec, const Dataset& dataset, const TrainConfig& config,
                  const EpochHook& hook = nullptr);

// Eval-mode loss and accuracy over one split.
struct EvalScore {
    double loss = 0.0;
    double accuracy = 0.0;
};
EvalScore evaluate_model(Model<float>& model, const std::vector<const LabeledImage*>& images,
                         int batch_size);

struct SearchSpace {
    std::vector<int> filter_choices = {16, 32, 64, 128};
    std::vector<int> kernel_choices = {3, 5};
    double dropout_lo = 0.2;
    double dropout_hi = 0.5;
    double lr_lo = 1e-4;
    double lr_hi = 1e-2;
    std::vector<int> batch_choices = {16, 32, 64};
};

struct TrialResult {
    int index = 0;
    ModelSpec spec;
    TrainConfig config;
    double val_accuracy = 0.0;
    double val_loss = 0.0;
    bool diverged = false;
};

struct SearchResult {
    ModelSpec spec;
    TrainConfig config;
    int best_index = 0;
    std::vector<TrialResult> trials;
};

// Samples `trials` hyperparameter combinations, trains each for
// `budget_epochs`, and returns the one with the highest val accuracy.
// Ties break to lower val loss, then lower trial index. A diverging trial
// scores zero instead of aborting the search.
SearchResult random_search(const Dataset& dataset, const SearchSpace& space, int trials,
                           int budget_epochs, uint64_t seed);

}  // namespace ts
