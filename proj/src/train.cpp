#include "train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "adam.hpp"

namespace ts {

std::string epoch_csv_header() { return "epoch,train_loss,train_acc,val_loss,val_acc"; }

std::string epoch_csv_row(const EpochLog& log) {
    return strformat("%d,%s,%s,%s,%s", log.epoch, fmt_g9(log.train_loss).c_str(),
                     fmt_g9(log.train_acc).c_str(), fmt_g9(log.val_loss).c_str(),
                     fmt_g9(log.val_acc).c_str());
}

EvalScore evaluate_model(Model<float>& model, const std::vector<const LabeledImage*>& images,
                         int batch_size) {
    check_arg(!images.empty(), "evaluate: no images given");
    check_arg(batch_size >= 1, "evaluate: batch size must be positive");
    double loss_sum = 0.0;
    size_t correct = 0;
    for (size_t start = 0; start < images.size(); start += static_cast<size_t>(batch_size)) {
        const size_t stop = std::min(images.size(), start + static_cast<size_t>(batch_size));
        std::vector<const LabeledImage*> chunk(images.begin() + static_cast<ptrdiff_t>(start),
                                               images.begin() + static_cast<ptrdiff_t>(stop));
        std::vector<int> labels;
        for (const auto* im : chunk) labels.push_back(im->label);
        auto fwd = forward<float>(nullptr, model, batch_tensor<float>(chunk), Mode::eval);
        auto loss = softmax_cross_entropy<float>(nullptr, fwd.logits, labels);
        loss_sum += static_cast<double>(loss.item()) * static_cast<double>(chunk.size());
        for (size_t i = 0; i < chunk.size(); ++i)
            if (argmax_row(fwd.logits, static_cast<int>(i)) == labels[i]) ++correct;
    }
    const double n = static_cast<double>(images.size());
    return {loss_sum / n, static_cast<double>(correct) / n};
}

TrainResult train(const ModelSpec& spec, const Dataset& dataset, const TrainConfig& config,
                  const EpochHook& hook) {
    spec.validate();
    config.validate();
    check_arg(dataset.target_size == spec.input_size,
              strformat("train: dataset images are %dpx but the model expects %dpx",
                        dataset.target_size, spec.input_size));
    check_arg(dataset.count(0, Split::train) > 0 && dataset.count(1, Split::train) > 0,
              "train: training split needs both classes");
    const auto train_set = dataset.members(Split::train);
    const auto val_set = dataset.members(Split::val);
    check_arg(!val_set.empty(), "train: validation split is empty");

    TrainResult result;
    result.model = Model<float>::initialized(spec, config.seed);
    AdamConfig opt_cfg;
    opt_cfg.lr = config.lr;
    Adam<float> opt(result.model.parameters(), opt_cfg);
    Rng shuffle_rng(derive_seed(config.seed, 1));
    Rng dropout_rng(derive_seed(config.seed, 2));

    std::vector<size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), size_t{0});

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        double loss_sum = 0.0;
        size_t seen = 0;
        size_t correct = 0;
        try {
            shuffle_rng.shuffle(order);
            for (size_t start = 0; start < order.size(); start += static_cast<size_t>(config.batch_size)) {
                const size_t stop =
                    std::min(order.size(), start + static_cast<size_t>(config.batch_size));
                if (stop - start < 2) break;  // batchnorm needs at least two rows
                std::vector<const LabeledImage*> chunk;
                std::vector<int> labels;
                for (size_t i = start; i < stop; ++i) {
                    chunk.push_back(train_set[order[i]]);
                    labels.push_back(chunk.back()->label);
                }
                Tape<float> tape;
                auto fwd =
                    forward(&tape, result.model, batch_tensor<float>(chunk), Mode::train, &dropout_rng);
                auto loss = softmax_cross_entropy(&tape, fwd.logits, labels);
                const double lv = loss.item();
                if (!std::isfinite(lv)) fail_runtime("loss is not finite");
                tape.backward(loss);
                opt.step();
                opt.zero_grad();
                loss_sum += lv * static_cast<double>(chunk.size());
                seen += chunk.size();
                for (size_t i = 0; i < chunk.size(); ++i)
                    if (argmax_row(fwd.logits, static_cast<int>(i)) == labels[i]) ++correct;
            }
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::runtime)
                fail_runtime(strformat("training diverged at epoch %d: %s", epoch, e.what()));
            throw;
        }

        const EvalScore val = evaluate_model(result.model, val_set, config.batch_size);
        EpochLog log;
        log.epoch = epoch;
        log.train_loss = loss_sum / static_cast<double>(seen);
        log.train_acc = static_cast<double>(correct) / static_cast<double>(seen);
        log.val_loss = val.loss;
        log.val_acc = val.accuracy;
        result.logs.push_back(log);

        result.model.trained_epochs = epoch;
        if (result.best_epoch == 0 || val.accuracy > result.best_val_accuracy) {
            result.best_epoch = epoch;
            result.best_val_accuracy = val.accuracy;
            result.best = result.model.clone();
            result.best.best_val_accuracy = val.accuracy;
        }
        result.model.best_val_accuracy = result.best_val_accuracy;

        if (hook && !hook(result.model, log)) break;
    }
    return result;
}

SearchResult random_search(const Dataset& dataset, const SearchSpace& space, int trials,
                           int budget_epochs, uint64_t seed) {
    check_arg(trials >= 1, "random search: need at least one trial");
    check_arg(budget_epochs >= 1, "random search: budget must be at least one epoch");
    check_arg(!space.filter_choices.empty() && !space.kernel_choices.empty() &&
                  !space.batch_choices.empty(),
              "random search: empty search space");
    check_arg(space.dropout_lo >= 0.0 && space.dropout_lo <= space.dropout_hi && space.dropout_hi < 1.0,
              "random search: dropout range must sit inside [0,1)");
    check_arg(space.lr_lo > 0.0 && space.lr_lo <= space.lr_hi, "random search: bad lr range");

    SearchResult result;
    result.best_index = -1;
    for (int t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(t)));
        TrialResult trial;
        trial.index = t;
        trial.spec.input_size = dataset.target_size;
        const int kernel =
            space.kernel_choices[static_cast<size_t>(rng.below(space.kernel_choices.size()))];
        for (auto& conv : trial.spec.convs) {
            conv.filters = space.filter_choices[static_cast<size_t>(
                rng.below(space.filter_choices.size()))];
            conv.kernel = kernel;
            conv.stride = 1;
            conv.padding = kernel / 2;
        }
        trial.spec.dropout_rate = rng.uniform(space.dropout_lo, space.dropout_hi);
        trial.config.epochs = budget_epochs;
        trial.config.batch_size = space.batch_choices[static_cast<size_t>(
            rng.below(space.batch_choices.size()))];
        trial.config.lr = std::exp(rng.uniform(std::log(space.lr_lo), std::log(space.lr_hi)));
        trial.config.seed = derive_seed(seed, 0x8000u + static_cast<uint64_t>(t));

        try {
            auto trained = train(trial.spec, dataset, trial.config);
            trial.val_accuracy = trained.best_val_accuracy;
            trial.val_loss = trained.logs[static_cast<size_t>(trained.best_epoch) - 1].val_loss;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::runtime) throw;
            trial.diverged = true;
            trial.val_accuracy = 0.0;
            trial.val_loss = std::numeric_limits<double>::infinity();
        }

        const bool better =
            result.best_index < 0 || trial.val_accuracy > result.trials[static_cast<size_t>(result.best_index)].val_accuracy ||
            (trial.val_accuracy == result.trials[static_cast<size_t>(result.best_index)].val_accuracy &&
             trial.val_loss < result.trials[static_cast<size_t>(result.best_index)].val_loss);
        result.trials.push_back(trial);
        if (better) {
            result.best_index = t;
            result.spec = trial.spec;
            result.config = trial.config;
        }
    }
    return result;
}

}  // namespace ts
