#pragma once

// Six classical classifiers fit on extracted feature rows: k-nearest
// neighbors, logistic regression, linear SVM, gaussian naive Bayes, random
// forest, and a small MLP run on the autodiff engine. Distance- and
// gradient-based models standardize features with training-split statistics;
// trees operate on raw values since splits are scale-invariant.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "features.hpp"
#include "metrics.hpp"
#include "rng.hpp"

namespace ts {

struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stdev;

    static Standardizer fit(const FeatureMatrix& fm);
    std::vector<double> apply(const FeatureMatrix& fm) const;
};

// Majority vote among the k nearest training rows by euclidean distance on
// standardized features; k must be odd so binary votes cannot tie, and
// distance ties prefer the lower training index.
std::vector<int> knn_predict(const FeatureMatrix& train, const FeatureMatrix& query, int k);

struct LinearModel {
    Standardizer stats;
    std::vector<double> w;
    double b = 0.0;
    std::vector<double> objective_log;  // objective value at the start of each epoch
};

// Objective and gradient of l2-regularized binary cross entropy over
// standardized rows, exposed so the gradient can be checked independently.
double logistic_objective(const std::vector<double>& x, const std::vector<int>& y, int n, int d,
                          const std::vector<double>& w, double b, double l2);
void logistic_gradient(const std::vector<double>& x, const std::vector<int>& y, int n, int d,
                       const std::vector<double>& w, double b, double l2, std::vector<double>& gw,
                       double& gb);

LinearModel logistic_fit(const FeatureMatrix& train, double l2 = 1e-4, int epochs = 500,
                         double lr = 0.1);
std::vector<int> logistic_predict(const LinearModel& m, const FeatureMatrix& query);

// Hinge loss plus (1/2C)*|w|^2, minimized by full-batch subgradient descent
// on labels mapped to -1/+1.
double svm_objective(const std::vector<double>& x, const std::vector<int>& ypm, int n, int d,
                     const std::vector<double>& w, double b, double c);

LinearModel svm_fit(const FeatureMatrix& train, double c = 1.0, int epochs = 1000, double lr = 1e-3);
std::vector<int> svm_predict(const LinearModel& m, const FeatureMatrix& query);

struct NaiveBayesModel {
    Standardizer stats;
    std::array<double, 2> log_prior{};
    std::vector<double> mean[2];
    std::vector<double> var[2];  // floored at 1e-9
    std::vector<std::string> warnings;
};

NaiveBayesModel naive_bayes_fit(const FeatureMatrix& train);
// log P(1|row) - log P(0|row) for one standardized row
double naive_bayes_log_ratio(const NaiveBayesModel& m, std::span<const double> std_row);
// predicts 1 when the log ratio is positive, 0 otherwise (ties to 0)
std::vector<int> naive_bayes_predict(const NaiveBayesModel& m, const FeatureMatrix& query,
                                     std::vector<double>* log_ratios = nullptr);

struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = -1;  // set on leaves only
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    int predict(std::span<const double> row) const;
};

// Greedy gini tree over the given sample indices. At each node up to
// features_per_split distinct features are considered (all of them, scanned
// in order, when the budget covers the full dimension); candidate thresholds
// are midpoints between consecutive distinct values; equal-gini ties keep
// the first candidate. Rows with feature <= threshold go left.
DecisionTree fit_tree(const std::vector<double>& x, const std::vector<int>& y, int d,
                      std::vector<int> indices, int max_depth, int features_per_split, Rng& rng);

struct RandomForestModel {
    std::vector<DecisionTree> trees;
    int dim = 0;
};

// Each tree trains on a bootstrap sample with sqrt(D) features per split;
// a lone-tree forest sees the full sample so it can memorize. Forest and
// leaf votes both break ties toward class 0.
RandomForestModel random_forest_fit(const FeatureMatrix& train, int n_trees = 100,
                                    int max_depth = 16, uint64_t seed = 0);
std::vector<int> random_forest_predict(const RandomForestModel& m, const FeatureMatrix& query);

struct MlpConfig {
    std::vector<int> hidden = {64};
    int epochs = 200;
    double lr = 3e-3;
    uint64_t seed = 0;
};

// Fully-connected relu network with two logits, trained full-batch by Adam
// on cross entropy; predicts by argmax.
std::vector<int> mlp_fit_predict(const FeatureMatrix& train, const FeatureMatrix& query,
                                 const MlpConfig& cfg = {});

struct ClassifierConfig {
    int knn_k = 5;
    double logistic_l2 = 1e-4;
    int logistic_epochs = 500;
    double logistic_lr = 0.1;
    double svm_c = 1.0;
    int svm_epochs = 1000;
    double svm_lr = 1e-3;
    int rf_trees = 100;
    int rf_max_depth = 16;
    uint64_t rf_seed = 0;
    MlpConfig mlp;
};

struct GridEntry {
    std::string classifier;
    bool ok = false;
    std::string error;
    std::vector<int> predictions;
    MetricReport metrics;
};

// Fits all six classifiers on the train matrix and scores them on the eval
// matrix. A classifier that throws is reported in its grid row instead of
// aborting the others.
std::vector<GridEntry> fit_all(const FeatureMatrix& train, const FeatureMatrix& eval_set,
                               const ClassifierConfig& cfg = {});

std::string grid_csv(const std::string& model_name, const std::vector<GridEntry>& grid);
std::string grid_table(const std::string& model_name, const std::vector<GridEntry>& grid);

}  // namespace ts
