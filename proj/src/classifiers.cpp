#include "classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adam.hpp"
#include "ops.hpp"

namespace ts {

namespace {

constexpr double kVarianceFloor = 1e-9;

void check_fit_matrix(const FeatureMatrix& fm, const char* who) {
    check_arg(fm.dim > 0, strformat("%s: empty feature matrix", who));
    check_arg(fm.rows() >= 2, strformat("%s: need at least two training rows", who));
    check_arg(fm.values.size() == static_cast<size_t>(fm.rows()) * fm.dim &&
                  fm.labels.size() == static_cast<size_t>(fm.rows()),
              strformat("%s: inconsistent feature matrix", who));
    bool has[2] = {false, false};
    for (int l : fm.labels) {
        check_arg(l == 0 || l == 1, strformat("%s: non-binary label %d", who, l));
        has[l] = true;
    }
    check_arg(has[0] && has[1], strformat("%s: training data must contain both classes", who));
    for (double v : fm.values)
        check_arg(std::isfinite(v), strformat("%s: non-finite feature value", who));
}

void check_query(const FeatureMatrix& q, int dim, const char* who) {
    check_arg(q.rows() >= 1, strformat("%s: empty query", who));
    check_arg(q.dim == dim,
              strformat("%s: query dimension %d does not match training dimension %d", who, q.dim, dim));
    for (double v : q.values)
        check_arg(std::isfinite(v), strformat("%s: non-finite query value", who));
}

double softplus(double t) {
    return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double dot_row(const std::vector<double>& x, int row, int d, const std::vector<double>& w) {
    const double* p = x.data() + static_cast<size_t>(row) * d;
    double z = 0.0;
    for (int f = 0; f < d; ++f) z += p[f] * w[static_cast<size_t>(f)];
    return z;
}

}  // namespace

Standardizer Standardizer::fit(const FeatureMatrix& fm) {
    const int n = fm.rows(), d = fm.dim;
    Standardizer s;
    s.mean.assign(static_cast<size_t>(d), 0.0);
    s.stdev.assign(static_cast<size_t>(d), 1.0);
    for (int i = 0; i < n; ++i)
        for (int f = 0; f < d; ++f) s.mean[static_cast<size_t>(f)] += fm.values[static_cast<size_t>(i) * d + f];
    for (auto& m : s.mean) m /= n;
    std::vector<double> var(static_cast<size_t>(d), 0.0);
    for (int i = 0; i < n; ++i)
        for (int f = 0; f < d; ++f) {
            const double diff = fm.values[static_cast<size_t>(i) * d + f] - s.mean[static_cast<size_t>(f)];
            var[static_cast<size_t>(f)] += diff * diff;
        }
    for (int f = 0; f < d; ++f) {
        const double sd = std::sqrt(var[static_cast<size_t>(f)] / n);
        s.stdev[static_cast<size_t>(f)] = sd < 1e-12 ? 1.0 : sd;
    }
    return s;
}

std::vector<double> Standardizer::apply(const FeatureMatrix& fm) const {
    check_arg(fm.dim == static_cast<int>(mean.size()),
              strformat("standardizer: dimension %d does not match fitted %zu", fm.dim, mean.size()));
    std::vector<double> out(fm.values.size());
    const int d = fm.dim;
    for (int i = 0; i < fm.rows(); ++i)
        for (int f = 0; f < d; ++f) {
            const size_t at = static_cast<size_t>(i) * d + f;
            out[at] = (fm.values[at] - mean[static_cast<size_t>(f)]) / stdev[static_cast<size_t>(f)];
        }
    return out;
}

std::vector<int> knn_predict(const FeatureMatrix& train, const FeatureMatrix& query, int k) {
    check_fit_matrix(train, "knn");
    check_query(query, train.dim, "knn");
    check_arg(k >= 1, "knn: k must be positive");
    check_arg(k % 2 == 1, "knn: k must be odd");
    check_arg(k <= train.rows(), strformat("knn: k=%d exceeds %d training rows", k, train.rows()));

    const auto stats = Standardizer::fit(train);
    const auto xt = stats.apply(train);
    const auto xq = stats.apply(query);
    const int n = train.rows(), d = train.dim;

    std::vector<int> out(static_cast<size_t>(query.rows()));
    std::vector<std::pair<double, int>> order(static_cast<size_t>(n));
    for (int qi = 0; qi < query.rows(); ++qi) {
        const double* q = xq.data() + static_cast<size_t>(qi) * d;
        for (int i = 0; i < n; ++i) {
            const double* t = xt.data() + static_cast<size_t>(i) * d;
            double dist2 = 0.0;
            for (int f = 0; f < d; ++f) {
                const double diff = t[f] - q[f];
                dist2 += diff * diff;
            }
            order[static_cast<size_t>(i)] = {dist2, i};
        }
        std::sort(order.begin(), order.end());
        int votes = 0;
        for (int i = 0; i < k; ++i) votes += train.labels[static_cast<size_t>(order[static_cast<size_t>(i)].second)];
        out[static_cast<size_t>(qi)] = 2 * votes > k ? 1 : 0;
    }
    return out;
}

double logistic_objective(const std::vector<double>& x, const std::vector<int>& y, int n, int d,
                          const std::vector<double>& w, double b, double l2) {
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = dot_row(x, i, d, w) + b;
        loss += y[static_cast<size_t>(i)] == 1 ? softplus(-z) : softplus(z);
    }
    loss /= n;
    double wsq = 0.0;
    for (double v : w) wsq += v * v;
    return loss + 0.5 * l2 * wsq;
}

void logistic_gradient(const std::vector<double>& x, const std::vector<int>& y, int n, int d,
                       const std::vector<double>& w, double b, double l2, std::vector<double>& gw,
                       double& gb) {
    gw.assign(static_cast<size_t>(d), 0.0);
    gb = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = dot_row(x, i, d, w) + b;
        const double err = sigmoid(z) - y[static_cast<size_t>(i)];
        const double* p = x.data() + static_cast<size_t>(i) * d;
        for (int f = 0; f < d; ++f) gw[static_cast<size_t>(f)] += err * p[f];
        gb += err;
    }
    for (int f = 0; f < d; ++f) gw[static_cast<size_t>(f)] = gw[static_cast<size_t>(f)] / n + l2 * w[static_cast<size_t>(f)];
    gb /= n;
}

LinearModel logistic_fit(const FeatureMatrix& train, double l2, int epochs, double lr) {
    check_fit_matrix(train, "logistic");
    check_arg(l2 >= 0.0, "logistic: l2 must be nonnegative");
    check_arg(epochs >= 1, "logistic: epochs must be positive");
    check_arg(lr > 0.0, "logistic: learning rate must be positive");

    LinearModel m;
    m.stats = Standardizer::fit(train);
    const auto x = m.stats.apply(train);
    const int n = train.rows(), d = train.dim;
    m.w.assign(static_cast<size_t>(d), 0.0);
    m.objective_log.reserve(static_cast<size_t>(epochs));

    std::vector<double> gw;
    double gb = 0.0;
    for (int epoch = 1; epoch <= epochs; ++epoch) {
        const double obj = logistic_objective(x, train.labels, n, d, m.w, m.b, l2);
        if (!std::isfinite(obj)) fail_runtime(strformat("logistic regression diverged at epoch %d", epoch));
        m.objective_log.push_back(obj);
        logistic_gradient(x, train.labels, n, d, m.w, m.b, l2, gw, gb);
        for (int f = 0; f < d; ++f) m.w[static_cast<size_t>(f)] -= lr * gw[static_cast<size_t>(f)];
        m.b -= lr * gb;
    }
    return m;
}

std::vector<int> logistic_predict(const LinearModel& m, const FeatureMatrix& query) {
    check_query(query, static_cast<int>(m.w.size()), "logistic");
    const auto x = m.stats.apply(query);
    std::vector<int> out(static_cast<size_t>(query.rows()));
    for (int i = 0; i < query.rows(); ++i)
        out[static_cast<size_t>(i)] = dot_row(x, i, query.dim, m.w) + m.b > 0.0 ? 1 : 0;
    return out;
}

double svm_objective(const std::vector<double>& x, const std::vector<int>& ypm, int n, int d,
                     const std::vector<double>& w, double b, double c) {
    double hinge = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = dot_row(x, i, d, w) + b;
        hinge += std::max(0.0, 1.0 - ypm[static_cast<size_t>(i)] * z);
    }
    double wsq = 0.0;
    for (double v : w) wsq += v * v;
    return hinge / n + wsq / (2.0 * c);
}

LinearModel svm_fit(const FeatureMatrix& train, double c, int epochs, double lr) {
    check_fit_matrix(train, "svm");
    check_arg(c > 0.0, "svm: C must be positive");
    check_arg(epochs >= 1, "svm: epochs must be positive");
    check_arg(lr > 0.0, "svm: learning rate must be positive");

    LinearModel m;
    m.stats = Standardizer::fit(train);
    const auto x = m.stats.apply(train);
    const int n = train.rows(), d = train.dim;
    std::vector<int> ypm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) ypm[static_cast<size_t>(i)] = 2 * train.labels[static_cast<size_t>(i)] - 1;
    m.w.assign(static_cast<size_t>(d), 0.0);
    m.objective_log.reserve(static_cast<size_t>(epochs));

    std::vector<double> gw(static_cast<size_t>(d));
    for (int epoch = 1; epoch <= epochs; ++epoch) {
        const double obj = svm_objective(x, ypm, n, d, m.w, m.b, c);
        if (!std::isfinite(obj)) fail_runtime(strformat("svm diverged at epoch %d", epoch));
        m.objective_log.push_back(obj);

        for (int f = 0; f < d; ++f) gw[static_cast<size_t>(f)] = m.w[static_cast<size_t>(f)] / c;
        double gb = 0.0;
        for (int i = 0; i < n; ++i) {
            const double z = dot_row(x, i, d, m.w) + m.b;
            const int yi = ypm[static_cast<size_t>(i)];
            if (1.0 - yi * z > 0.0) {
                const double* p = x.data() + static_cast<size_t>(i) * d;
                for (int f = 0; f < d; ++f) gw[static_cast<size_t>(f)] -= static_cast<double>(yi) * p[f] / n;
                gb -= static_cast<double>(yi) / n;
            }
        }
        for (int f = 0; f < d; ++f) m.w[static_cast<size_t>(f)] -= lr * gw[static_cast<size_t>(f)];
        m.b -= lr * gb;
    }
    return m;
}

std::vector<int> svm_predict(const LinearModel& m, const FeatureMatrix& query) {
    check_query(query, static_cast<int>(m.w.size()), "svm");
    const auto x = m.stats.apply(query);
    std::vector<int> out(static_cast<size_t>(query.rows()));
    for (int i = 0; i < query.rows(); ++i)
        out[static_cast<size_t>(i)] = dot_row(x, i, query.dim, m.w) + m.b > 0.0 ? 1 : 0;
    return out;
}

NaiveBayesModel naive_bayes_fit(const FeatureMatrix& train) {
    check_fit_matrix(train, "naive_bayes");
    NaiveBayesModel m;
    m.stats = Standardizer::fit(train);
    const auto x = m.stats.apply(train);
    const int n = train.rows(), d = train.dim;

    int count[2] = {0, 0};
    for (int c = 0; c < 2; ++c) {
        m.mean[c].assign(static_cast<size_t>(d), 0.0);
        m.var[c].assign(static_cast<size_t>(d), 0.0);
    }
    for (int i = 0; i < n; ++i) {
        const int c = train.labels[static_cast<size_t>(i)];
        ++count[c];
        for (int f = 0; f < d; ++f) m.mean[c][static_cast<size_t>(f)] += x[static_cast<size_t>(i) * d + f];
    }
    for (int c = 0; c < 2; ++c)
        for (auto& v : m.mean[c]) v /= count[c];
    for (int i = 0; i < n; ++i) {
        const int c = train.labels[static_cast<size_t>(i)];
        for (int f = 0; f < d; ++f) {
            const double diff = x[static_cast<size_t>(i) * d + f] - m.mean[c][static_cast<size_t>(f)];
            m.var[c][static_cast<size_t>(f)] += diff * diff;
        }
    }
    for (int c = 0; c < 2; ++c) {
        if (count[c] == 1)
            m.warnings.push_back(strformat("class %d has a single training row; variance floored", c));
        for (auto& v : m.var[c]) v = std::max(v / count[c], kVarianceFloor);
        m.log_prior[static_cast<size_t>(c)] = std::log(static_cast<double>(count[c])) - std::log(static_cast<double>(n));
    }
    return m;
}

double naive_bayes_log_ratio(const NaiveBayesModel& m, std::span<const double> std_row) {
    check_arg(std_row.size() == m.mean[0].size(), "naive_bayes: row dimension mismatch");
    double score[2];
    for (int c = 0; c < 2; ++c) {
        score[c] = m.log_prior[static_cast<size_t>(c)];
        for (size_t f = 0; f < std_row.size(); ++f) {
            const double var = m.var[c][f];
            const double diff = std_row[f] - m.mean[c][f];
            score[c] += -0.5 * std::log(2.0 * M_PI * var) - diff * diff / (2.0 * var);
        }
    }
    return score[1] - score[0];
}

std::vector<int> naive_bayes_predict(const NaiveBayesModel& m, const FeatureMatrix& query,
                                     std::vector<double>* log_ratios) {
    check_query(query, static_cast<int>(m.mean[0].size()), "naive_bayes");
    const auto x = m.stats.apply(query);
    std::vector<int> out(static_cast<size_t>(query.rows()));
    if (log_ratios) log_ratios->assign(static_cast<size_t>(query.rows()), 0.0);
    for (int i = 0; i < query.rows(); ++i) {
        const double r = naive_bayes_log_ratio(
            m, {x.data() + static_cast<size_t>(i) * query.dim, static_cast<size_t>(query.dim)});
        if (log_ratios) (*log_ratios)[static_cast<size_t>(i)] = r;
        out[static_cast<size_t>(i)] = r > 0.0 ? 1 : 0;
    }
    return out;
}

int DecisionTree::predict(std::span<const double> row) const {
    check_arg(!nodes.empty(), "decision tree: not fitted");
    int at = 0;
    while (nodes[static_cast<size_t>(at)].label < 0) {
        const TreeNode& node = nodes[static_cast<size_t>(at)];
        at = row[static_cast<size_t>(node.feature)] <= node.threshold ? node.left : node.right;
    }
    return nodes[static_cast<size_t>(at)].label;
}

namespace {

struct TreeBuilder {
    const std::vector<double>& x;
    const std::vector<int>& y;
    int d;
    int max_depth;
    int features_per_split;
    Rng& rng;
    std::vector<TreeNode> nodes;

    double split_gini(int nl, int l1, int nr, int r1) const {
        auto gini = [](int cnt, int ones) {
            const double p = static_cast<double>(ones) / cnt;
            return 1.0 - p * p - (1.0 - p) * (1.0 - p);
        };
        return (nl * gini(nl, l1) + nr * gini(nr, r1)) / (nl + nr);
    }

    int build(const std::vector<int>& idx, int depth) {
        const int n = static_cast<int>(idx.size());
        int ones = 0;
        for (int i : idx) ones += y[static_cast<size_t>(i)];
        const int majority = 2 * ones > n ? 1 : 0;

        const int id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        if (ones == 0 || ones == n || depth >= max_depth) {
            nodes[static_cast<size_t>(id)].label = majority;
            return id;
        }

        std::vector<int> feats(static_cast<size_t>(d));
        std::iota(feats.begin(), feats.end(), 0);
        if (features_per_split < d) {
            for (int i = 0; i < features_per_split; ++i) {
                const size_t j = static_cast<size_t>(i) + rng.below(static_cast<uint64_t>(d - i));
                std::swap(feats[static_cast<size_t>(i)], feats[j]);
            }
            feats.resize(static_cast<size_t>(features_per_split));
        }

        double best_gini = 1e300;
        int best_feature = -1;
        double best_threshold = 0.0;
        std::vector<std::pair<double, int>> vals(static_cast<size_t>(n));
        for (int f : feats) {
            for (int i = 0; i < n; ++i) {
                const int row = idx[static_cast<size_t>(i)];
                vals[static_cast<size_t>(i)] = {x[static_cast<size_t>(row) * d + f], y[static_cast<size_t>(row)]};
            }
            std::sort(vals.begin(), vals.end());
            int left1 = 0;
            for (int i = 0; i + 1 < n; ++i) {
                left1 += vals[static_cast<size_t>(i)].second;
                if (vals[static_cast<size_t>(i)].first == vals[static_cast<size_t>(i) + 1].first) continue;
                const double g = split_gini(i + 1, left1, n - i - 1, ones - left1);
                if (g < best_gini) {
                    best_gini = g;
                    best_feature = f;
                    best_threshold =
                        (vals[static_cast<size_t>(i)].first + vals[static_cast<size_t>(i) + 1].first) / 2.0;
                }
            }
        }
        if (best_feature < 0) {  // all considered features constant on this node
            nodes[static_cast<size_t>(id)].label = majority;
            return id;
        }

        std::vector<int> left_idx, right_idx;
        for (int i : idx)
            (x[static_cast<size_t>(i) * d + best_feature] <= best_threshold ? left_idx : right_idx).push_back(i);
        const int left = build(left_idx, depth + 1);
        const int right = build(right_idx, depth + 1);
        nodes[static_cast<size_t>(id)].feature = best_feature;
        nodes[static_cast<size_t>(id)].threshold = best_threshold;
        nodes[static_cast<size_t>(id)].left = left;
        nodes[static_cast<size_t>(id)].right = right;
        return id;
    }
};

}  // namespace

DecisionTree fit_tree(const std::vector<double>& x, const std::vector<int>& y, int d,
                      std::vector<int> indices, int max_depth, int features_per_split, Rng& rng) {
    check_arg(d >= 1 && !indices.empty(), "fit_tree: empty input");
    check_arg(max_depth >= 1, "fit_tree: max depth must be positive");
    check_arg(features_per_split >= 1, "fit_tree: need at least one feature per split");
    TreeBuilder builder{x, y, d, max_depth, features_per_split, rng, {}};
    builder.build(indices, 0);
    DecisionTree tree;
    tree.nodes = std::move(builder.nodes);
    return tree;
}

RandomForestModel random_forest_fit(const FeatureMatrix& train, int n_trees, int max_depth,
                                    uint64_t seed) {
    check_fit_matrix(train, "random_forest");
    check_arg(n_trees >= 1, "random_forest: need at least one tree");
    check_arg(max_depth >= 1, "random_forest: max depth must be positive");

    const int n = train.rows(), d = train.dim;
    const int fps = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(d))));
    RandomForestModel m;
    m.dim = d;
    m.trees.reserve(static_cast<size_t>(n_trees));
    for (int t = 0; t < n_trees; ++t) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(t)));
        std::vector<int> indices(static_cast<size_t>(n));
        if (n_trees == 1) {
            std::iota(indices.begin(), indices.end(), 0);
        } else {
            for (auto& i : indices) i = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
        }
        m.trees.push_back(fit_tree(train.values, train.labels, d, std::move(indices), max_depth, fps, rng));
    }
    return m;
}

std::vector<int> random_forest_predict(const RandomForestModel& m, const FeatureMatrix& query) {
    check_arg(!m.trees.empty(), "random_forest: not fitted");
    check_query(query, m.dim, "random_forest");
    std::vector<int> out(static_cast<size_t>(query.rows()));
    for (int i = 0; i < query.rows(); ++i) {
        int votes = 0;
        for (const auto& tree : m.trees) votes += tree.predict(query.row(i));
        out[static_cast<size_t>(i)] = 2 * votes > static_cast<int>(m.trees.size()) ? 1 : 0;
    }
    return out;
}

std::vector<int> mlp_fit_predict(const FeatureMatrix& train, const FeatureMatrix& query,
                                 const MlpConfig& cfg) {
    check_fit_matrix(train, "mlp");
    check_query(query, train.dim, "mlp");
    check_arg(!cfg.hidden.empty(), "mlp: need at least one hidden layer");
    for (int h : cfg.hidden) check_arg(h >= 1, "mlp: hidden sizes must be positive");
    check_arg(cfg.epochs >= 1, "mlp: epochs must be positive");
    check_arg(cfg.lr > 0.0, "mlp: learning rate must be positive");

    const auto stats = Standardizer::fit(train);
    const int n = train.rows(), d = train.dim;
    Tensor<double> X = Tensor<double>::of({n, d}, stats.apply(train));

    std::vector<int> dims = {d};
    dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
    dims.push_back(2);
    Rng rng(derive_seed(cfg.seed, 0));
    std::vector<Tensor<double>> weights, biases, params;
    for (size_t l = 0; l + 1 < dims.size(); ++l) {
        Tensor<double> w({dims[l], dims[l + 1]}, true);
        init_kaiming_uniform(w, dims[l], rng);
        Tensor<double> b({dims[l + 1]}, true);
        weights.push_back(w);
        biases.push_back(b);
        params.push_back(w);
        params.push_back(b);
    }

    AdamConfig opt_cfg;
    opt_cfg.lr = cfg.lr;
    Adam<double> opt(params, opt_cfg);
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Tape<double> tape;
        Tensor<double> h = X;
        for (size_t l = 0; l < weights.size(); ++l) {
            h = dense(&tape, h, weights[l], biases[l]);
            if (l + 1 < weights.size()) h = relu(&tape, h);
        }
        auto loss = softmax_cross_entropy(&tape, h, train.labels);
        tape.backward(loss);
        opt.step();
        opt.zero_grad();
    }

    Tensor<double> hq = Tensor<double>::of({query.rows(), d}, stats.apply(query));
    for (size_t l = 0; l < weights.size(); ++l) {
        hq = dense<double>(nullptr, hq, weights[l], biases[l]);
        if (l + 1 < weights.size()) hq = relu<double>(nullptr, hq);
    }
    std::vector<int> out(static_cast<size_t>(query.rows()));
    for (int i = 0; i < query.rows(); ++i) out[static_cast<size_t>(i)] = argmax_row(hq, i);
    return out;
}

std::vector<GridEntry> fit_all(const FeatureMatrix& train, const FeatureMatrix& eval_set,
                               const ClassifierConfig& cfg) {
    check_arg(train.dim == eval_set.dim,
              strformat("fit_all: train dimension %d vs eval dimension %d", train.dim, eval_set.dim));
    std::vector<GridEntry> grid;
    auto run = [&](const char* name, auto&& fn) {
        GridEntry e;
        e.classifier = name;
        try {
            e.predictions = fn();
            e.metrics = report(confusion(e.predictions, eval_set.labels));
            e.ok = true;
        } catch (const Error& err) {
            e.error = err.what();
        }
        grid.push_back(std::move(e));
    };

    run("knn", [&] { return knn_predict(train, eval_set, cfg.knn_k); });
    run("logistic", [&] {
        return logistic_predict(logistic_fit(train, cfg.logistic_l2, cfg.logistic_epochs, cfg.logistic_lr),
                                eval_set);
    });
    run("svm", [&] { return svm_predict(svm_fit(train, cfg.svm_c, cfg.svm_epochs, cfg.svm_lr), eval_set); });
    run("naive_bayes", [&] { return naive_bayes_predict(naive_bayes_fit(train), eval_set); });
    run("random_forest", [&] {
        return random_forest_predict(random_forest_fit(train, cfg.rf_trees, cfg.rf_max_depth, cfg.rf_seed),
                                     eval_set);
    });
    run("mlp", [&] { return mlp_fit_predict(train, eval_set, cfg.mlp); });
    return grid;
}

std::string grid_csv(const std::string& model_name, const std::vector<GridEntry>& grid) {
    std::string out = report_csv_header() + "\n";
    for (const auto& e : grid) out += report_csv_row(model_name, e.classifier, e.metrics) + "\n";
    return out;
}

std::string grid_table(const std::string& model_name, const std::vector<GridEntry>& grid) {
    auto cell = [](const Metric& m) { return m.defined ? strformat("%.4f", m.value) : std::string("undef"); };
    std::string out = strformat("%-14s %-9s %-9s %-9s %-9s %-11s  (%s)\n", "classifier", "accuracy",
                                "precision", "recall", "f1", "specificity", model_name.c_str());
    for (const auto& e : grid) {
        if (!e.ok) {
            out += strformat("%-14s failed: %s\n", e.classifier.c_str(), e.error.c_str());
            continue;
        }
        out += strformat("%-14s %-9s %-9s %-9s %-9s %-11s\n", e.classifier.c_str(),
                         cell(e.metrics.accuracy).c_str(), cell(e.metrics.precision).c_str(),
                         cell(e.metrics.recall).c_str(), cell(e.metrics.f1).c_str(),
                         cell(e.metrics.specificity).c_str());
    }
    return out;
}

}  // namespace ts
