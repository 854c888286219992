#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "classifiers.hpp"
#include "rng.hpp"

using ts::FeatureMatrix;

namespace {

FeatureMatrix make_fm(int dim, const std::vector<double>& values, const std::vector<int>& labels) {
    REQUIRE(values.size() == labels.size() * static_cast<size_t>(dim));
    FeatureMatrix fm;
    fm.dim = dim;
    for (size_t i = 0; i < labels.size(); ++i)
        fm.append(ts::strformat("r-%04zu", i), labels[i],
                  {values.data() + i * static_cast<size_t>(dim), static_cast<size_t>(dim)});
    return fm;
}

FeatureMatrix random_fm(ts::Rng& rng, int n, int d) {
    FeatureMatrix fm;
    fm.dim = d;
    std::vector<double> row(static_cast<size_t>(d));
    for (int i = 0; i < n; ++i) {
        for (auto& v : row) v = rng.uniform(-2.0, 2.0);
        const int label = i < 2 ? i : static_cast<int>(rng.below(2));
        fm.append(ts::strformat("r-%04d", i), label, row);
    }
    return fm;
}

// Two gaussian blobs at -separation and +separation per coordinate, labeled
// by blob. With spread well under the separation every classifier here
// should get them all right.
FeatureMatrix clusters(ts::Rng& rng, int per_class, int d, double separation, double spread) {
    FeatureMatrix fm;
    fm.dim = d;
    std::vector<double> row(static_cast<size_t>(d));
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < per_class; ++i) {
            const double center = c == 0 ? -separation : separation;
            for (auto& v : row) v = center + spread * rng.normal();
            fm.append(ts::strformat("c%d-%03d", c, i), c, row);
        }
    return fm;
}

std::vector<int> flipped_labels(const std::vector<int>& labels) {
    std::vector<int> out(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) out[i] = 1 - labels[i];
    return out;
}

}  // namespace

TEST_CASE("knn matches an exhaustive nearest-neighbor scan") {
    ts::Rng rng(501);
    int instances = 0;
    for (int ds = 0; ds < 5; ++ds) {
        const int n = 40, d = 5, nq = 10;
        const auto train = random_fm(rng, n, d);
        const auto query = random_fm(rng, nq, d);
        const auto stats = ts::Standardizer::fit(train);
        const auto xt = stats.apply(train);
        const auto xq = stats.apply(query);
        for (int k : {1, 3, 5}) {
            const auto got = ts::knn_predict(train, query, k);
            for (int qi = 0; qi < nq; ++qi) {
                // pick the k closest one at a time, earliest index on ties
                std::vector<char> used(static_cast<size_t>(n), 0);
                int votes = 0;
                for (int pick = 0; pick < k; ++pick) {
                    int best = -1;
                    double best_d = 0.0;
                    for (int i = 0; i < n; ++i) {
                        if (used[static_cast<size_t>(i)]) continue;
                        double dist2 = 0.0;
                        for (int f = 0; f < d; ++f) {
                            const double diff = xt[static_cast<size_t>(i) * d + f] -
                                                xq[static_cast<size_t>(qi) * d + f];
                            dist2 += diff * diff;
                        }
                        if (best < 0 || dist2 < best_d) {
                            best = i;
                            best_d = dist2;
                        }
                    }
                    used[static_cast<size_t>(best)] = 1;
                    votes += train.labels[static_cast<size_t>(best)];
                }
                CHECK(got[static_cast<size_t>(qi)] == (2 * votes > k ? 1 : 0));
                ++instances;
            }
        }
    }
    CHECK(instances >= 50);
}

TEST_CASE("knn votes among the closest neighbors") {
    const auto train = make_fm(1, {1.0, 2.0, 3.0}, {1, 0, 0});
    const auto query = make_fm(1, {0.0}, {0});
    CHECK(ts::knn_predict(train, query, 1) == std::vector<int>{1});
    CHECK(ts::knn_predict(train, query, 3) == std::vector<int>{0});

    // exact repeat of a training point
    const auto self = make_fm(1, {2.0}, {0});
    CHECK(ts::knn_predict(train, self, 1) == std::vector<int>{0});

    // equidistant neighbors resolve toward the lower training index
    const auto tied = make_fm(1, {0.0, 2.0}, {1, 0});
    CHECK(ts::knn_predict(tied, make_fm(1, {1.0}, {0}), 1) == std::vector<int>{1});

    CHECK_THROWS_AS(ts::knn_predict(train, query, 2), ts::Error);
    CHECK_THROWS_AS(ts::knn_predict(train, query, 5), ts::Error);
    CHECK_THROWS_AS(ts::knn_predict(train, query, 0), ts::Error);
    CHECK_THROWS_AS(ts::knn_predict(train, query, -3), ts::Error);
    CHECK_THROWS_AS(ts::knn_predict(train, make_fm(2, {0.0, 0.0}, {0}), 1), ts::Error);
    CHECK_THROWS_AS(ts::knn_predict(make_fm(1, {1.0, 2.0}, {0, 0}), query, 1), ts::Error);
}

TEST_CASE("naive bayes log ratios match a density product oracle") {
    ts::Rng rng(502);
    int instances = 0;
    for (int ds = 0; ds < 4; ++ds) {
        const int n = 30, d = 3, nq = 15;
        const auto train = random_fm(rng, n, d);
        const auto query = random_fm(rng, nq, d);
        const auto m = ts::naive_bayes_fit(train);
        std::vector<double> ratios;
        const auto preds = ts::naive_bayes_predict(m, query, &ratios);

        const auto xs = m.stats.apply(train);
        const auto qs = m.stats.apply(query);
        int cnt[2] = {0, 0};
        std::vector<double> mu[2], var[2];
        for (int c = 0; c < 2; ++c) {
            mu[c].assign(static_cast<size_t>(d), 0.0);
            var[c].assign(static_cast<size_t>(d), 0.0);
        }
        for (int i = 0; i < n; ++i) {
            const int c = train.labels[static_cast<size_t>(i)];
            ++cnt[c];
            for (int f = 0; f < d; ++f) mu[c][static_cast<size_t>(f)] += xs[static_cast<size_t>(i) * d + f];
        }
        for (int c = 0; c < 2; ++c)
            for (auto& v : mu[c]) v /= cnt[c];
        for (int i = 0; i < n; ++i) {
            const int c = train.labels[static_cast<size_t>(i)];
            for (int f = 0; f < d; ++f) {
                const double diff = xs[static_cast<size_t>(i) * d + f] - mu[c][static_cast<size_t>(f)];
                var[c][static_cast<size_t>(f)] += diff * diff;
            }
        }
        for (int c = 0; c < 2; ++c)
            for (auto& v : var[c]) v = std::max(v / cnt[c], 1e-9);

        for (int qi = 0; qi < nq; ++qi) {
            double score[2];
            for (int c = 0; c < 2; ++c) {
                score[c] = std::log(static_cast<double>(cnt[c])) - std::log(static_cast<double>(n));
                for (int f = 0; f < d; ++f) {
                    const double v = var[c][static_cast<size_t>(f)];
                    const double diff = qs[static_cast<size_t>(qi) * d + f] - mu[c][static_cast<size_t>(f)];
                    score[c] += -0.5 * std::log(2.0 * M_PI * v) - diff * diff / (2.0 * v);
                }
            }
            const double want = score[1] - score[0];
            CHECK(std::abs(ratios[static_cast<size_t>(qi)] - want) <= 1e-9);
            CHECK(preds[static_cast<size_t>(qi)] == (ratios[static_cast<size_t>(qi)] > 0.0 ? 1 : 0));
            ++instances;
        }
    }
    CHECK(instances >= 50);
}

TEST_CASE("naive bayes resolves the midpoint toward class zero") {
    const auto train = make_fm(1, {-3.0, -1.0, 1.0, 3.0}, {0, 0, 1, 1});
    const auto m = ts::naive_bayes_fit(train);
    CHECK(m.warnings.empty());

    std::vector<double> ratios;
    const auto preds = ts::naive_bayes_predict(m, make_fm(1, {0.0, -2.0, 2.0}, {0, 0, 0}), &ratios);
    CHECK(ratios[0] == 0.0);
    CHECK(preds[0] == 0);
    CHECK(ratios[1] < 0.0);
    CHECK(preds[1] == 0);
    CHECK(ratios[2] > 0.0);
    CHECK(preds[2] == 1);
}

TEST_CASE("a singleton class gets a floored variance and a warning") {
    const auto train = make_fm(1, {-1.0, 0.0, 1.0, 5.0}, {0, 0, 0, 1});
    const auto m = ts::naive_bayes_fit(train);
    REQUIRE(m.warnings.size() == 1);
    CHECK(m.warnings[0].find("class 1") != std::string::npos);
    CHECK(m.var[1][0] == 1e-9);
    CHECK(m.var[0][0] > 1e-9);
    CHECK(ts::naive_bayes_predict(m, make_fm(1, {5.0}, {0})) == std::vector<int>{1});
}

TEST_CASE("a depth one tree picks the same split as an exhaustive gini scan") {
    int instances = 0;
    for (int ds = 0; ds < 60; ++ds) {
        ts::Rng rng(ts::derive_seed(503, static_cast<uint64_t>(ds)));
        const int n = 20, d = 3;
        std::vector<double> x(static_cast<size_t>(n) * d);
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        std::vector<int> y(static_cast<size_t>(n));
        for (auto& l : y) l = static_cast<int>(rng.below(2));
        y[0] = 0;
        y[1] = 1;
        std::vector<int> idx(static_cast<size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);

        ts::Rng tree_rng(ts::derive_seed(504, static_cast<uint64_t>(ds)));
        const auto tree = ts::fit_tree(x, y, d, idx, 1, d, tree_rng);

        int ones = 0;
        for (int l : y) ones += l;
        double best_g = 1e300;
        int best_f = -1;
        double best_t = 0.0;
        std::vector<std::pair<double, int>> vals(static_cast<size_t>(n));
        for (int f = 0; f < d; ++f) {
            for (int i = 0; i < n; ++i)
                vals[static_cast<size_t>(i)] = {x[static_cast<size_t>(i) * d + f], y[static_cast<size_t>(i)]};
            std::sort(vals.begin(), vals.end());
            int left1 = 0;
            for (int i = 0; i + 1 < n; ++i) {
                left1 += vals[static_cast<size_t>(i)].second;
                if (vals[static_cast<size_t>(i)].first == vals[static_cast<size_t>(i) + 1].first) continue;
                const int nl = i + 1, nr = n - nl;
                const double pl = static_cast<double>(left1) / nl;
                const double pr = static_cast<double>(ones - left1) / nr;
                const double g = (nl * (1.0 - pl * pl - (1.0 - pl) * (1.0 - pl)) +
                                  nr * (1.0 - pr * pr - (1.0 - pr) * (1.0 - pr))) /
                                 (nl + nr);
                if (g < best_g) {
                    best_g = g;
                    best_f = f;
                    best_t = (vals[static_cast<size_t>(i)].first + vals[static_cast<size_t>(i) + 1].first) / 2.0;
                }
            }
        }
        REQUIRE(best_f >= 0);
        REQUIRE(tree.nodes.size() == 3);
        const auto& root = tree.nodes[0];
        CHECK(root.feature == best_f);
        CHECK(root.threshold == best_t);

        int lc = 0, l1 = 0, rc = 0, r1 = 0;
        for (int i = 0; i < n; ++i) {
            if (x[static_cast<size_t>(i) * d + best_f] <= best_t) {
                ++lc;
                l1 += y[static_cast<size_t>(i)];
            } else {
                ++rc;
                r1 += y[static_cast<size_t>(i)];
            }
        }
        CHECK(tree.nodes[static_cast<size_t>(root.left)].label == (2 * l1 > lc ? 1 : 0));
        CHECK(tree.nodes[static_cast<size_t>(root.right)].label == (2 * r1 > rc ? 1 : 0));
        ++instances;
    }
    CHECK(instances >= 50);
}

TEST_CASE("a lone fully grown tree memorizes its training sample") {
    ts::Rng rng(505);
    const auto train = random_fm(rng, 30, 4);
    const auto m = ts::random_forest_fit(train, 1, 32, 7);
    CHECK(m.trees.size() == 1);
    CHECK(ts::random_forest_predict(m, train) == train.labels);
}

TEST_CASE("constant features make a majority leaf") {
    const auto query = make_fm(2, {0.0, 0.0, 9.0, -9.0}, {0, 0});

    const auto majority0 = make_fm(2, {3.25, 3.25, 3.25, 3.25, 3.25, 3.25}, {0, 0, 1});
    CHECK(ts::random_forest_predict(ts::random_forest_fit(majority0, 1, 4, 1), query) ==
          std::vector<int>{0, 0});

    const auto majority1 = make_fm(2, {3.25, 3.25, 3.25, 3.25, 3.25, 3.25}, {0, 1, 1});
    CHECK(ts::random_forest_predict(ts::random_forest_fit(majority1, 1, 4, 1), query) ==
          std::vector<int>{1, 1});

    // an exact tie in the leaf goes to class zero
    const auto tie = make_fm(2, {3.25, 3.25, 3.25, 3.25}, {0, 1});
    CHECK(ts::random_forest_predict(ts::random_forest_fit(tie, 1, 4, 1), query) ==
          std::vector<int>{0, 0});
}

TEST_CASE("forest fits are deterministic in the seed") {
    ts::Rng rng(506);
    const auto train = random_fm(rng, 40, 5);
    const auto query = random_fm(rng, 15, 5);
    const auto a = ts::random_forest_predict(ts::random_forest_fit(train, 25, 8, 11), query);
    const auto b = ts::random_forest_predict(ts::random_forest_fit(train, 25, 8, 11), query);
    CHECK(a == b);

    CHECK_THROWS_AS(ts::random_forest_predict(ts::RandomForestModel{}, query), ts::Error);
    CHECK_THROWS_AS(ts::random_forest_fit(train, 0, 8, 1), ts::Error);
    CHECK_THROWS_AS(ts::random_forest_fit(train, 5, 0, 1), ts::Error);
}

TEST_CASE("logistic regression separates a line and its objective falls") {
    const auto train = make_fm(1, {-2.0, -1.0, 1.0, 2.0}, {0, 0, 1, 1});
    const auto m = ts::logistic_fit(train);
    CHECK(m.objective_log.size() == 500);
    CHECK(m.objective_log.back() < m.objective_log.front());
    CHECK(ts::logistic_predict(m, train) == train.labels);
    CHECK(ts::logistic_predict(m, make_fm(1, {-9.0, 9.0}, {0, 0})) == std::vector<int>{0, 1});

    CHECK_THROWS_AS(ts::logistic_fit(make_fm(1, {1.0, 2.0}, {1, 1})), ts::Error);
    CHECK_THROWS_AS(ts::logistic_fit(train, -0.5), ts::Error);
    CHECK_THROWS_AS(ts::logistic_fit(train, 1e-4, 0), ts::Error);
    CHECK_THROWS_AS(ts::logistic_fit(train, 1e-4, 500, 0.0), ts::Error);
}

TEST_CASE("the logistic gradient matches central differences") {
    ts::Rng rng(507);
    const int n = 8, d = 3;
    std::vector<double> x(static_cast<size_t>(n) * d);
    for (auto& v : x) v = rng.normal();
    std::vector<int> y(static_cast<size_t>(n));
    for (auto& l : y) l = static_cast<int>(rng.below(2));
    y[0] = 0;
    y[1] = 1;
    std::vector<double> w(static_cast<size_t>(d));
    for (auto& v : w) v = 0.5 * rng.normal();
    const double b = 0.3, l2 = 0.1;

    std::vector<double> gw;
    double gb = 0.0;
    ts::logistic_gradient(x, y, n, d, w, b, l2, gw, gb);

    const double eps = 1e-6;
    auto obj = [&](const std::vector<double>& ww, double bb) {
        return ts::logistic_objective(x, y, n, d, ww, bb, l2);
    };
    for (int f = 0; f < d; ++f) {
        auto wp = w, wm = w;
        wp[static_cast<size_t>(f)] += eps;
        wm[static_cast<size_t>(f)] -= eps;
        const double fd = (obj(wp, b) - obj(wm, b)) / (2.0 * eps);
        CHECK(gw[static_cast<size_t>(f)] == doctest::Approx(fd).epsilon(1e-5));
    }
    const double fdb = (obj(w, b + eps) - obj(w, b - eps)) / (2.0 * eps);
    CHECK(gb == doctest::Approx(fdb).epsilon(1e-5));
}

TEST_CASE("the svm learns a separable line and logs a falling objective") {
    const auto train = make_fm(1, {-2.0, -1.0, 1.0, 2.0}, {0, 0, 1, 1});
    const auto m = ts::svm_fit(train);
    REQUIRE(m.objective_log.size() == 1000);
    CHECK(m.objective_log[0] == 1.0);  // hinge of the zero-weight start
    CHECK(m.objective_log[99] < m.objective_log[0]);
    CHECK(ts::svm_predict(m, train) == train.labels);
    CHECK(ts::svm_predict(m, make_fm(1, {-5.0, 5.0}, {0, 0})) == std::vector<int>{0, 1});

    CHECK_THROWS_AS(ts::svm_fit(train, 0.0), ts::Error);
    CHECK_THROWS_AS(ts::svm_fit(train, 1.0, 0), ts::Error);
    CHECK_THROWS_AS(ts::svm_fit(train, 1.0, 1000, -1.0), ts::Error);
}

TEST_CASE("a linear svm cannot solve xor") {
    const auto train = make_fm(2, {0, 0, 0, 1, 1, 0, 1, 1}, {0, 1, 1, 0});
    const auto preds = ts::svm_predict(ts::svm_fit(train), train);
    int correct = 0;
    for (size_t i = 0; i < preds.size(); ++i) correct += preds[i] == train.labels[i];
    CHECK(correct <= 3);
}

TEST_CASE("a small mlp solves xor and reruns bitwise identically") {
    const auto train = make_fm(2, {0, 0, 0, 1, 1, 0, 1, 1}, {0, 1, 1, 0});
    ts::MlpConfig cfg;
    cfg.hidden = {8};
    cfg.epochs = 2000;
    cfg.lr = 0.01;
    cfg.seed = 0;
    const auto preds = ts::mlp_fit_predict(train, train, cfg);
    CHECK(preds == train.labels);
    CHECK(ts::mlp_fit_predict(train, train, cfg) == preds);

    ts::MlpConfig bad = cfg;
    bad.hidden = {};
    CHECK_THROWS_AS(ts::mlp_fit_predict(train, train, bad), ts::Error);
    bad.hidden = {0};
    CHECK_THROWS_AS(ts::mlp_fit_predict(train, train, bad), ts::Error);
    bad = cfg;
    bad.epochs = 0;
    CHECK_THROWS_AS(ts::mlp_fit_predict(train, train, bad), ts::Error);
    bad = cfg;
    bad.lr = -1.0;
    CHECK_THROWS_AS(ts::mlp_fit_predict(train, train, bad), ts::Error);
}

TEST_CASE("knn and naive bayes ignore per-feature affine rescaling") {
    ts::Rng rng(508);
    const int d = 4;
    const auto train = random_fm(rng, 30, d);
    const auto query = random_fm(rng, 10, d);
    const double scale[4] = {2.0, 0.5, 10.0, 1.3};
    const double shift[4] = {1.0, -2.0, 0.0, 5.0};
    auto rescale = [&](FeatureMatrix fm) {
        for (int i = 0; i < fm.rows(); ++i)
            for (int f = 0; f < d; ++f) {
                auto& v = fm.values[static_cast<size_t>(i) * d + f];
                v = v * scale[f] + shift[f];
            }
        return fm;
    };
    const auto train2 = rescale(train);
    const auto query2 = rescale(query);

    CHECK(ts::knn_predict(train2, query2, 5) == ts::knn_predict(train, query, 5));

    std::vector<double> r0, r1;
    const auto p0 = ts::naive_bayes_predict(ts::naive_bayes_fit(train), query, &r0);
    const auto p1 = ts::naive_bayes_predict(ts::naive_bayes_fit(train2), query2, &r1);
    CHECK(p0 == p1);
    for (size_t i = 0; i < r0.size(); ++i)
        CHECK(std::abs(r1[i] - r0[i]) <= 1e-9 * std::max(1.0, std::abs(r0[i])));
}

TEST_CASE("flipping the training labels flips every prediction on clean clusters") {
    ts::Rng rng(509);
    const int d = 3;
    const auto train = clusters(rng, 20, d, 2.0, 0.3);
    const auto query = clusters(rng, 6, d, 2.0, 0.3);
    auto flipped = train;
    flipped.labels = flipped_labels(train.labels);

    auto run_all = [&](const FeatureMatrix& tr) {
        std::vector<std::vector<int>> out;
        out.push_back(ts::knn_predict(tr, query, 5));
        out.push_back(ts::logistic_predict(ts::logistic_fit(tr), query));
        out.push_back(ts::svm_predict(ts::svm_fit(tr), query));
        out.push_back(ts::naive_bayes_predict(ts::naive_bayes_fit(tr), query));
        out.push_back(ts::random_forest_predict(ts::random_forest_fit(tr, 31, 16, 3), query));
        ts::MlpConfig mc;
        mc.epochs = 150;
        mc.seed = 1;
        out.push_back(ts::mlp_fit_predict(tr, query, mc));
        return out;
    };

    const auto base = run_all(train);
    for (const auto& preds : base) CHECK(preds == query.labels);
    const auto flip = run_all(flipped);
    for (size_t c = 0; c < base.size(); ++c) CHECK(flip[c] == flipped_labels(base[c]));
}

TEST_CASE("the grid fits all six classifiers on separable features") {
    ts::Rng rng(510);
    const int d = 6;
    const auto train = clusters(rng, 20, d, 1.5, 0.4);
    const auto eval_set = clusters(rng, 10, d, 1.5, 0.4);

    const auto grid = ts::fit_all(train, eval_set);
    REQUIRE(grid.size() == 6);
    const char* names[] = {"knn", "logistic", "svm", "naive_bayes", "random_forest", "mlp"};
    for (size_t i = 0; i < 6; ++i) {
        CHECK(grid[i].classifier == names[i]);
        CHECK(grid[i].ok);
        CHECK(grid[i].error.empty());
        REQUIRE(grid[i].metrics.accuracy.defined);
        CHECK(grid[i].metrics.accuracy.value >= 0.98);
    }

    // duplicated eval rows get duplicated predictions
    FeatureMatrix doubled;
    doubled.dim = d;
    for (int i = 0; i < eval_set.rows(); ++i) {
        doubled.append(eval_set.ids[static_cast<size_t>(i)] + "-a", eval_set.labels[static_cast<size_t>(i)],
                       eval_set.row(i));
        doubled.append(eval_set.ids[static_cast<size_t>(i)] + "-b", eval_set.labels[static_cast<size_t>(i)],
                       eval_set.row(i));
    }
    const auto grid2 = ts::fit_all(train, doubled);
    for (const auto& e : grid2) {
        REQUIRE(e.ok);
        for (size_t i = 0; i + 1 < e.predictions.size(); i += 2) CHECK(e.predictions[i] == e.predictions[i + 1]);
    }
}

TEST_CASE("one failing classifier does not poison the grid") {
    ts::Rng rng(511);
    const auto train = clusters(rng, 5, 3, 2.0, 0.3);
    const auto eval_set = clusters(rng, 4, 3, 2.0, 0.3);

    ts::ClassifierConfig cfg;
    cfg.knn_k = 101;  // more neighbors than training rows
    const auto grid = ts::fit_all(train, eval_set, cfg);
    REQUIRE(grid.size() == 6);
    CHECK_FALSE(grid[0].ok);
    CHECK(grid[0].classifier == "knn");
    CHECK_FALSE(grid[0].error.empty());
    CHECK(grid[0].predictions.empty());
    for (size_t i = 1; i < 6; ++i) CHECK(grid[i].ok);

    const auto csv = ts::grid_csv("cnn", grid);
    CHECK(static_cast<int>(std::count(csv.begin(), csv.end(), '\n')) == 7);
    CHECK(csv.rfind(ts::report_csv_header() + "\n", 0) == 0);
    CHECK(csv.find("cnn,knn,undef,undef,undef,undef,undef") != std::string::npos);

    const auto table = ts::grid_table("cnn", grid);
    CHECK(table.find("failed:") != std::string::npos);
    CHECK(table.find("random_forest") != std::string::npos);

    CHECK_THROWS_AS(ts::fit_all(train, clusters(rng, 3, 2, 2.0, 0.3), cfg), ts::Error);
}
