#pragma once

// Confusion matrix and the five derived evaluation metrics. Positive class
// is label 1 (tumor). Metrics with a zero denominator are carried as
// undefined and serialize as the literal token "undef", never as 0.

#include <cstdint>
#include <string>
#include <vector>

#include "common.hpp"

namespace ts {

struct ConfusionMatrix {
    int64_t tp = 0;
    int64_t tn = 0;
    int64_t fp = 0;
    int64_t fn = 0;
    int64_t total() const { return tp + tn + fp + fn; }
};

inline ConfusionMatrix confusion(const std::vector<int>& predictions, const std::vector<int>& labels) {
    check_arg(predictions.size() == labels.size(),
              strformat("confusion: %zu predictions for %zu labels", predictions.size(), labels.size()));
    ConfusionMatrix cm;
    for (size_t i = 0; i < predictions.size(); ++i) {
        const int p = predictions[i], y = labels[i];
        check_arg((p == 0 || p == 1) && (y == 0 || y == 1),
                  strformat("confusion: entry %zu is not binary", i));
        if (y == 1)
            (p == 1 ? cm.tp : cm.fn) += 1;
        else
            (p == 0 ? cm.tn : cm.fp) += 1;
    }
    return cm;
}

struct Metric {
    double value = 0.0;
    bool defined = false;
};

inline Metric metric_ratio(int64_t num, int64_t den) {
    if (den == 0) return {};
    return {static_cast<double>(num) / static_cast<double>(den), true};
}

inline std::string metric_string(const Metric& m) { return m.defined ? fmt_g9(m.value) : "undef"; }

struct MetricReport {
    ConfusionMatrix cm;
    Metric accuracy;
    Metric precision;
    Metric recall;
    Metric f1;
    Metric specificity;
};

inline MetricReport report(const ConfusionMatrix& cm) {
    check_arg(cm.tp >= 0 && cm.tn >= 0 && cm.fp >= 0 && cm.fn >= 0, "report: negative counts");
    MetricReport r;
    r.cm = cm;
    r.accuracy = metric_ratio(cm.tp + cm.tn, cm.total());
    r.precision = metric_ratio(cm.tp, cm.tp + cm.fp);
    r.recall = metric_ratio(cm.tp, cm.tp + cm.fn);
    r.specificity = metric_ratio(cm.tn, cm.tn + cm.fp);
    if (r.precision.defined && r.recall.defined && r.precision.value + r.recall.value > 0.0) {
        r.f1 = {2.0 * r.precision.value * r.recall.value / (r.precision.value + r.recall.value), true};
    }
    return r;
}

inline std::string report_csv_header() {
    return "model,classifier,accuracy,precision,recall,f1,specificity";
}

inline std::string report_csv_row(const std::string& model, const std::string& classifier,
                                  const MetricReport& r) {
    return strformat("%s,%s,%s,%s,%s,%s,%s", model.c_str(), classifier.c_str(),
                     metric_string(r.accuracy).c_str(), metric_string(r.precision).c_str(),
                     metric_string(r.recall).c_str(), metric_string(r.f1).c_str(),
                     metric_string(r.specificity).c_str());
}

}  // namespace ts
