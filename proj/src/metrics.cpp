#include "metrics.hpp"

#include <stdexcept>

#include "json.hpp"

namespace preffend {

namespace {

ClassStats stats_from(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassStats s;
  const std::size_t pred = tp + fp;
  const std::size_t actual = tp + fn;
  s.precision = pred == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(pred);
  s.recall = actual == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(actual);
  // A class absent from both predictions and labels gets F1 = 0.
  s.f1 = (s.precision + s.recall) == 0.0
             ? 0.0
             : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

}  // namespace

Metrics Metrics::from_confusion(const Confusion& c) {
  Metrics m;
  m.confusion = c;
  const std::size_t total = c.total();
  m.accuracy = total == 0 ? 0.0
                          : static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
  m.fake = stats_from(c.tp, c.fp, c.fn);
  m.real = stats_from(c.tn, c.fn, c.fp);
  m.macro_f1 = (m.fake.f1 + m.real.f1) / 2.0;
  return m;
}

Metrics Metrics::from_predictions(std::span<const int> labels,
                                  std::span<const double> predictions,
                                  double threshold) {
  if (labels.size() != predictions.size()) {
    throw std::invalid_argument("metrics: " + std::to_string(labels.size()) +
                                " labels for " + std::to_string(predictions.size()) +
                                " predictions");
  }
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted_fake = predictions[i] >= threshold;
    const bool is_fake = labels[i] == 1;
    if (predicted_fake && is_fake) ++c.tp;
    else if (predicted_fake && !is_fake) ++c.fp;
    else if (!predicted_fake && is_fake) ++c.fn;
    else ++c.tn;
  }
  return from_confusion(c);
}

std::string Metrics::to_json_text() const {
  nlohmann::json j;
  j["accuracy"] = accuracy;
  j["macro_f1"] = macro_f1;
  j["fake"] = {{"precision", fake.precision}, {"recall", fake.recall}, {"f1", fake.f1}};
  j["real"] = {{"precision", real.precision}, {"recall", real.recall}, {"f1", real.f1}};
  j["confusion"] = {{"tp", confusion.tp}, {"fp", confusion.fp},
                    {"fn", confusion.fn}, {"tn", confusion.tn}};
  j["count"] = confusion.total();
  return j.dump();
}

}  // namespace preffend
