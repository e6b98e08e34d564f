#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace topogen {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// K x K counts; rows are ground truth, columns predictions.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int classes = 4);

  [[nodiscard]] int classes() const { return k_; }
  [[nodiscard]] std::int64_t at(int gt, int pred) const { return counts_[gt * k_ + pred]; }
  [[nodiscard]] std::int64_t total() const;
  [[nodiscard]] std::int64_t row_sum(int gt) const;
  [[nodiscard]] std::int64_t col_sum(int pred) const;

  /// Tallies one scene; throws InputError naming the first bad row.
  void accumulate(const std::vector<int>& gt, const std::vector<int>& pred);
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  int k_;
  std::vector<std::int64_t> counts_;
};

ConfusionMatrix accumulate(const std::vector<int>& gt, const std::vector<int>& pred,
                           int classes = 4);

struct ClassMetrics {
  std::optional<double> iou;  // absent when the class is in neither gt nor pred
  std::optional<double> acc;  // absent when the class is not in gt
};

/// Percentages. mIoU and mAcc average over the classes present in the
/// ground truth; OA is trace / total.
struct MetricsReport {
  std::vector<ClassMetrics> per_class;
  double miou = 0.0;
  double macc = 0.0;
  double oa = 0.0;
};

MetricsReport compute_metrics(const ConfusionMatrix& cm);

enum class Aggregation { Micro, Macro };

/// Micro: sum the matrices, then score. Macro: score each scene, then
/// average per-class values and summaries over scenes where they exist.
MetricsReport aggregate(const std::vector<ConfusionMatrix>& scenes,
                        Aggregation mode = Aggregation::Micro);

/// `Genus IoU Acc` rows followed by an `mIoU mAcc OA` summary.
void write_report_text(std::ostream& os, const MetricsReport& r);
void write_report_csv(std::ostream& os, const MetricsReport& r);
nlohmann::json report_json(const MetricsReport& r);

}  // namespace topogen
