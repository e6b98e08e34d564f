#include "topogen/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <numeric>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

namespace topogen {

ConfusionMatrix::ConfusionMatrix(int classes) : k_(classes) {
  if (classes < 1) throw InputError("confusion matrix needs at least one class");
  counts_.assign(static_cast<std::size_t>(classes) * classes, 0);
}

std::int64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::row_sum(int gt) const {
  std::int64_t s = 0;
  for (int p = 0; p < k_; ++p) s += at(gt, p);
  return s;
}

std::int64_t ConfusionMatrix::col_sum(int pred) const {
  std::int64_t s = 0;
  for (int g = 0; g < k_; ++g) s += at(g, pred);
  return s;
}

void ConfusionMatrix::accumulate(const std::vector<int>& gt, const std::vector<int>& pred) {
  if (gt.size() != pred.size())
    throw InputError("label count mismatch: " + std::to_string(gt.size()) +
                     " ground-truth rows vs " + std::to_string(pred.size()) +
                     " predictions (first unmatched row " +
                     std::to_string(std::min(gt.size(), pred.size())) + ")");
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] < 0 || gt[i] >= k_ || pred[i] < 0 || pred[i] >= k_)
      throw InputError("label out of range [0, " + std::to_string(k_) + ") at row " +
                       std::to_string(i));
  }
  for (std::size_t i = 0; i < gt.size(); ++i) ++counts_[gt[i] * k_ + pred[i]];
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.k_ != k_) throw InputError("cannot add confusion matrices of different size");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

ConfusionMatrix accumulate(const std::vector<int>& gt, const std::vector<int>& pred,
                           int classes) {
  ConfusionMatrix cm(classes);
  cm.accumulate(gt, pred);
  return cm;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
  MetricsReport r;
  const int k = cm.classes();
  r.per_class.resize(k);
  double iou_sum = 0.0, acc_sum = 0.0;
  int in_gt = 0;
  std::int64_t trace = 0;
  for (int c = 0; c < k; ++c) {
    const std::int64_t tp = cm.at(c, c);
    const std::int64_t fn = cm.row_sum(c) - tp;
    const std::int64_t fp = cm.col_sum(c) - tp;
    trace += tp;
    if (tp + fp + fn > 0)
      r.per_class[c].iou = 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fp + fn);
    if (tp + fn > 0) {
      r.per_class[c].acc = 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn);
      iou_sum += *r.per_class[c].iou;
      acc_sum += *r.per_class[c].acc;
      ++in_gt;
    }
  }
  if (in_gt > 0) {
    r.miou = iou_sum / in_gt;
    r.macc = acc_sum / in_gt;
  }
  const std::int64_t total = cm.total();
  if (total > 0) r.oa = 100.0 * static_cast<double>(trace) / static_cast<double>(total);
  return r;
}

MetricsReport aggregate(const std::vector<ConfusionMatrix>& scenes, Aggregation mode) {
  if (scenes.empty()) throw InputError("aggregate: no scenes");
  if (mode == Aggregation::Micro) {
    ConfusionMatrix sum(scenes.front().classes());
    for (const auto& s : scenes) sum += s;
    return compute_metrics(sum);
  }
  const int k = scenes.front().classes();
  MetricsReport out;
  out.per_class.resize(k);
  std::vector<double> iou(k, 0.0), acc(k, 0.0);
  std::vector<int> n_iou(k, 0), n_acc(k, 0);
  for (const auto& s : scenes) {
    const MetricsReport r = compute_metrics(s);
    for (int c = 0; c < k; ++c) {
      if (r.per_class[c].iou) { iou[c] += *r.per_class[c].iou; ++n_iou[c]; }
      if (r.per_class[c].acc) { acc[c] += *r.per_class[c].acc; ++n_acc[c]; }
    }
    out.miou += r.miou;
    out.macc += r.macc;
    out.oa += r.oa;
  }
  for (int c = 0; c < k; ++c) {
    if (n_iou[c]) out.per_class[c].iou = iou[c] / n_iou[c];
    if (n_acc[c]) out.per_class[c].acc = acc[c] / n_acc[c];
  }
  const auto n = static_cast<double>(scenes.size());
  out.miou /= n;
  out.macc /= n;
  out.oa /= n;
  return out;
}

namespace {

std::string cell(const std::optional<double>& v) {
  if (!v) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << *v;
  return os.str();
}

}  // namespace

void write_report_text(std::ostream& os, const MetricsReport& r) {
  os << std::left << std::setw(8) << "Genus" << std::right << std::setw(10) << "IoU"
     << std::setw(10) << "Acc" << '\n';
  for (std::size_t c = 0; c < r.per_class.size(); ++c)
    os << std::left << std::setw(8) << c << std::right << std::setw(10)
       << cell(r.per_class[c].iou) << std::setw(10) << cell(r.per_class[c].acc) << '\n';
  os << '\n'
     << std::setw(10) << "mIoU" << std::setw(10) << "mAcc" << std::setw(10) << "OA" << '\n'
     << std::setw(10) << cell(r.miou) << std::setw(10) << cell(r.macc) << std::setw(10)
     << cell(r.oa) << '\n';
}

void write_report_csv(std::ostream& os, const MetricsReport& r) {
  os << "Genus,IoU,Acc\n";
  for (std::size_t c = 0; c < r.per_class.size(); ++c)
    os << c << ',' << cell(r.per_class[c].iou) << ',' << cell(r.per_class[c].acc) << '\n';
  os << "mIoU,mAcc,OA\n" << cell(r.miou) << ',' << cell(r.macc) << ',' << cell(r.oa) << '\n';
}

nlohmann::json report_json(const MetricsReport& r) {
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    nlohmann::json row{{"Genus", c}};
    row["IoU"] = r.per_class[c].iou ? nlohmann::json(*r.per_class[c].iou) : nlohmann::json();
    row["Acc"] = r.per_class[c].acc ? nlohmann::json(*r.per_class[c].acc) : nlohmann::json();
    classes.push_back(row);
  }
  return {{"per_class", classes},
          {"summary", {{"mIoU", r.miou}, {"mAcc", r.macc}, {"OA", r.oa}}}};
}

}  // namespace topogen
