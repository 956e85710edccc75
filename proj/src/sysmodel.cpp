#include "ilac/sysmodel.hpp"

#include <algorithm>
#include <exception>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>

#include "ilac/csv.hpp"
#include "ilac/error.hpp"
#include "ilac/hdc/ops.hpp"
#include "ilac/rng.hpp"

namespace ilac::sysmodel {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t argmax_lowest(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// Scenario

double Scenario::snr_bandwidth(std::size_t client) const {
  return radio::snr_bandwidth(clients.at(client).p_max_w, channel.at(client).gain, noise);
}

void Scenario::validate() const {
  if (tasks.empty()) throw InvalidArgument("Scenario: no tasks");
  for (const auto& t : tasks) t.validate();
  if (clients.size() < 2 * tasks.size()) {
    throw InvalidArgument("Scenario: need N >= 2M clients (N = " + std::to_string(clients.size()) +
                          ", M = " + std::to_string(tasks.size()) + ")");
  }
  if (channel.size() != clients.size()) {
    throw InvalidArgument("Scenario: one channel state per client required");
  }
  if (!(b_max_hz > 0.0) || !(t_max_s > 0.0)) {
    throw InvalidArgument("Scenario: bandwidth and latency budgets must be positive");
  }
  if (hv_dims == 0) throw InvalidArgument("Scenario: hv_dims must be positive");
  if (bits_per_dim == 0) throw InvalidArgument("Scenario: bits_per_dim must be positive");
  if (!(kappa > 0.0)) throw InvalidArgument("Scenario: kappa must be positive");
  for (std::size_t j = 0; j < clients.size(); ++j) {
    if (!(clients[j].p_max_w > 0.0)) throw InvalidArgument("Scenario: p_max must be positive");
    if (!(clients[j].e_max >= 0.0)) throw InvalidArgument("Scenario: e_max must be nonnegative");
    if (!(channel[j].gain > 0.0)) throw InvalidArgument("Scenario: channel gain must be positive");
  }
  (void)noise.psd_w_per_hz();
}

void place_clients(Scenario& scenario, const Layout& layout, std::uint64_t seed) {
  if (!(layout.area_m > 0.0)) throw InvalidArgument("Layout: area must be positive");
  if (2.0 * layout.min_distance_m >= layout.area_m) {
    throw InvalidArgument("Layout: min distance does not fit inside the area");
  }
  scenario.clients.clear();
  scenario.channel.clear();
  const double centre = 0.5 * layout.area_m;
  for (std::size_t j = 0; j < layout.clients; ++j) {
    CounterRng rng(derive_key(seed, "placement", j));
    double x = 0.0;
    double y = 0.0;
    double d = 0.0;
    do {
      x = rng.uniform() * layout.area_m;
      y = rng.uniform() * layout.area_m;
      d = std::hypot(x - centre, y - centre);
    } while (d < layout.min_distance_m);
    scenario.clients.push_back({x, y, layout.p_max_w, layout.e_max});
    scenario.channel.push_back(radio::ChannelState::from_distance(j, d / 1000.0));
  }
}

// ---------------------------------------------------------------------------
// Assignment

Assignment::Assignment(std::size_t tasks, std::vector<std::size_t> task_of,
                       std::vector<std::size_t> compressed_dims)
    : tasks_(tasks), task_of_(std::move(task_of)), compressed_dims_(std::move(compressed_dims)) {
  if (tasks_ == 0) throw InvalidArgument("Assignment: no tasks");
  if (compressed_dims_.size() != task_of_.size()) {
    throw InvalidArgument("Assignment: one compressed size per client required");
  }
  for (auto t : task_of_) {
    if (t >= tasks_) throw InvalidArgument("Assignment: task index out of range");
  }
  for (std::size_t i = 0; i < tasks_; ++i) {
    if (row_sum(i) < 2) {
      throw InvalidArgument("Assignment: task " + std::to_string(i) +
                            " has fewer than two clients");
    }
  }
  for (auto d : compressed_dims_) {
    if (d == 0) throw InvalidArgument("Assignment: compressed size must be positive");
  }
}

Assignment Assignment::from_matrix(const std::vector<std::vector<int>>& matrix,
                                   std::vector<std::size_t> compressed_dims) {
  if (matrix.empty()) throw InvalidArgument("Assignment: empty matrix");
  const std::size_t n = matrix.front().size();
  std::vector<std::size_t> task_of(n, 0);
  std::vector<int> col_sum(n, 0);
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    if (matrix[i].size() != n) throw InvalidArgument("Assignment: ragged matrix");
    for (std::size_t j = 0; j < n; ++j) {
      const int v = matrix[i][j];
      if (v != 0 && v != 1) throw InvalidArgument("Assignment: entries must be 0 or 1");
      if (v == 1) task_of[j] = i;
      col_sum[j] += v;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (col_sum[j] != 1) {
      throw InvalidArgument("Assignment: client " + std::to_string(j) +
                            " must handle exactly one task");
    }
  }
  return Assignment(matrix.size(), std::move(task_of), std::move(compressed_dims));
}

std::size_t Assignment::row_sum(std::size_t task) const {
  return static_cast<std::size_t>(std::count(task_of_.begin(), task_of_.end(), task));
}

std::vector<std::vector<int>> Assignment::matrix() const {
  std::vector<std::vector<int>> m(tasks_, std::vector<int>(task_of_.size(), 0));
  for (std::size_t j = 0; j < task_of_.size(); ++j) m[task_of_[j]][j] = 1;
  return m;
}

void Assignment::validate(const Scenario& scenario) const {
  if (tasks_ != scenario.num_tasks() || task_of_.size() != scenario.num_clients()) {
    throw InvalidArgument("Assignment: shape does not match the scenario");
  }
  for (auto d : compressed_dims_) {
    if (d > scenario.hv_dims) throw InvalidArgument("Assignment: compressed size exceeds D");
  }
}

bool assignment_feasible(std::span<const std::size_t> task_of, std::size_t tasks) {
  std::vector<std::size_t> rows(tasks, 0);
  for (auto t : task_of) {
    if (t >= tasks) return false;
    ++rows[t];
  }
  return std::all_of(rows.begin(), rows.end(), [](std::size_t r) { return r >= 2; });
}

// ---------------------------------------------------------------------------
// Sizes and costs

double model_size_bits(std::size_t classes, std::size_t dims, unsigned bits_per_dim) {
  return static_cast<double>(classes) * static_cast<double>(dims) *
         static_cast<double>(bits_per_dim);
}

double model_size_bits(std::span<const int> column, std::span<const std::size_t> classes_per_task,
                       std::size_t dims, unsigned bits_per_dim) {
  if (column.size() != classes_per_task.size()) {
    throw InvalidArgument("model_size_bits: column length differs from task count");
  }
  int ones = 0;
  std::size_t classes = 0;
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (column[i] != 0 && column[i] != 1) throw InvalidArgument("model_size_bits: entries must be 0/1");
    if (column[i] == 1) {
      ++ones;
      classes = classes_per_task[i];
    }
  }
  if (ones != 1) throw InvalidArgument("model_size_bits: client must have exactly one task");
  return model_size_bits(classes, dims, bits_per_dim);
}

std::size_t kept_dims_for_ratio(std::size_t dims, double ratio) {
  if (!(ratio >= 1.0)) throw InvalidArgument("kept_dims_for_ratio: ratio must be >= 1");
  const auto kept = static_cast<std::size_t>(std::ceil(static_cast<double>(dims) / ratio));
  return std::clamp<std::size_t>(kept, 1, dims);
}

double compression_cost(double s0_bits, double sc_bits, double kappa) {
  if (!(sc_bits > 0.0) || sc_bits > s0_bits) {
    throw InvalidArgument("compression_cost: need 0 < sc <= s0");
  }
  return kappa * (s0_bits / sc_bits - 1.0);
}

// ---------------------------------------------------------------------------
// Compression

std::vector<std::size_t> kept_indices(std::size_t dims, std::size_t kept, std::uint64_t seed) {
  if (kept == 0 || kept > dims) throw InvalidArgument("compress: kept must lie in [1, D]");
  std::vector<std::size_t> idx(dims);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (kept == dims) return idx;
  CounterRng rng(derive_key(seed, "kept"));
  for (std::size_t i = 0; i < kept; ++i) {
    std::swap(idx[i], idx[i + rng.below(dims - i)]);
  }
  idx.resize(kept);
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

template <typename Row>
CompressedModel restrict_rows(std::size_t dims, std::size_t classes, const Row& row_of,
                              std::size_t kept, std::uint64_t seed, int task_id,
                              std::vector<std::uint64_t> counts, bool binary) {
  CompressedModel m;
  m.task_id = task_id;
  m.dims = dims;
  m.kept = kept_indices(dims, kept, seed);
  m.sample_counts = std::move(counts);
  m.binary = binary;
  m.class_vectors.resize(classes);
  for (std::size_t k = 0; k < classes; ++k) {
    const auto src = row_of(k);
    auto& dst = m.class_vectors[k];
    dst.resize(m.kept.size());
    for (std::size_t t = 0; t < m.kept.size(); ++t) dst[t] = src[m.kept[t]];
  }
  return m;
}

}  // namespace

CompressedModel compress(const hdc::AssociativeMemory& am, std::size_t kept, std::uint64_t seed,
                         int task_id) {
  return restrict_rows(
      am.dims(), am.classes(), [&](std::size_t k) { return am.class_vector(k).values(); }, kept,
      seed, task_id, am.sample_counts(), false);
}

CompressedModel compress(const hdc::BinaryAssociativeMemory& am, std::size_t kept,
                         std::uint64_t seed, int task_id) {
  return restrict_rows(
      am.dims(), am.classes(), [&](std::size_t k) { return am.class_vector(k).values(); }, kept,
      seed, task_id, am.sample_counts(), true);
}

std::size_t CompressedModel::predict(const hdc::AccumulatorVector& query) const {
  if (query.dims() != dims) throw InvalidArgument("predict: query dimension mismatch");
  std::vector<double> scores(classes(), kNegInf);
  bool any = false;
  for (std::size_t k = 0; k < classes(); ++k) {
    const auto& cv = class_vectors[k];
    std::int64_t dot = 0;
    std::int64_t nn = 0;
    if (binary) {
      if (sample_counts[k] == 0) continue;
      for (std::size_t t = 0; t < kept.size(); ++t) {
        dot += (query[kept[t]] < 0 ? -1 : 1) * cv[t];
      }
      nn = static_cast<std::int64_t>(kept.size());
    } else {
      for (std::size_t t = 0; t < kept.size(); ++t) {
        dot += query[kept[t]] * cv[t];
        nn += cv[t] * cv[t];
      }
      if (nn == 0) continue;
    }
    any = true;
    scores[k] = static_cast<double>(dot) / std::sqrt(static_cast<double>(nn));
  }
  if (!any) throw NoTrainedClasses("predict: no trained classes on the kept dimensions");
  return argmax_lowest(scores);
}

std::vector<std::size_t> CompressedModel::predict_batch(
    std::span<const hdc::AccumulatorVector> queries) const {
  std::vector<std::size_t> out(queries.size());
  const auto n = static_cast<std::ptrdiff_t>(queries.size());
  // Exceptions must not escape the parallel region; collect and rethrow.
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t q = 0; q < n; ++q) {
    try {
      out[static_cast<std::size_t>(q)] = predict(queries[static_cast<std::size_t>(q)]);
    } catch (...) {
#pragma omp critical
      error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

CompressedModel corrupt(const CompressedModel& model, double flip_prob, std::uint64_t seed) {
  if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) {
    throw InvalidArgument("corrupt: flip probability must lie in [0, 1]");
  }
  CompressedModel out = model;
  for (std::size_t k = 0; k < out.classes(); ++k) {
    CounterRng rng(derive_key(seed, "bsc", k));
    for (auto& v : out.class_vectors[k]) {
      if (rng.uniform() < flip_prob) v = -v;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation

AggregatedClassifier::AggregatedClassifier(int task_id, std::size_t dims,
                                           std::vector<std::vector<double>> class_vectors)
    : task_id_(task_id), dims_(dims), class_vectors_(std::move(class_vectors)) {
  norms_.reserve(class_vectors_.size());
  for (const auto& v : class_vectors_) {
    if (v.size() != dims_) throw InvalidArgument("AggregatedClassifier: class dims differ");
    double s = 0.0;
    for (double x : v) s += x * x;
    norms_.push_back(std::sqrt(s));
  }
}

std::size_t AggregatedClassifier::predict(const hdc::AccumulatorVector& query) const {
  if (query.dims() != dims_) throw InvalidArgument("predict: query dimension mismatch");
  std::vector<double> scores(classes(), kNegInf);
  bool any = false;
  for (std::size_t k = 0; k < classes(); ++k) {
    if (norms_[k] == 0.0) continue;
    any = true;
    double dot = 0.0;
    const auto& cv = class_vectors_[k];
    for (std::size_t d = 0; d < dims_; ++d) dot += static_cast<double>(query[d]) * cv[d];
    scores[k] = dot / norms_[k];
  }
  if (!any) throw NoTrainedClasses("predict: aggregated model has no trained classes");
  return argmax_lowest(scores);
}

AggregatedClassifier aggregate(std::span<const CompressedModel> models,
                               std::span<const double> weights) {
  if (models.empty()) throw InvalidArgument("aggregate: no models");
  if (weights.size() != models.size()) throw InvalidArgument("aggregate: one weight per model");
  const auto& first = models.front();
  double total = 0.0;
  for (std::size_t m = 0; m < models.size(); ++m) {
    const auto& model = models[m];
    if (model.task_id != first.task_id) throw InvalidArgument("aggregate: models from different tasks");
    if (model.dims != first.dims || model.classes() != first.classes()) {
      throw InvalidArgument("aggregate: model shapes differ");
    }
    if (!(weights[m] > 0.0)) throw InvalidArgument("aggregate: weights must be positive");
    total += weights[m];
  }
  std::vector<std::vector<double>> merged(first.classes(), std::vector<double>(first.dims, 0.0));
  for (std::size_t m = 0; m < models.size(); ++m) {
    const double w = weights[m] / total;
    const auto& model = models[m];
    for (std::size_t k = 0; k < model.classes(); ++k) {
      if (model.binary && model.sample_counts[k] == 0) continue;
      for (std::size_t t = 0; t < model.kept.size(); ++t) {
        merged[k][model.kept[t]] += w * static_cast<double>(model.class_vectors[k][t]);
      }
    }
  }
  return AggregatedClassifier(first.task_id, first.dims, std::move(merged));
}

// ---------------------------------------------------------------------------
// Performance and CPR

double performance_q(std::span<const std::size_t> task_of, std::size_t tasks,
                     std::span<const double> rates, std::span<const double> accuracy) {
  if (rates.size() != task_of.size() || accuracy.size() != task_of.size()) {
    throw InvalidArgument("performance_q: one rate and one accuracy per client required");
  }
  if (!assignment_feasible(task_of, tasks)) {
    throw InvalidArgument("performance_q: infeasible assignment");
  }
  double rate_sum = 0.0;
  std::vector<double> acc_sum(tasks, 0.0);
  std::vector<double> count(tasks, 0.0);
  for (std::size_t j = 0; j < task_of.size(); ++j) {
    if (rates[j] < 0.0) throw InvalidArgument("performance_q: negative rate");
    if (accuracy[j] < 0.0 || accuracy[j] > 1.0) {
      throw InvalidArgument("performance_q: accuracy outside [0, 1]");
    }
    rate_sum += rates[j];
    acc_sum[task_of[j]] += accuracy[j];
    count[task_of[j]] += 1.0;
  }
  double mean_acc = 0.0;
  for (std::size_t i = 0; i < tasks; ++i) mean_acc += acc_sum[i] / count[i];
  mean_acc /= static_cast<double>(tasks);
  return rate_sum * mean_acc;
}

double performance_q(const Assignment& assignment, std::span<const double> rates,
                     std::span<const double> accuracy) {
  return performance_q(assignment.task_of(), assignment.tasks(), rates, accuracy);
}

double cpr(std::span<const double> costs, double q) {
  if (!(q > 0.0)) throw DegeneratePerformance("cpr: performance Q must be positive");
  return std::accumulate(costs.begin(), costs.end(), 0.0) / q;
}

// ---------------------------------------------------------------------------
// Accuracy curves

double AccuracyCurve::at(double ratio) const {
  if (ratios.empty()) throw InvalidArgument("AccuracyCurve: empty curve");
  if (ratio <= ratios.front()) return accuracy.front();
  if (ratio >= ratios.back()) return accuracy.back();
  const auto hi = static_cast<std::size_t>(
      std::upper_bound(ratios.begin(), ratios.end(), ratio) - ratios.begin());
  const std::size_t lo = hi - 1;
  const double t = (ratio - ratios[lo]) / (ratios[hi] - ratios[lo]);
  return accuracy[lo] + t * (accuracy[hi] - accuracy[lo]);
}

void AccuracyCurve::validate() const {
  if (ratios.empty() || ratios.size() != accuracy.size()) {
    throw InvalidArgument("AccuracyCurve: need one accuracy per grid ratio");
  }
  if (ratios.front() != 1.0) throw InvalidArgument("AccuracyCurve: grid must start at 1");
  for (std::size_t g = 1; g < ratios.size(); ++g) {
    if (!(ratios[g] > ratios[g - 1])) throw InvalidArgument("AccuracyCurve: grid not increasing");
  }
  for (double a : accuracy) {
    if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("AccuracyCurve: accuracy outside [0, 1]");
  }
}

std::vector<double> measure_accuracy(const taskdata::TaskSpec& task, const CurveOptions& options) {
  task.validate();
  if (options.seeds.empty()) throw InvalidArgument("measure_accuracy: no seeds");
  if (!(options.flip_prob >= 0.0 && options.flip_prob <= 1.0)) {
    throw InvalidArgument("measure_accuracy: flip probability must lie in [0, 1]");
  }
  if (options.ratio_grid.empty() || options.ratio_grid.front() != 1.0) {
    throw InvalidArgument("measure_accuracy: ratio grid must start at 1");
  }
  const auto tid = static_cast<std::uint64_t>(static_cast<std::int64_t>(task.task_id));
  const std::size_t dims = options.hdc.dims;
  std::vector<double> sum(options.ratio_grid.size(), 0.0);

  for (auto seed : options.seeds) {
    const auto data = taskdata::generate(task, derive_key(seed, "data", tid));
    const auto [train, valid] =
        taskdata::split(data, options.train_fraction, derive_key(seed, "split", tid));
    // Metadata codes: task tag, feature count, quantiser width.
    const hdc::Encoder encoder(options.hdc, task.feature_dim,
                               {static_cast<std::int64_t>(task.task_id) + 1,
                                static_cast<std::int64_t>(task.feature_dim), 8},
                               derive_key(seed, "encoder", tid));
    const auto train_hv = encoder.encode_batch(train.feature_matrix(), train.records.size());
    const auto am = hdc::train_am(train_hv, train.labels(), task.classes);
    auto valid_hv = encoder.encode_batch(valid.feature_matrix(), valid.records.size());
    const auto truth = valid.labels();

    std::optional<hdc::BinaryAssociativeMemory> binary_am;
    if (options.hdc.binarize) binary_am.emplace(am);

    for (std::size_t g = 0; g < options.ratio_grid.size(); ++g) {
      const auto kept = kept_dims_for_ratio(dims, options.ratio_grid[g]);
      const auto key = derive_key(seed, "compress", tid);
      auto model = binary_am ? compress(*binary_am, kept, key, task.task_id)
                             : compress(am, kept, key, task.task_id);
      if (options.flip_prob > 0.0) {
        model = corrupt(model, options.flip_prob, derive_key(seed, "bsc", tid * 1000 + g));
      }
      const auto pred = model.predict_batch(valid_hv);
      std::size_t hits = 0;
      for (std::size_t r = 0; r < pred.size(); ++r) hits += pred[r] == truth[r] ? 1 : 0;
      sum[g] += static_cast<double>(hits) / static_cast<double>(pred.size());
    }
  }
  for (auto& s : sum) s /= static_cast<double>(options.seeds.size());
  return sum;
}

AccuracyCurve build_accuracy_curve(const taskdata::TaskSpec& task, const CurveOptions& options) {
  AccuracyCurve curve;
  curve.task_id = task.task_id;
  curve.ratios = options.ratio_grid;
  curve.accuracy = measure_accuracy(task, options);
  for (std::size_t g = 1; g < curve.accuracy.size(); ++g) {
    curve.accuracy[g] = std::min(curve.accuracy[g], curve.accuracy[g - 1]);
  }
  curve.validate();
  return curve;
}

void write_curves_csv(std::ostream& out, std::span<const AccuracyCurve> curves) {
  out << "task_id,ratio,accuracy\n";
  for (const auto& c : curves) {
    for (std::size_t g = 0; g < c.ratios.size(); ++g) {
      out << c.task_id << ',' << csv::format_double(c.ratios[g]) << ','
          << csv::format_double(c.accuracy[g]) << '\n';
    }
  }
}

std::vector<AccuracyCurve> read_curves_csv(std::istream& in) {
  const auto table = csv::read(in);
  const auto c_task = table.column("task_id");
  const auto c_ratio = table.column("ratio");
  const auto c_acc = table.column("accuracy");
  std::vector<AccuracyCurve> curves;
  std::map<int, std::size_t> index;
  for (const auto& row : table.rows) {
    const auto tid = static_cast<int>(csv::parse_int(row[c_task], "task_id"));
    auto [it, inserted] = index.try_emplace(tid, curves.size());
    if (inserted) curves.push_back(AccuracyCurve{tid, {}, {}});
    auto& c = curves[it->second];
    c.ratios.push_back(csv::parse_double(row[c_ratio], "ratio"));
    c.accuracy.push_back(csv::parse_double(row[c_acc], "accuracy"));
  }
  for (const auto& c : curves) c.validate();
  return curves;
}

}  // namespace ilac::sysmodel
