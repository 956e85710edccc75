#pragma once

// Case-study system model: who trains which task, how big the transmitted model
// is, what compressing it costs, how received models are merged per task, and the
// performance Q / cost-to-performance ratio that the solver minimises.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ilac/hdc/encoder.hpp"
#include "ilac/hdc/memory.hpp"
#include "ilac/radio.hpp"
#include "ilac/taskdata.hpp"

namespace ilac::sysmodel {

struct ClientSpec {
  double x_m = 0.0;
  double y_m = 0.0;
  double p_max_w = 0.2;
  // Cap on the compression cost this client can absorb (same units as kappa).
  double e_max = 15.0;
};

struct Scenario {
  std::vector<taskdata::TaskSpec> tasks;
  std::vector<ClientSpec> clients;
  std::vector<radio::ChannelState> channel;  // one per client, same order
  double b_max_hz = 1e6;
  double t_max_s = 0.5;
  std::size_t hv_dims = 10000;
  radio::NoiseModel noise{};
  double kappa = 1.0;
  unsigned bits_per_dim = 8;

  std::size_t num_tasks() const noexcept { return tasks.size(); }
  std::size_t num_clients() const noexcept { return clients.size(); }
  std::size_t classes_of(std::size_t task) const { return tasks.at(task).classes; }

  // p_max,j * h_j / N0 (Hz).
  double snr_bandwidth(std::size_t client) const;

  // Throws InvalidArgument on N < 2M, nonpositive budgets, mismatched channel list, ...
  void validate() const;
};

struct Layout {
  std::size_t clients = 12;
  double area_m = 100.0;
  double min_distance_m = 1.0;
  double p_max_w = 0.2;
  double e_max = 15.0;
};

// Server at the centre of an area_m x area_m square; clients uniform over the square,
// redrawn until at least min_distance_m from the server.
void place_clients(Scenario& scenario, const Layout& layout, std::uint64_t seed);

// Task index per client plus the number of hypervector dimensions each client keeps.
class Assignment {
 public:
  // Throws InvalidArgument if a task index is out of range, a task has fewer than two
  // clients, the vectors differ in length, or a kept-dimension count is zero.
  Assignment(std::size_t tasks, std::vector<std::size_t> task_of,
             std::vector<std::size_t> compressed_dims);

  // From an M x N 0/1 matrix; every column must sum to exactly 1.
  static Assignment from_matrix(const std::vector<std::vector<int>>& matrix,
                                std::vector<std::size_t> compressed_dims);

  std::size_t tasks() const noexcept { return tasks_; }
  std::size_t clients() const noexcept { return task_of_.size(); }
  std::size_t task_of(std::size_t client) const { return task_of_.at(client); }
  const std::vector<std::size_t>& task_of() const noexcept { return task_of_; }
  const std::vector<std::size_t>& compressed_dims() const noexcept { return compressed_dims_; }
  int a(std::size_t task, std::size_t client) const { return task_of_.at(client) == task ? 1 : 0; }
  std::size_t row_sum(std::size_t task) const;
  std::vector<std::vector<int>> matrix() const;

  // Additionally checks compressed_dims[j] <= D and shape against the scenario.
  void validate(const Scenario& scenario) const;

  bool operator==(const Assignment&) const = default;

 private:
  std::size_t tasks_;
  std::vector<std::size_t> task_of_;
  std::vector<std::size_t> compressed_dims_;
};

// Exhaustive check of the assignment constraints on a raw task-per-client vector.
bool assignment_feasible(std::span<const std::size_t> task_of, std::size_t tasks);

// s0 = K * D * bits_per_dim.
double model_size_bits(std::size_t classes, std::size_t dims, unsigned bits_per_dim);
// s0_j = sum_i A_ij K_i D * bits; `column` is client j's column of A (length M).
// Throws InvalidArgument unless exactly one entry is 1.
double model_size_bits(std::span<const int> column, std::span<const std::size_t> classes_per_task,
                       std::size_t dims, unsigned bits_per_dim);

// Kept dimensions for a nominal compression ratio: ceil(D / ratio), at least 1.
std::size_t kept_dims_for_ratio(std::size_t dims, double ratio);

// eta(s0 / sc) = kappa * (s0 / sc - 1). Throws InvalidArgument unless 0 < sc <= s0.
double compression_cost(double s0_bits, double sc_bits, double kappa);

// A trained model restricted to a seeded subset of dimensions shared by all classes.
struct CompressedModel {
  int task_id = 0;
  std::size_t dims = 0;                // original D
  std::vector<std::size_t> kept;       // strictly increasing indices into 0..D-1
  std::vector<std::vector<std::int64_t>> class_vectors;  // K x kept.size()
  std::vector<std::uint64_t> sample_counts;
  bool binary = false;                 // +-1 entries, Hamming decisions
  double validation_accuracy = 0.0;

  std::size_t classes() const noexcept { return class_vectors.size(); }
  double ratio() const noexcept {
    return static_cast<double>(dims) / static_cast<double>(kept.size());
  }

  // Cosine argmax on the kept coordinates of a full-D query (Hamming in binary mode,
  // with the query sign-quantised). Ties go to the lowest class index.
  std::size_t predict(const hdc::AccumulatorVector& query) const;
  std::vector<std::size_t> predict_batch(std::span<const hdc::AccumulatorVector> queries) const;
};

// Seeded sorted subset of `kept` indices from 0..dims-1; kept == dims is the identity.
std::vector<std::size_t> kept_indices(std::size_t dims, std::size_t kept, std::uint64_t seed);

// Throws InvalidArgument unless 1 <= kept <= am.dims().
CompressedModel compress(const hdc::AssociativeMemory& am, std::size_t kept, std::uint64_t seed,
                         int task_id = 0);
CompressedModel compress(const hdc::BinaryAssociativeMemory& am, std::size_t kept,
                         std::uint64_t seed, int task_id = 0);

// Binary-symmetric channel: every transmitted element has its sign flipped
// independently with probability flip_prob.
CompressedModel corrupt(const CompressedModel& model, double flip_prob, std::uint64_t seed);

// Server-side merge of the compressed models received for one task.
class AggregatedClassifier {
 public:
  AggregatedClassifier(int task_id, std::size_t dims, std::vector<std::vector<double>> class_vectors);

  int task_id() const noexcept { return task_id_; }
  std::size_t classes() const noexcept { return class_vectors_.size(); }
  const std::vector<double>& class_vector(std::size_t k) const { return class_vectors_.at(k); }

  // argmax_k dot(q, c_k) / |c_k| over nonzero classes; ties to the lowest index.
  // In binary mode pass the sign-quantised query.
  std::size_t predict(const hdc::AccumulatorVector& query) const;

 private:
  int task_id_;
  std::size_t dims_;
  std::vector<std::vector<double>> class_vectors_;
  std::vector<double> norms_;
};

// Weighted per-dimension sum over the union of kept indices (absent dims contribute 0).
// Weights must be positive and are normalised to sum to 1. Throws InvalidArgument on an
// empty list, a weight count mismatch, or models from different tasks / shapes.
AggregatedClassifier aggregate(std::span<const CompressedModel> models,
                               std::span<const double> weights);

// Q = (sum_i sum_j A_ij r_j) * (1/M) sum_i [sum_j A_ij phi_j / sum_j A_ij].
// `accuracy` holds phi of each client's received model.
double performance_q(const Assignment& assignment, std::span<const double> rates,
                     std::span<const double> accuracy);
double performance_q(std::span<const std::size_t> task_of, std::size_t tasks,
                     std::span<const double> rates, std::span<const double> accuracy);

// sum_j e_j / Q. Throws DegeneratePerformance if Q <= 0.
double cpr(std::span<const double> costs, double q);

// Validation accuracy as a function of compression ratio, piecewise linear in between.
struct AccuracyCurve {
  int task_id = 0;
  std::vector<double> ratios;    // strictly increasing, starts at 1
  std::vector<double> accuracy;  // in [0, 1]

  // Clamped to the end values outside the grid.
  double at(double ratio) const;
  void validate() const;
};

struct CurveOptions {
  std::vector<double> ratio_grid{1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  hdc::HdcConfig hdc{};
  double train_fraction = 0.8;
  // When positive, every compressed model passes through corrupt() before evaluation.
  double flip_prob = 0.0;
};

// Mean validation accuracy over seeds at each ratio, before any regularisation.
// Each seed generates the task data, splits it, encodes, trains one AM, and
// evaluates it compressed to ceil(D / ratio) dimensions. Within a seed the kept
// index sets are nested: a larger ratio keeps a subset of a smaller one's indices.
std::vector<double> measure_accuracy(const taskdata::TaskSpec& task, const CurveOptions& options);

// measure_accuracy followed by a running minimum from ratio 1 upward, which makes the
// curve nonincreasing while keeping the ratio-1 entry equal to the uncompressed accuracy.
AccuracyCurve build_accuracy_curve(const taskdata::TaskSpec& task, const CurveOptions& options);

// CSV with header task_id,ratio,accuracy; rows grouped by task in increasing ratio.
void write_curves_csv(std::ostream& out, std::span<const AccuracyCurve> curves);
std::vector<AccuracyCurve> read_curves_csv(std::istream& in);

}  // namespace ilac::sysmodel
