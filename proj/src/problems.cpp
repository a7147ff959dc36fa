#include "ofw/problems.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

namespace ofw::problems {

namespace {

std::uint64_t round_seed(std::uint64_t seed, int t, std::uint64_t salt) {
  return core::mix_seed(core::mix_seed(seed, static_cast<std::uint64_t>(t)), salt);
}

// One-sample lifting oracle: each query draws one shared base subset and
// returns the per-coordinate marginals.
class LiftingOracle final : public core::StochasticGradientOracle {
 public:
  LiftingOracle(std::shared_ptr<const submodular::SetFunction> f, Rng rng)
      : f_(std::move(f)), rng_(rng) {}

 protected:
  Vector sample(const Vector& x) override {
    return submodular::grad_one_sample_vector(*f_, x, rng_);
  }

 private:
  std::shared_ptr<const submodular::SetFunction> f_;
  Rng rng_;
};

double gamma_sample(Rng& rng, double alpha) {
  if (alpha < 1.0) {
    const double u = std::max(core::rand_uniform(rng), 1e-300);
    return gamma_sample(rng, alpha + 1.0) * std::pow(u, 1.0 / alpha);
  }
  // Marsaglia-Tsang squeeze.
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x = core::rand_normal(rng);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = core::rand_uniform(rng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::vector<int> sample_distinct(Rng& rng, int population, int count) {
  std::vector<int> pool(population);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < count; ++i) {
    const int j = i + static_cast<int>(core::rand_below(rng, population - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

std::vector<std::vector<std::string>> read_csv_cells(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open csv file: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == EOF) break;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw ParseError("empty csv file: " + path);
  return rows;
}

std::string trimmed(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

double parse_cell(const std::string& raw, int row, bool* missing) {
  const std::string cell = trimmed(raw);
  if (cell.empty()) {
    if (!missing) throw ParseError("empty cell in row " + std::to_string(row));
    *missing = true;
    return 0.0;
  }
  if (missing) *missing = false;
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw ParseError("non-numeric cell '" + cell + "' in row " + std::to_string(row));
  }
  if (used != cell.size())
    throw ParseError("non-numeric cell '" + cell + "' in row " + std::to_string(row));
  return value;
}

}  // namespace

ExperimentStream::ExperimentStream(std::shared_ptr<const core::ConstraintSet> constraint,
                                   int horizon, core::ObjectiveSense sense,
                                   std::function<StreamRound(int)> factory,
                                   std::optional<core::SmoothObjective> expected)
    : constraint_(std::move(constraint)),
      horizon_(horizon),
      sense_(sense),
      factory_(std::move(factory)),
      expected_(std::move(expected)) {
  if (!constraint_) throw std::invalid_argument("constraint set required");
  if (horizon_ < 1) throw std::invalid_argument("horizon must be at least 1");
}

StreamRound ExperimentStream::round(int t) const {
  if (t < 1 || t > horizon_)
    throw std::invalid_argument("round index out of range: " + std::to_string(t));
  return factory_(t);
}

Matrix load_ratings_csv(const std::string& path, double input_lo, double input_hi) {
  if (!(input_lo < input_hi)) throw std::invalid_argument("bad input range");
  const auto rows = read_csv_cells(path);
  const std::size_t cols = rows.front().size();
  Matrix out(rows.size(), cols);
  const double scale = 20.0 / (input_hi - input_lo);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols)
      throw ParseError("ragged csv: row " + std::to_string(r + 1) + " has " +
                       std::to_string(rows[r].size()) + " cells, expected " +
                       std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c) {
      bool missing = false;
      const double raw = parse_cell(rows[r][c], static_cast<int>(r + 1), &missing);
      out(r, c) = missing ? 0.0 : std::clamp((raw - input_lo) * scale, 0.0, 20.0);
    }
  }
  return out;
}

Matrix load_topics_csv(const std::string& path) {
  const auto rows = read_csv_cells(path);
  const std::size_t cols = rows.front().size();
  Matrix out(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols)
      throw ParseError("ragged csv: row " + std::to_string(r + 1) + " has " +
                       std::to_string(rows[r].size()) + " cells, expected " +
                       std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c)
      out(r, c) = parse_cell(rows[r][c], static_cast<int>(r + 1), nullptr);
  }
  return out;
}

Matrix synthetic_ratings(int users, int items, int rank, std::uint64_t seed) {
  if (users < 1 || items < 1 || rank < 1) throw std::invalid_argument("bad shape");
  Rng rng(seed);
  Matrix a(users, rank), b(rank, items);
  for (int i = 0; i < users; ++i)
    for (int r = 0; r < rank; ++r) a(i, r) = core::rand_normal(rng);
  for (int r = 0; r < rank; ++r)
    for (int j = 0; j < items; ++j) b(r, j) = core::rand_normal(rng);
  Matrix m = a * b / std::sqrt(static_cast<double>(rank));
  for (int i = 0; i < users; ++i)
    for (int j = 0; j < items; ++j)
      m(i, j) = std::clamp(10.0 + 5.0 * m(i, j) + core::rand_normal(rng), 0.0, 20.0);
  return m;
}

Matrix synthetic_topics(int docs, int topics, double alpha, std::uint64_t seed) {
  if (docs < 1 || topics < 1 || alpha <= 0.0) throw std::invalid_argument("bad shape");
  Rng rng(seed);
  Matrix p(docs, topics);
  for (int d = 0; d < docs; ++d) {
    double sum = 0.0;
    for (int j = 0; j < topics; ++j) {
      p(d, j) = gamma_sample(rng, alpha);
      sum += p(d, j);
    }
    p.row(d) /= sum;
  }
  return p;
}

Matrix synthetic_low_rank(int rows, int cols, int rank, std::uint64_t seed) {
  if (rows < 1 || cols < 1 || rank < 1) throw std::invalid_argument("bad shape");
  Rng rng(seed);
  Matrix a(rows, rank), b(rank, cols);
  for (int i = 0; i < rows; ++i)
    for (int r = 0; r < rank; ++r) a(i, r) = core::rand_normal(rng);
  for (int r = 0; r < rank; ++r)
    for (int j = 0; j < cols; ++j) b(r, j) = core::rand_normal(rng);
  return a * b / std::sqrt(static_cast<double>(rank));
}

ExperimentStream facility_stream(const Matrix& ratings, int batch, int horizon,
                                 double budget, std::uint64_t seed) {
  if (ratings.size() == 0) throw std::invalid_argument("empty ratings matrix");
  if (batch < 1) throw std::invalid_argument("batch size must be positive");
  const int users = static_cast<int>(ratings.rows());
  const bool with_replacement = static_cast<long>(batch) * horizon > users;
  if (with_replacement)
    std::cerr << "[facility_stream] batch*horizon exceeds user count; "
                 "sampling user batches with replacement\n";
  auto data = std::make_shared<Matrix>(ratings);
  auto constraint =
      std::make_shared<lmo::BudgetedBox>(static_cast<int>(ratings.cols()), budget);
  auto factory = [data, batch, seed, users, with_replacement](int t) {
    Rng rng(round_seed(seed, t, 0x626174u));
    Matrix block(batch, data->cols());
    for (int i = 0; i < batch; ++i) {
      const int row = with_replacement
                          ? static_cast<int>(core::rand_below(rng, users))
                          : (t - 1) * batch + i;
      block.row(i) = data->row(row);
    }
    submodular::FacilityLocationExtension extension(block);
    auto f = std::make_shared<submodular::SetFunction>(
        submodular::make_facility_location(block));
    StreamRound round;
    round.objective = extension.objective();
    round.oracle =
        std::make_shared<LiftingOracle>(f, Rng(round_seed(seed, t, 0x67726164u)));
    round.set_function = f;
    return round;
  };
  return ExperimentStream(constraint, horizon,
                          core::ObjectiveSense::MaximizeDRSubmodular, factory);
}

ExperimentStream coverage_stream(const Matrix& doc_topics, int batch, int horizon,
                                 double budget, std::uint64_t seed) {
  if (doc_topics.size() == 0) throw std::invalid_argument("empty topic matrix");
  if (batch < 1 || batch > doc_topics.rows())
    throw std::invalid_argument("batch must be between 1 and the corpus size");
  for (int d = 0; d < doc_topics.rows(); ++d) {
    if (std::abs(doc_topics.row(d).sum() - 1.0) > 1e-6)
      throw std::invalid_argument("topic row " + std::to_string(d + 1) +
                                  " does not sum to 1");
  }
  auto data = std::make_shared<Matrix>(doc_topics);
  auto constraint = std::make_shared<lmo::BudgetedBox>(batch, budget);
  const int corpus = static_cast<int>(doc_topics.rows());
  auto factory = [data, batch, corpus, seed](int t) {
    Rng rng(round_seed(seed, t, 0x646f6373u));
    const std::vector<int> docs = sample_distinct(rng, corpus, batch);
    Matrix block(batch, data->cols());
    for (int i = 0; i < batch; ++i) block.row(i) = data->row(docs[i]);
    submodular::CoverageExtension extension(block);
    auto f =
        std::make_shared<submodular::SetFunction>(submodular::make_coverage(block));
    StreamRound round;
    round.objective = extension.objective();
    round.oracle =
        std::make_shared<LiftingOracle>(f, Rng(round_seed(seed, t, 0x67726164u)));
    round.set_function = f;
    return round;
  };
  return ExperimentStream(constraint, horizon,
                          core::ObjectiveSense::MaximizeDRSubmodular, factory);
}

ExperimentStream flow_stream(std::shared_ptr<const lmo::FlowNetwork> network,
                             int horizon, double sigma, std::uint64_t seed) {
  if (!network) throw std::invalid_argument("network required");
  const int edges = network->dimension();
  auto factory = [edges, sigma, seed](int t) {
    Rng rng(round_seed(seed, t, 0x77656467u));
    auto w = std::make_shared<Vector>(edges);
    for (int e = 0; e < edges; ++e) (*w)[e] = 100.0 + 20.0 * core::rand_uniform(rng);
    StreamRound round;
    round.objective = {
        [w](const Vector& x) { return w->dot(x.cwiseProduct(x)); },
        [w](const Vector& x) { return Vector(2.0 * w->cwiseProduct(x)); }};
    round.oracle = core::make_noisy_oracle(
        [w](const Vector& x) { return Vector(2.0 * w->cwiseProduct(x)); }, sigma,
        Rng(round_seed(seed, t, 0x6e6f6973u)));
    return round;
  };
  core::SmoothObjective expected{
      [](const Vector& x) { return 110.0 * x.squaredNorm(); },
      [](const Vector& x) { return Vector(220.0 * x); }};
  return ExperimentStream(std::move(network), horizon,
                          core::ObjectiveSense::MinimizeConvex, factory, expected);
}

namespace {

ExperimentStream matcomp_stream_impl(
    const Matrix& target,
    std::function<std::vector<std::pair<int, int>>(int)> batch_for_round, int batch,
    int horizon, double trace_radius, std::uint64_t seed) {
  const int m = static_cast<int>(target.rows());
  const int n = static_cast<int>(target.cols());
  auto data = std::make_shared<Matrix>(target);
  auto constraint = std::make_shared<lmo::NuclearBall>(m, n, trace_radius);
  const double scale = static_cast<double>(batch);
  auto factory = [data, batch_for_round, m, n, scale, seed](int t) {
    auto obs = std::make_shared<std::vector<std::pair<int, int>>>(batch_for_round(t));
    auto value = [data, obs, m, n](const Vector& x) {
      const Matrix X = lmo::NuclearBall::to_matrix(x, m, n);
      double total = 0.0;
      for (const auto& [i, j] : *obs) {
        const double r = X(i, j) - (*data)(i, j);
        total += r * r;
      }
      return total;
    };
    auto gradient = [data, obs, m, n](const Vector& x) {
      const Matrix X = lmo::NuclearBall::to_matrix(x, m, n);
      Matrix g = Matrix::Zero(m, n);
      for (const auto& [i, j] : *obs) g(i, j) += 2.0 * (X(i, j) - (*data)(i, j));
      return lmo::NuclearBall::to_vector(g);
    };
    // Single-entry subsample scaled by the batch size; unbiased for the
    // batch gradient.
    class EntryOracle final : public core::StochasticGradientOracle {
     public:
      EntryOracle(std::shared_ptr<Matrix> data,
                  std::shared_ptr<std::vector<std::pair<int, int>>> obs, int m, int n,
                  double scale, Rng rng)
          : data_(std::move(data)), obs_(std::move(obs)), m_(m), n_(n), scale_(scale),
            rng_(rng) {}

     protected:
      Vector sample(const Vector& x) override {
        const auto& [i, j] = (*obs_)[core::rand_below(rng_, obs_->size())];
        Vector g = Vector::Zero(x.size());
        const double xij = x[j * m_ + i];  // column-major flattening
        g[j * m_ + i] = scale_ * 2.0 * (xij - (*data_)(i, j));
        return g;
      }

     private:
      std::shared_ptr<Matrix> data_;
      std::shared_ptr<std::vector<std::pair<int, int>>> obs_;
      int m_, n_;
      double scale_;
      Rng rng_;
    };
    StreamRound round;
    round.objective = {value, gradient};
    round.oracle = std::make_shared<EntryOracle>(
        data, obs, m, n, scale, Rng(round_seed(seed, t, 0x656e7472u)));
    return round;
  };
  const double density = scale / static_cast<double>(m) / static_cast<double>(n);
  core::SmoothObjective expected{
      [data, density, m, n](const Vector& x) {
        const Matrix X = lmo::NuclearBall::to_matrix(x, m, n);
        return density * (X - *data).squaredNorm();
      },
      [data, density, m, n](const Vector& x) {
        const Matrix X = lmo::NuclearBall::to_matrix(x, m, n);
        return lmo::NuclearBall::to_vector(2.0 * density * (X - *data));
      }};
  return ExperimentStream(constraint, horizon, core::ObjectiveSense::MinimizeConvex,
                          factory, expected);
}

}  // namespace

ExperimentStream matrix_completion_stream(const Matrix& target, int batch, int horizon,
                                          double trace_radius, std::uint64_t seed) {
  if (target.size() == 0) throw std::invalid_argument("empty target matrix");
  if (batch < 1) throw std::invalid_argument("batch size must be positive");
  const int m = static_cast<int>(target.rows());
  const int n = static_cast<int>(target.cols());
  if (batch > m * n) throw std::invalid_argument("batch exceeds the entry count");
  auto batch_for_round = [m, n, batch, seed](int t) {
    Rng rng(round_seed(seed, t, 0x6f627374u));
    const std::vector<int> flat = sample_distinct(rng, m * n, batch);
    std::vector<std::pair<int, int>> obs;
    obs.reserve(batch);
    for (int idx : flat) obs.emplace_back(idx % m, idx / m);
    return obs;
  };
  return matcomp_stream_impl(target, batch_for_round, batch, horizon, trace_radius,
                             seed);
}

ExperimentStream matrix_completion_stream(
    const Matrix& target, std::vector<std::vector<std::pair<int, int>>> batches,
    double trace_radius, std::uint64_t seed) {
  if (target.size() == 0) throw std::invalid_argument("empty target matrix");
  if (batches.empty()) throw std::invalid_argument("at least one batch required");
  const int m = static_cast<int>(target.rows());
  const int n = static_cast<int>(target.cols());
  for (const auto& b : batches) {
    if (b.empty()) throw std::invalid_argument("empty observation batch");
    for (const auto& [i, j] : b)
      if (i < 0 || i >= m || j < 0 || j >= n)
        throw std::invalid_argument("observed index out of range");
  }
  const int batch = static_cast<int>(batches.front().size());
  auto shared = std::make_shared<std::vector<std::vector<std::pair<int, int>>>>(
      std::move(batches));
  auto batch_for_round = [shared](int t) { return (*shared)[t - 1]; };
  return matcomp_stream_impl(target, batch_for_round, batch,
                             static_cast<int>(shared->size()), trace_radius, seed);
}

ExperimentStream quadratic_stream(std::shared_ptr<const core::ConstraintSet> set,
                                  int horizon, double sigma,
                                  std::uint64_t objective_seed,
                                  std::uint64_t noise_seed) {
  if (!set) throw std::invalid_argument("constraint set required");
  const int dim = set->dimension();
  auto factory = [dim, sigma, objective_seed, noise_seed](int t) {
    Rng rng(round_seed(objective_seed, t, 0x74686574u));
    auto theta = std::make_shared<Vector>(dim);
    for (int i = 0; i < dim; ++i) (*theta)[i] = core::rand_uniform(rng);
    StreamRound round;
    round.objective = {
        [theta](const Vector& x) { return (x - *theta).squaredNorm(); },
        [theta](const Vector& x) { return Vector(2.0 * (x - *theta)); }};
    round.oracle = core::make_noisy_oracle(
        [theta](const Vector& x) { return Vector(2.0 * (x - *theta)); }, sigma,
        Rng(round_seed(noise_seed, t, 0x6e6f6973u)));
    return round;
  };
  auto mean = std::make_shared<Vector>(Vector::Constant(dim, 0.5));
  const double variance = dim / 12.0;  // Unif[0,1] coordinates
  core::SmoothObjective expected{
      [mean, variance](const Vector& x) {
        return (x - *mean).squaredNorm() + variance;
      },
      [mean](const Vector& x) { return Vector(2.0 * (x - *mean)); }};
  return ExperimentStream(std::move(set), horizon, core::ObjectiveSense::MinimizeConvex,
                          factory, expected);
}

}  // namespace ofw::problems
