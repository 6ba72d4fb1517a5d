#include "qfound/mitigation.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "qfound/noise.hpp"
#include "qfound/rng.hpp"

namespace qfound {

namespace {

constexpr double kStochasticTol = 1e-9;
constexpr double kSolverTol = 1e-10;

// Minimizes ||M x - p||^2 over the probability simplex with a primal
// active-set method. `fixed[j]` marks x_j pinned at zero.
Eigen::VectorXd simplex_least_squares(const Eigen::MatrixXd& m, const Eigen::VectorXd& p) {
  const Eigen::Index d = m.cols();
  const Eigen::MatrixXd q = m.transpose() * m;
  const Eigen::VectorXd c = m.transpose() * p;

  Eigen::VectorXd x = Eigen::VectorXd::Constant(d, 1.0 / static_cast<double>(d));
  std::vector<bool> fixed(static_cast<std::size_t>(d), false);

  for (int iter = 0; iter < 100 * static_cast<int>(d) + 100; ++iter) {
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (!fixed[static_cast<std::size_t>(i)]) free.push_back(i);
    }
    const auto nf = static_cast<Eigen::Index>(free.size());

    // KKT system of the equality-constrained subproblem on the free set:
    // Q_FF x_F - lambda 1 = c_F, 1^T x_F = 1.
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nf + 1, nf + 1);
    Eigen::VectorXd rhs(nf + 1);
    for (Eigen::Index a = 0; a < nf; ++a) {
      for (Eigen::Index b = 0; b < nf; ++b) kkt(a, b) = q(free[a], free[b]);
      kkt(a, nf) = -1.0;
      kkt(nf, a) = 1.0;
      rhs(a) = c(free[a]);
    }
    rhs(nf) = 1.0;
    const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    const double lambda = sol(nf);

    Eigen::VectorXd z = Eigen::VectorXd::Zero(d);
    for (Eigen::Index a = 0; a < nf; ++a) z(free[a]) = sol(a);

    bool feasible = true;
    for (Eigen::Index a = 0; a < nf; ++a) {
      if (sol(a) < -kSolverTol) feasible = false;
    }

    if (feasible) {
      x = z.cwiseMax(0.0);
      const Eigen::VectorXd grad = q * x - c;
      Eigen::Index worst = -1;
      double worst_mu = -kSolverTol;
      for (Eigen::Index j = 0; j < d; ++j) {
        if (!fixed[static_cast<std::size_t>(j)]) continue;
        const double mu = grad(j) - lambda;
        if (mu < worst_mu) {
          worst_mu = mu;
          worst = j;
        }
      }
      if (worst < 0) return x;
      fixed[static_cast<std::size_t>(worst)] = false;
      continue;
    }

    // Step toward z until the first free coordinate hits zero.
    const Eigen::VectorXd dir = z - x;
    double alpha = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index a = 0; a < nf; ++a) {
      const Eigen::Index i = free[a];
      if (dir(i) < 0.0) {
        const double step = x(i) / -dir(i);
        if (step < alpha) {
          alpha = step;
          blocking = i;
        }
      }
    }
    x += alpha * dir;
    if (blocking >= 0) {
      x(blocking) = 0.0;
      fixed[static_cast<std::size_t>(blocking)] = true;
    }
  }
  throw std::runtime_error("constrained least squares did not converge");
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(int num_qubits, Eigen::MatrixXd entries) : n_(num_qubits), m_(std::move(entries)) {
  if (n_ < 1 || n_ > kMaxMitigationQubits)
    throw std::invalid_argument("confusion matrix supports 1 to " + std::to_string(kMaxMitigationQubits) + " qubits");
  const Eigen::Index dim = Eigen::Index{1} << n_;
  if (m_.rows() != dim || m_.cols() != dim) throw std::invalid_argument("confusion matrix must be 2^n x 2^n");
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double v = m_(i, j);
      if (!std::isfinite(v) || v < -kStochasticTol || v > 1.0 + kStochasticTol)
        throw std::invalid_argument("confusion matrix entries must lie in [0, 1]");
    }
    if (std::abs(m_.col(j).sum() - 1.0) > kStochasticTol)
      throw std::invalid_argument("confusion matrix columns must sum to 1");
  }
}

double ConfusionMatrix::condition_number() const {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m_);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

Distribution ConfusionMatrix::apply(const Distribution& truth) const {
  if (truth.num_bits != n_) throw std::invalid_argument("distribution width does not match confusion matrix");
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(truth.p.data(), static_cast<Eigen::Index>(truth.p.size()));
  const Eigen::VectorXd y = m_ * x;
  Distribution out;
  out.num_bits = n_;
  out.p.assign(y.data(), y.data() + y.size());
  return out;
}

IllConditionedError::IllConditionedError(double cond)
    : std::runtime_error("confusion matrix is ill-conditioned (condition number " + std::to_string(cond) + ")"),
      cond_(cond) {}

ConfusionMatrix build_confusion_matrix(const DeviceModel& device, int num_qubits, std::int64_t shots,
                                       std::uint64_t seed) {
  if (num_qubits < 1 || num_qubits > kMaxMitigationQubits)
    throw std::invalid_argument("confusion matrix supports 1 to " + std::to_string(kMaxMitigationQubits) + " qubits");
  if (num_qubits > device.num_qubits) throw std::invalid_argument("device has fewer qubits than requested");
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");

  DeviceModel readout_only = device;
  readout_only.single_qubit_error = 0.0;
  readout_only.cnot_error = 0.0;

  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    Circuit prep(num_qubits, num_qubits, "calibration");
    const std::string bits = bitstring(static_cast<std::uint64_t>(b), num_qubits);
    for (int q = 0; q < num_qubits; ++q) {
      if (bits[static_cast<std::size_t>(q)] == '1') prep.x(q);
    }
    prep.measure_all();
    const auto counts =
        simulate_noisy(prep, readout_only, shots, splitmix64_mix(seed + static_cast<std::uint64_t>(b)));
    for (const auto& [key, n] : counts.counts) {
      m(static_cast<Eigen::Index>(index_of(key)), b) = static_cast<double>(n) / static_cast<double>(shots);
    }
  }
  return ConfusionMatrix(num_qubits, std::move(m));
}

ConfusionMatrix exact_confusion_matrix(const std::vector<ReadoutError>& per_qubit) {
  const int n = static_cast<int>(per_qubit.size());
  if (n < 1 || n > kMaxMitigationQubits)
    throw std::invalid_argument("confusion matrix supports 1 to " + std::to_string(kMaxMitigationQubits) + " qubits");
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(1, 1);
  for (const auto& ro : per_qubit) {
    Eigen::Matrix2d single;
    single << 1.0 - ro.p01, ro.p10, ro.p01, 1.0 - ro.p10;
    Eigen::MatrixXd next(m.rows() * 2, m.cols() * 2);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = m(i, j) * single;
    }
    m = std::move(next);
  }
  return ConfusionMatrix(n, std::move(m));
}

Distribution mitigate(const Distribution& measured, const ConfusionMatrix& m) {
  if (measured.num_bits != m.num_qubits())
    throw std::invalid_argument("distribution width does not match confusion matrix");
  const double cond = m.condition_number();
  if (!(cond <= kMaxConditionNumber)) throw IllConditionedError(cond);

  const Eigen::VectorXd p =
      Eigen::Map<const Eigen::VectorXd>(measured.p.data(), static_cast<Eigen::Index>(measured.p.size()));
  Eigen::VectorXd x = simplex_least_squares(m.entries(), p);
  x = x.cwiseMax(0.0);
  x /= x.sum();

  Distribution out;
  out.num_bits = measured.num_bits;
  out.p.assign(x.data(), x.data() + x.size());
  return out;
}

Distribution mitigate(const CountsHistogram& counts, const ConfusionMatrix& m) {
  if (counts.num_bits() != m.num_qubits())
    throw std::invalid_argument("count keys do not match confusion matrix width");
  return mitigate(counts.to_distribution(), m);
}

std::string to_json(const ConfusionMatrix& m) {
  nlohmann::ordered_json doc;
  doc["num_qubits"] = m.num_qubits();
  auto rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < m.entries().rows(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index j = 0; j < m.entries().cols(); ++j) row.push_back(m.entries()(i, j));
    rows.push_back(row);
  }
  doc["matrix"] = rows;
  return doc.dump(2) + "\n";
}

ConfusionMatrix confusion_from_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    const int n = doc.at("num_qubits").get<int>();
    if (n < 1 || n > kMaxMitigationQubits) throw std::invalid_argument("confusion matrix num_qubits out of range");
    const auto& rows = doc.at("matrix");
    const Eigen::Index dim = Eigen::Index{1} << n;
    if (static_cast<Eigen::Index>(rows.size()) != dim) throw std::invalid_argument("confusion matrix row count mismatch");
    Eigen::MatrixXd m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const auto& row = rows.at(static_cast<std::size_t>(i));
      if (static_cast<Eigen::Index>(row.size()) != dim)
        throw std::invalid_argument("confusion matrix column count mismatch");
      for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
    }
    return ConfusionMatrix(n, std::move(m));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed confusion matrix document: ") + e.what());
  }
}

}  // namespace qfound
