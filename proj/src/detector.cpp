#include "nsgvd/detector.hpp"

#include "nsgvd/error.hpp"
#include "nsgvd/parallel.hpp"
#include "nsgvd/stats.hpp"

#include <cmath>
#include <exception>

namespace nsgvd {

std::string to_string(Decision d) { return d == Decision::kFake ? "fake" : "real"; }

DetectorState::DetectorState(std::vector<NsgFeature> reference, KernelParams params, double tau)
    : reference_(std::move(reference)), params_(std::move(params)), tau_(tau), cache_(reference_, params_) {
  if (!std::isfinite(tau_)) throw ValidationError("detector tau must be finite");
}

DetectionResult detect_one(const NsgFeature& test, const DetectorState& state) {
  DetectionResult r;
  r.q = state.cache().statistic(test, state.params());
  r.decision = r.q > state.tau() ? Decision::kFake : Decision::kReal;
  r.flagged_frames = test.flagged_count();
  return r;
}

std::vector<DetectionResult> detect_batch(std::span<const NsgFeature> tests, const DetectorState& state) {
  std::vector<DetectionResult> out(tests.size());
  std::vector<std::exception_ptr> errors(tests.size());
  parallel_for(tests.size(), [&](std::size_t i) {
    try {
      out[i] = detect_one(tests[i], state);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const DataError& e) {
      throw DataError("test video " + std::to_string(i) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("test video " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

double auroc(std::span<const double> q, const std::vector<bool>& is_fake) {
  if (q.size() != is_fake.size()) throw ValidationError("scores and labels differ in length");
  std::vector<double> fake;
  std::vector<double> real;
  for (std::size_t i = 0; i < q.size(); ++i) (is_fake[i] ? fake : real).push_back(q[i]);
  if (fake.empty() || real.empty()) throw ValidationError("AUROC is undefined without both classes");
  return mann_whitney(fake, real).auc;
}

MetricsReport compute_metrics(std::span<const double> q, const std::vector<bool>& is_fake, double tau) {
  if (q.size() != is_fake.size()) throw ValidationError("scores and labels differ in length");
  MetricsReport m;
  m.tau = tau;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const bool predicted_fake = q[i] > tau;
    if (is_fake[i]) {
      predicted_fake ? ++m.tp : ++m.fn;
    } else {
      predicted_fake ? ++m.fp : ++m.tn;
    }
  }
  const auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  m.precision = ratio(m.tp, m.tp + m.fp);
  m.recall = ratio(m.tp, m.tp + m.fn);
  m.accuracy = ratio(m.tp + m.tn, q.size());
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  try {
    m.auroc = auroc(q, is_fake);
  } catch (const ValidationError& e) {
    m.auroc_error = e.what();
  }
  return m;
}

std::vector<MetricsReport> threshold_sweep(std::span<const double> q, const std::vector<bool>& is_fake,
                                           std::span<const double> taus) {
  if (q.empty()) throw ValidationError("threshold sweep needs at least one score");
  std::vector<MetricsReport> out;
  out.reserve(taus.size());
  for (double tau : taus) out.push_back(compute_metrics(q, is_fake, tau));
  return out;
}

}  // namespace nsgvd
