#include "nsgvd/theory.hpp"

#include "nsgvd/error.hpp"
#include "nsgvd/parallel.hpp"
#include "nsgvd/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>

namespace nsgvd {
namespace {

// Results of one block of trials. stats[k] holds one value per trial for the
// k-th quantity of interest; hits[k] counts trials where event k occurred.
struct BlockOut {
  std::array<std::vector<double>, 3> stats;
  std::array<std::uint64_t, 4> hits{};
  std::uint64_t attempts = 0;
};

template <class Fn>
BlockOut run_blocks(const TrialOptions& opt, std::string_view stream, Fn&& fn) {
  const std::uint64_t blocks = (opt.trials + kTheoryBlockSize - 1) / kTheoryBlockSize;
  std::vector<BlockOut> parts(blocks);
  parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t b) {
    Rng rng = Rng::derive(opt.seed, stream, b);
    const std::uint64_t first = b * kTheoryBlockSize;
    const std::uint64_t count = std::min(kTheoryBlockSize, opt.trials - first);
    fn(rng, count, parts[b]);
  });
  BlockOut total;
  for (auto& p : parts) {
    for (std::size_t k = 0; k < total.stats.size(); ++k) {
      total.stats[k].insert(total.stats[k].end(), p.stats[k].begin(), p.stats[k].end());
    }
    for (std::size_t k = 0; k < total.hits.size(); ++k) total.hits[k] += p.hits[k];
    total.attempts += p.attempts;
  }
  return total;
}

void require_trials(const TrialOptions& opt, std::uint64_t minimum = 1) {
  if (opt.trials < minimum) {
    throw ValidationError("check needs at least " + std::to_string(minimum) + " trials");
  }
}

void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
}

void require_dim(std::int64_t d) {
  if (d < 1) throw ValidationError("dimension d must be >= 1");
}

BoundCheckReport make_report(std::string name, std::uint64_t trials, std::uint64_t violations, double bound_rate,
                             std::vector<double> stat, bool keep) {
  BoundCheckReport r;
  r.name = std::move(name);
  r.trials = trials;
  r.violations = violations;
  r.bound_rate = bound_rate;
  r.statistic_mean = mean(stat);
  r.statistic_variance = sample_variance(stat);
  if (keep) r.samples = std::move(stat);
  r.finalize();
  return r;
}

double chi2_cdf(double d, double phi, double x) {
  if (x <= 0.0) return 0.0;
  if (phi == 0.0) return boost::math::cdf(boost::math::chi_squared_distribution<double>(d), x);
  return boost::math::cdf(boost::math::non_central_chi_squared_distribution<double>(d, phi), x);
}

/// Spec whose time-1 marginal is N(mu, sigma^2 I) with derivative sigma_dot.
GaussianProcessSpec point_spec(std::int64_t d, double sigma, double sigma_dot, const Vector& mu) {
  GaussianProcessSpec s;
  s.d = d;
  s.T = 1;
  s.mu = mu;
  s.schedule = SigmaSchedule::linear(sigma - sigma_dot, sigma_dot);
  s.validate();
  return s;
}

Vector draw_frame(Rng& rng, const Vector& mean, double sigma) {
  Vector x(mean.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = mean(i) + sigma * rng.normal();
  return x;
}

}  // namespace

double binomial_slack(double rate, std::uint64_t trials) {
  if (trials == 0) return 0.0;
  return 3.0 * std::sqrt(std::max(0.0, rate * (1.0 - rate)) / static_cast<double>(trials));
}

void BoundCheckReport::finalize() {
  empirical_rate = trials == 0 ? 0.0 : static_cast<double>(violations) / static_cast<double>(trials);
  slack = binomial_slack(bound_rate, trials);
  pass = empirical_rate <= bound_rate + slack;
}

nlohmann::json BoundCheckReport::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["trials"] = trials;
  j["violations"] = violations;
  j["empirical_rate"] = empirical_rate;
  j["bound_rate"] = bound_rate;
  j["slack"] = slack;
  j["pass"] = pass;
  j["statistic_mean"] = statistic_mean;
  j["statistic_variance"] = statistic_variance;
  if (!details.empty()) j["details"] = details;
  return j;
}

double sample_chi2(Rng& rng, std::int64_t d, double phi) {
  double s = 0.0;
  for (std::int64_t i = 0; i < d; ++i) {
    double z = rng.normal();
    if (i == 0) z += std::sqrt(phi);
    s += z * z;
  }
  return s;
}

// ---------------------------------------------------------------------------

nlohmann::json TailCheckReport::to_json() const {
  return {{"upper", upper.to_json()}, {"lower", lower.to_json()}, {"pass", pass()}};
}

TailCheckReport chi2_tail_check(std::int64_t d, double phi, double t, const TrialOptions& opt) {
  require_dim(d);
  require_trials(opt);
  if (!(phi >= 0.0)) throw ValidationError("noncentrality must be >= 0");
  if (!(t > 0.0)) throw ValidationError("tail parameter t must be > 0");
  const double center = static_cast<double>(d) + phi;
  const double spread = 2.0 * std::sqrt((static_cast<double>(d) + 2.0 * phi) * t);
  const double hi = center + spread + 2.0 * t;
  const double lo = center - spread;

  BlockOut out = run_blocks(opt, "theory.chi2_tail", [&](Rng& rng, std::uint64_t n, BlockOut& b) {
    b.stats[0].reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      const double x = sample_chi2(rng, d, phi);
      b.stats[0].push_back(x);
      if (x >= hi) ++b.hits[0];
      if (x <= lo) ++b.hits[1];
    }
  });
  const double rate = std::exp(-t);
  TailCheckReport r;
  r.upper = make_report("chi2_tail_upper", opt.trials, out.hits[0], rate, out.stats[0], false);
  r.lower = make_report("chi2_tail_lower", opt.trials, out.hits[1], rate, std::move(out.stats[0]), opt.keep_samples);
  const nlohmann::json params = {{"d", d}, {"phi", phi}, {"t", t}};
  r.upper.details = params;
  r.upper.details["threshold"] = hi;
  r.lower.details = params;
  r.lower.details["threshold"] = lo;
  return r;
}

double corollary_a2_threshold(std::int64_t d, double phi, double delta) {
  const double l = std::log(2.0 / delta);
  const double dd = static_cast<double>(d);
  return dd + phi + std::sqrt(4.0 * (dd + 2.0 * phi) * l) + 2.0 * l;
}

BoundCheckReport corollary_a2_check(std::int64_t d, double phi, double delta, const TrialOptions& opt) {
  require_dim(d);
  require_delta(delta);
  require_trials(opt);
  const double threshold = corollary_a2_threshold(d, phi, delta);
  BlockOut out = run_blocks(opt, "theory.corollary_a2", [&](Rng& rng, std::uint64_t n, BlockOut& b) {
    for (std::uint64_t i = 0; i < n; ++i) {
      const double x = sample_chi2(rng, d, phi);
      b.stats[0].push_back(x);
      if (std::abs(x) > threshold) ++b.hits[0];
    }
  });
  auto r = make_report("corollary_a2", opt.trials, out.hits[0], delta, std::move(out.stats[0]), opt.keep_samples);
  r.details = {{"d", d}, {"phi", phi}, {"delta", delta}, {"threshold", threshold}, {"coverage", 1.0 - r.empirical_rate}};
  return r;
}

// ---------------------------------------------------------------------------

nlohmann::json ComponentLawReport::to_json() const {
  return {{"name", "component_law"},
          {"trials", trials},
          {"constant_case", constant_case},
          {"ks_real", ks_real},
          {"ks_fake", ks_fake},
          {"ks_tolerance", ks_tolerance},
          {"phi", phi},
          {"fake_mean", fake_mean},
          {"expected_fake_mean", expected_fake_mean},
          {"mean_tolerance", mean_tolerance},
          {"pass", pass}};
}

ComponentLawReport nsg_component_law_check(const GaussianProcessSpec& fake, double t, double lambda_nsg,
                                           const TrialOptions& opt) {
  fake.validate();
  require_trials(opt);
  if (!(lambda_nsg > 0.0)) throw ValidationError("lambda must be > 0");
  GaussianProcessSpec real = fake;
  real.mu = Vector::Zero(fake.d);

  const double sigma = fake.schedule.sigma(t);
  const double rate = fake.schedule.sigma_dot(t) / sigma;
  const double d = static_cast<double>(fake.d);
  const Vector mu = fake.mean();

  ComponentLawReport r;
  r.trials = opt.trials;
  r.phi = fake.noncentrality(t);
  r.expected_fake_mean = d + r.phi;

  BlockOut out = run_blocks(opt, "theory.component_law", [&](Rng& rng, std::uint64_t n, BlockOut& b) {
    const Vector zero = Vector::Zero(fake.d);
    for (std::uint64_t i = 0; i < n; ++i) {
      const double dr = closed_form_denominator(draw_frame(rng, zero, sigma), real, t, lambda_nsg);
      const double df = closed_form_denominator(draw_frame(rng, mu, sigma), fake, t, lambda_nsg);
      if (rate == 0.0) {
        if (dr != lambda_nsg || df != lambda_nsg) ++b.hits[0];
        continue;
      }
      b.stats[0].push_back((lambda_nsg + d * rate - dr) / rate);
      b.stats[1].push_back((lambda_nsg + d * rate - df) / rate);
    }
  });

  if (rate == 0.0) {
    r.constant_case = true;
    r.pass = out.hits[0] == 0;
    return r;
  }
  r.fake_mean = mean(out.stats[1]);
  r.ks_real = ks_statistic(out.stats[0], [&](double x) { return chi2_cdf(d, 0.0, x); });
  r.ks_fake = ks_statistic(out.stats[1], [&](double x) { return chi2_cdf(d, r.phi, x); });
  r.pass = r.ks_real < r.ks_tolerance && r.ks_fake < r.ks_tolerance &&
           std::abs(r.fake_mean - r.expected_fake_mean) < r.mean_tolerance;
  if (opt.keep_samples) r.samples = std::move(out.stats[1]);
  return r;
}

// ---------------------------------------------------------------------------

double prop_a6_bound(std::int64_t d, double phi, double rate, double delta, bool with_rate_factor) {
  const double l = std::log(4.0 / delta);
  const double dd = static_cast<double>(d);
  const double core = phi + 2.0 * std::sqrt((dd + 2.0 * phi) * l) + 2.0 * std::sqrt(dd * l) + 2.0 * l;
  return with_rate_factor ? std::abs(rate) * core : core;
}

BoundCheckReport prop_a6_check(const GaussianProcessSpec& real, const GaussianProcessSpec& fake, double t,
                               double lambda_nsg, double delta, const TrialOptions& opt) {
  real.validate();
  fake.validate();
  require_delta(delta);
  require_trials(opt);
  if (!real.is_real()) throw ValidationError("the real-class spec must have mu = 0");
  if (real.d != fake.d) throw ValidationError("real and fake specs differ in dimension");
  const double sigma = fake.schedule.sigma(t);
  if (real.schedule.sigma(t) != sigma || real.schedule.sigma_dot(t) != fake.schedule.sigma_dot(t)) {
    throw ValidationError("real and fake specs must share sigma(t) and its derivative");
  }
  const double rate = fake.schedule.sigma_dot(t) / sigma;
  if (rate == 0.0) throw ValidationError("the denominator-difference check needs sigma' != 0");
  const double phi = fake.noncentrality(t);
  const double proof_bound = prop_a6_bound(fake.d, phi, rate, delta, true);
  const double stated_bound = prop_a6_bound(fake.d, phi, rate, delta, false);
  const Vector zero = Vector::Zero(fake.d);
  const Vector mu = fake.mean();

  BlockOut out = run_blocks(opt, "theory.prop_a6", [&](Rng& rng, std::uint64_t n, BlockOut& b) {
    for (std::uint64_t i = 0; i < n; ++i) {
      const double dr = closed_form_denominator(draw_frame(rng, zero, sigma), real, t, lambda_nsg);
      const double df = closed_form_denominator(draw_frame(rng, mu, sigma), fake, t, lambda_nsg);
      const double gap = std::abs(dr - df);
      b.stats[0].push_back(gap);
      if (gap > proof_bound) ++b.hits[0];
      if (gap > stated_bound) ++b.hits[1];
    }
  });
  auto r = make_report("prop_a6", opt.trials, out.hits[0], delta, std::move(out.stats[0]), opt.keep_samples);
  const double stated_rate = static_cast<double>(out.hits[1]) / static_cast<double>(opt.trials);
  r.details = {{"d", fake.d},
               {"phi", phi},
               {"rate", rate},
               {"delta", delta},
               {"bound_with_rate_factor", proof_bound},
               {"bound_without_rate_factor", stated_bound},
               {"violation_rate_without_rate_factor", stated_rate},
               {"pass_without_rate_factor", stated_rate <= delta + r.slack}};
  return r;
}

nlohmann::json NormCheckReport::to_json() const {
  return {{"real_norm", real_norm.to_json()},
          {"fake_norm", fake_norm.to_json()},
          {"difference", difference.to_json()},
          {"pass", pass()}};
}

NormCheckReport prop_a7_check(std::int64_t d, double phi, double delta, const TrialOptions& opt) {
  require_dim(d);
  require_delta(delta);
  require_trials(opt);
  if (!(phi >= 0.0)) throw ValidationError("noncentrality must be >= 0");
  const double dd = static_cast<double>(d);
  const double l = std::log(2.0 / delta);
  const double bound_x = dd + std::sqrt(4.0 * dd * l) + 2.0 * l;
  const double bound_y = dd + phi + std::sqrt(4.0 * (dd + 2.0 * phi) * l) + 2.0 * l;
  const double bound_xy = dd + phi / 2.0 + std::sqrt(4.0 * (dd + phi) * l) + 2.0 * l;

  // Unit sigma; every statistic is scale free. The shift sits on coordinate 0.
  BlockOut out = run_blocks(opt, "theory.prop_a7", [&](Rng& rng, std::uint64_t n, BlockOut& b) {
    const double shift = std::sqrt(phi);
    for (std::uint64_t i = 0; i < n; ++i) {
      double nx = 0.0;
      double ny = 0.0;
      double nxy = 0.0;
      for (std::int64_t k = 0; k < d; ++k) {
        const double x = rng.normal();
        const double y = (k == 0 ? shift : 0.0) + rng.normal();
        nx += x * x;
        ny += y * y;
        nxy += (x - y) * (x - y);
      }
      nxy /= 2.0;
      b.stats[0].push_back(nx);
      b.stats[1].push_back(ny);
      b.stats[2].push_back(nxy);
      if (nx > bound_x) ++b.hits[0];
      if (ny > bound_y) ++b.hits[1];
      if (nxy > bound_xy) ++b.hits[2];
    }
  });
  NormCheckReport r;
  r.real_norm = make_report("prop_a7_real_norm", opt.trials, out.hits[0], delta, std::move(out.stats[0]), opt.keep_samples);
  r.fake_norm = make_report("prop_a7_fake_norm", opt.trials, out.hits[1], delta, std::move(out.stats[1]), opt.keep_samples);
  r.difference =
      make_report("prop_a7_difference", opt.trials, out.hits[2], delta, std::move(out.stats[2]), opt.keep_samples);
  r.real_norm.details = {{"bound", bound_x}, {"d", d}, {"delta", delta}};
  r.fake_norm.details = {{"bound", bound_y}, {"d", d}, {"phi", phi}, {"delta", delta}};
  r.difference.details = {{"bound", bound_xy}, {"d", d}, {"phi", phi}, {"delta", delta}};
  return r;
}

// ---------------------------------------------------------------------------

nlohmann::json FeasibleConstants::to_json() const {
  return {{"case", sign_case},
          {"rate", rate},
          {"phi", phi},
          {"lambda", lambda_nsg},
          {"stated_c", stated_c},
          {"stated_lambda_floor", stated_lambda_floor},
          {"corrected_c", corrected_c},
          {"corrected_lambda_floor", corrected_lambda_floor}};
}

FeasibleConstants prop_a8_constants(double sigma, double sigma_dot, std::int64_t d, double phi, double lambda_nsg,
                                    double delta) {
  require_dim(d);
  require_delta(delta);
  if (!(sigma > 0.0)) throw ValidationError("sigma must be > 0");
  if (sigma_dot == 0.0) throw ValidationError("feasible constants need sigma' != 0");
  FeasibleConstants c;
  c.rate = sigma_dot / sigma;
  c.phi = phi;
  c.lambda_nsg = lambda_nsg;
  const double r = c.rate;
  const double dd = static_cast<double>(d);
  const double l = std::log(2.0 / delta);
  const double sd = std::sqrt(dd * l);
  const double sf = std::sqrt((dd + 2.0 * phi) * l);
  if (r > 0.0) {
    c.sign_case = 1;
    c.stated_c = lambda_nsg - r * phi + 2.0 * r * sd + 2.0 * r * l;
    c.stated_lambda_floor = r * (dd + phi) - 2.0 * r * sd - 2.0 * r * l;
    // D = lambda - r (W - d); the upper tails of both norms bound D from below.
    const double worst = std::max(2.0 * sd + 2.0 * l, phi + 2.0 * sf + 2.0 * l);
    c.corrected_c = lambda_nsg - r * worst;
    c.corrected_lambda_floor = r * worst;
  } else {
    c.sign_case = 2;
    c.stated_c = lambda_nsg - 2.0 * r * sd;
    c.stated_lambda_floor = 2.0 * r * sd;
    // D = lambda + |r| (W - d); the lower tails bound D from below.
    const double a = -r;
    const double worst = std::min(-2.0 * sd, phi - 2.0 * sf);
    c.corrected_c = lambda_nsg + a * worst;
    c.corrected_lambda_floor = -a * worst;
  }
  return c;
}

BoundCheckReport prop_a8_check(double sigma, double sigma_dot, std::int64_t d, const Vector& mu, double lambda_nsg,
                               double delta, const TrialOptions& opt) {
  require_trials(opt);
  if (mu.size() != d) throw ValidationError("mu has the wrong dimension");
  const double phi = mu.squaredNorm() / (sigma * sigma);
  const FeasibleConstants c = prop_a8_constants(sigma, sigma_dot, d, phi, lambda_nsg, delta);
  if (!(lambda_nsg > c.corrected_lambda_floor)) {
    throw AdmissibilityError("lambda = " + std::to_string(lambda_nsg) + " is not above the floor " +
                             std::to_string(c.corrected_lambda_floor));
  }
  const GaussianProcessSpec fake = point_spec(d, sigma, sigma_dot, mu);
  GaussianProcessSpec real = fake;
  real.mu = Vector::Zero(d);
  const Vector zero = Vector::Zero(d);

  BlockOut out = run_blocks(opt, "theory.prop_a8", [&](Rng& rng, std::uint64_t n, BlockOut& b) {
    for (std::uint64_t i = 0; i < n; ++i) {
      const double dr = closed_form_denominator(draw_frame(rng, zero, sigma), real, 1.0, lambda_nsg);
      const double df = closed_form_denominator(draw_frame(rng, mu, sigma), fake, 1.0, lambda_nsg);
      const double lowest = std::min(dr, df);
      b.stats[0].push_back(lowest);
      if (!(lowest > c.corrected_c)) ++b.hits[0];
      if (!(lowest > c.stated_c)) ++b.hits[1];
    }
  });
  auto r = make_report("prop_a8", opt.trials, out.hits[0], delta, std::move(out.stats[0]), opt.keep_samples);
  const double stated_rate = static_cast<double>(out.hits[1]) / static_cast<double>(opt.trials);
  r.details = c.to_json();
  r.details["delta"] = delta;
  r.details["d"] = d;
  r.details["violation_rate_stated_c"] = stated_rate;
  r.details["pass_stated_c"] = stated_rate <= delta + r.slack;
  return r;
}

// ---------------------------------------------------------------------------

double TheoremBoundInputs::phi() const {
  if (mu.size() == 0) return 0.0;
  return mu.squaredNorm() / (sigma * sigma);
}

void TheoremBoundInputs::validate() const {
  require_dim(d);
  require_delta(delta);
  if (T < 1) throw ValidationError("T must be >= 1");
  if (!(sigma > 0.0)) throw ValidationError("sigma must be > 0");
  if (mu.size() != 0 && mu.size() != d) throw ValidationError("mu has the wrong dimension");
  if (!(lambda_nsg > 0.0)) throw ValidationError("lambda must be > 0");
  if (!std::isfinite(sigma_dot)) throw ValidationError("sigma' must be finite");
}

double compute_theorem1_bound(double phi, std::int64_t d, std::int64_t T, double C, double sigma, double delta) {
  // Pure formula: any delta > 0 evaluates; the checks themselves require delta < 1.
  if (!(delta > 0.0)) throw ValidationError("delta must be > 0");
  if (!(C > 0.0) || !(sigma > 0.0)) throw ValidationError("C and sigma must be > 0");
  const double dd = static_cast<double>(d);
  const double tt = static_cast<double>(T);
  const double l = std::log(12.0 * tt / delta);
  const double inner =
      10.0 * phi * dd + 4.0 * dd * dd + 2.0 * dd + phi + l * (17.0 * phi + 14.0 * dd + 4.0) + 9.0 * l * l;
  return 2.0 * tt / (std::pow(C, 4) * sigma * sigma) * inner;
}

double admissible_c(const TheoremBoundInputs& in) {
  in.validate();
  double best = in.lambda_nsg;  // sigma' = 0: D is exactly lambda
  double floor = 0.0;
  if (in.sigma_dot != 0.0) {
    const FeasibleConstants c = prop_a8_constants(in.sigma, in.sigma_dot, in.d, in.phi(), in.lambda_nsg, in.delta);
    best = c.corrected_c;
    floor = c.corrected_lambda_floor;
  }
  if (!(in.lambda_nsg > floor)) {
    throw AdmissibilityError("lambda = " + std::to_string(in.lambda_nsg) + " is not above the admissible floor " +
                             std::to_string(floor));
  }
  const double C = in.C.value_or(best);
  if (!(C > 0.0)) throw AdmissibilityError("C must be > 0");
  if (C > best) {
    throw AdmissibilityError("C = " + std::to_string(C) + " exceeds the admissible constant " + std::to_string(best));
  }
  return C;
}

BoundCheckReport theorem1_violation_check(const TheoremBoundInputs& in, const TrialOptions& opt) {
  const double C = admissible_c(in);
  require_trials(opt);
  const double phi = in.phi();
  const double bound = compute_theorem1_bound(phi, in.d, in.T, C, in.sigma, in.delta);
  const Vector mu = in.mu.size() == 0 ? Vector::Zero(in.d) : in.mu;
  const GaussianProcessSpec fake = point_spec(in.d, in.sigma, in.sigma_dot, mu);
  GaussianProcessSpec real = fake;
  real.mu = Vector::Zero(in.d);
  const Vector zero = Vector::Zero(in.d);
  constexpr std::uint64_t kMaxAttemptsPerTrial = 1000;

  BlockOut out = run_blocks(opt, "theory.theorem1", [&](Rng& rng, std::uint64_t n, BlockOut& b) {
    std::uint64_t accepted = 0;
    while (accepted < n) {
      if (b.attempts >= n * kMaxAttemptsPerTrial) {
        throw DegenerateError("denominator conditioning accepts almost no trials; C is too large");
      }
      ++b.attempts;
      double dist = 0.0;
      bool ok = true;
      for (std::int64_t f = 0; f < in.T && ok; ++f) {
        const Vector x = draw_frame(rng, zero, in.sigma);
        const Vector y = draw_frame(rng, mu, in.sigma);
        const double dr = closed_form_denominator(x, real, 1.0, in.lambda_nsg);
        const double df = closed_form_denominator(y, fake, 1.0, in.lambda_nsg);
        if (std::abs(dr) < C || std::abs(df) < C) {
          ok = false;
          break;
        }
        const Vector gx = closed_form_nsg(x, real, 1.0, in.lambda_nsg, C);
        const Vector gy = closed_form_nsg(y, fake, 1.0, in.lambda_nsg, C);
        dist += (gx - gy).squaredNorm();
      }
      if (!ok) continue;
      ++accepted;
      b.stats[0].push_back(dist);
      if (dist > bound) ++b.hits[0];
    }
  });
  auto r = make_report("theorem1", opt.trials, out.hits[0], in.delta, std::move(out.stats[0]), opt.keep_samples);
  r.details = {{"d", in.d},
               {"T", in.T},
               {"phi", phi},
               {"sigma", in.sigma},
               {"sigma_dot", in.sigma_dot},
               {"lambda", in.lambda_nsg},
               {"delta", in.delta},
               {"C", C},
               {"bound", bound},
               {"acceptance_rate", static_cast<double>(opt.trials) / static_cast<double>(out.attempts)}};
  return r;
}

}  // namespace nsgvd
