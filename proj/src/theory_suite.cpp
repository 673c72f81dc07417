#include "nsgvd/theory_suite.hpp"

#include "nsgvd/error.hpp"
#include "nsgvd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nsgvd {
namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void keep(TheorySuiteResult& res, const std::string& check, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) res.samples.push_back({check, i, values[i]});
}

}  // namespace

const std::vector<std::string>& theory_check_names() {
  static const std::vector<std::string> names = {"chi2_tail", "corollary_a2", "component_law", "prop_a6",
                                                 "prop_a7",   "prop_a8",      "theorem1"};
  return names;
}

Vector shift_for_phi(std::int64_t d, double phi, double sigma) {
  Vector mu = Vector::Zero(d);
  if (d > 0) mu(0) = std::sqrt(phi) * sigma;
  return mu;
}

TheorySuiteResult run_theory_suite(const TheorySuiteConfig& cfg) {
  const auto& known = theory_check_names();
  for (const auto& c : cfg.checks) {
    if (std::find(known.begin(), known.end(), c) == known.end()) {
      throw ValidationError("unknown theory check '" + c + "'");
    }
  }
  const auto selected = [&](const std::string& name) {
    return std::find(cfg.checks.begin(), cfg.checks.end(), name) != cfg.checks.end();
  };
  TheorySuiteResult res;
  TrialOptions opt{cfg.trials, cfg.seed, cfg.keep_samples};

  if (selected("chi2_tail")) {
    nlohmann::json runs = nlohmann::json::array();
    for (long long d : cfg.chi2_d) {
      for (double phi : cfg.chi2_phi) {
        for (double t : cfg.chi2_t) {
          const auto r = chi2_tail_check(d, phi, t, opt);
          runs.push_back(r.to_json());
          res.pass = res.pass && r.pass();
          if (cfg.keep_samples) {
            keep(res, "chi2_tail[d=" + std::to_string(d) + ",phi=" + fmt(phi) + ",t=" + fmt(t) + "]", r.lower.samples);
          }
        }
      }
    }
    res.bundle["chi2_tail"] = runs;
  }

  if (selected("corollary_a2")) {
    const auto r = corollary_a2_check(cfg.corollary_d, cfg.corollary_phi, cfg.corollary_delta, opt);
    res.bundle["corollary_a2"] = r.to_json();
    res.pass = res.pass && r.pass;
    keep(res, "corollary_a2", r.samples);
  }

  if (selected("component_law")) {
    GaussianProcessSpec spec;
    spec.d = cfg.component_d;
    spec.T = static_cast<Eigen::Index>(std::max(1.0, std::ceil(cfg.component_t)));
    spec.schedule = SigmaSchedule::linear(cfg.component_sigma_a, cfg.component_sigma_b);
    spec.mu = shift_for_phi(spec.d, cfg.component_phi, spec.schedule.sigma(cfg.component_t));
    const auto r = nsg_component_law_check(spec, cfg.component_t, cfg.component_lambda, opt);
    res.bundle["component_law"] = r.to_json();
    res.pass = res.pass && r.pass;
    keep(res, "component_law", r.samples);
  }

  if (selected("prop_a6")) {
    GaussianProcessSpec fake;
    fake.d = cfg.a6_d;
    fake.T = 1;
    fake.schedule = SigmaSchedule::linear(cfg.a6_sigma - cfg.a6_sigma_dot, cfg.a6_sigma_dot);
    fake.mu = shift_for_phi(fake.d, cfg.a6_phi, cfg.a6_sigma);
    GaussianProcessSpec real = fake;
    real.mu = Vector::Zero(fake.d);
    const auto r = prop_a6_check(real, fake, 1.0, cfg.a6_lambda, cfg.a6_delta, opt);
    res.bundle["prop_a6"] = r.to_json();
    res.pass = res.pass && r.pass;
    keep(res, "prop_a6", r.samples);
  }

  if (selected("prop_a7")) {
    const auto r = prop_a7_check(cfg.a7_d, cfg.a7_phi, cfg.a7_delta, opt);
    res.bundle["prop_a7"] = r.to_json();
    res.pass = res.pass && r.pass();
    keep(res, "prop_a7_real_norm", r.real_norm.samples);
    keep(res, "prop_a7_fake_norm", r.fake_norm.samples);
    keep(res, "prop_a7_difference", r.difference.samples);
  }

  if (selected("prop_a8")) {
    nlohmann::json runs = nlohmann::json::array();
    for (double sd : cfg.a8_sigma_dot) {
      const Vector mu = shift_for_phi(cfg.a8_d, cfg.a8_phi, cfg.a8_sigma);
      const auto r = prop_a8_check(cfg.a8_sigma, sd, cfg.a8_d, mu, cfg.a8_lambda, cfg.a8_delta, opt);
      runs.push_back(r.to_json());
      res.pass = res.pass && r.pass;
      keep(res, "prop_a8[sigma_dot=" + fmt(sd) + "]", r.samples);
    }
    res.bundle["prop_a8"] = runs;
  }

  if (selected("theorem1") && !cfg.theorem_phi.empty()) {
    TheoremBoundInputs in;
    in.d = cfg.theorem_d;
    in.T = cfg.theorem_T;
    in.sigma = cfg.theorem_sigma;
    in.sigma_dot = cfg.theorem_sigma_dot;
    in.lambda_nsg = cfg.theorem_lambda;
    in.delta = cfg.theorem_delta;
    // One C for every phi so the runs condition on the same event.
    in.mu = shift_for_phi(in.d, *std::max_element(cfg.theorem_phi.begin(), cfg.theorem_phi.end()), in.sigma);
    in.C = cfg.theorem_c;
    const double common_c = admissible_c(in);

    TrialOptions topt{cfg.theorem_trials, cfg.seed, cfg.keep_samples};
    nlohmann::json runs = nlohmann::json::array();
    std::vector<BoundCheckReport> reports;
    for (double phi : cfg.theorem_phi) {
      in.mu = shift_for_phi(in.d, phi, in.sigma);
      in.C = common_c;
      auto r = theorem1_violation_check(in, topt);
      runs.push_back(r.to_json());
      res.pass = res.pass && r.pass;
      keep(res, "theorem1[phi=" + fmt(phi) + "]", r.samples);
      reports.push_back(std::move(r));
    }
    res.bundle["theorem1"] = runs;

    // Mean squared NSG distance must grow with the shift.
    std::vector<std::size_t> order(reports.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return cfg.theorem_phi[a] < cfg.theorem_phi[b]; });
    nlohmann::json ordering = nlohmann::json::array();
    for (std::size_t k = 1; k < order.size(); ++k) {
      const auto& lo = reports[order[k - 1]];
      const auto& hi = reports[order[k]];
      const double n_lo = static_cast<double>(lo.trials);
      const double n_hi = static_cast<double>(hi.trials);
      const double p = welch_z_greater(hi.statistic_mean, hi.statistic_variance, n_hi, lo.statistic_mean,
                                       lo.statistic_variance, n_lo);
      const bool ok = hi.statistic_mean > lo.statistic_mean && p < cfg.ordering_alpha;
      ordering.push_back({{"phi_low", cfg.theorem_phi[order[k - 1]]},
                          {"phi_high", cfg.theorem_phi[order[k]]},
                          {"mean_low", lo.statistic_mean},
                          {"mean_high", hi.statistic_mean},
                          {"p_value", p},
                          {"alpha", cfg.ordering_alpha},
                          {"pass", ok}});
      res.pass = res.pass && ok;
    }
    res.bundle["theorem1_ordering"] = ordering;
  }

  if (!cfg.checks.empty()) res.bundle["pass"] = res.pass;
  return res;
}

void write_samples_csv(std::ostream& out, const std::vector<TheorySuiteResult::Sample>& samples) {
  out << "check,trial,value\n";
  out.precision(17);
  for (const auto& s : samples) out << '"' << s.check << "\"," << s.trial << ',' << s.value << '\n';
}

}  // namespace nsgvd
