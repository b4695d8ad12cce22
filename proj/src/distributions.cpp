#include "penbench/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "penbench/errors.hpp"
#include "penbench/spec_parser.hpp"

namespace penbench {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("quantile level alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
}

std::string format_number(double value) {
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

}  // namespace

// --- Exponential -------------------------------------------------------------

Exponential::Exponential(double rate) : rate_(rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw ValidationError("exponential rate must be > 0");
}

double Exponential::sample(Rng& rng) const { return -std::log(rng.uniform_open_closed()) / rate_; }

double Exponential::upper_quantile(double alpha) const {
  check_alpha(alpha);
  if (alpha == 1.0) return 0.0;
  return -std::log(alpha) / rate_;
}

double Exponential::survival(double x) const { return x < 0.0 ? 1.0 : std::exp(-rate_ * x); }

std::string Exponential::describe() const { return "exp(" + format_number(rate_) + ")"; }

// --- TruncatedExponential ----------------------------------------------------

TruncatedExponential::TruncatedExponential(double cap) : cap_(cap) {
  if (!(cap > 0.0) || !std::isfinite(cap)) throw ValidationError("truncation cap must be > 0");
}

double TruncatedExponential::sample(Rng& rng) const {
  return std::min(-std::log(rng.uniform_open_closed()), cap_);
}

double TruncatedExponential::upper_quantile(double alpha) const {
  check_alpha(alpha);
  if (alpha == 1.0) return 0.0;
  return std::min(-std::log(alpha), cap_);
}

double TruncatedExponential::survival(double x) const {
  if (x < 0.0) return 1.0;
  if (x >= cap_) return 0.0;
  return std::exp(-x);
}

std::optional<double> TruncatedExponential::mean() const { return -std::expm1(-cap_); }

std::string TruncatedExponential::describe() const {
  return "truncexp(" + format_number(cap_) + ")";
}

// --- UniformInterval ---------------------------------------------------------

UniformInterval::UniformInterval(double low, double high) : low_(low), high_(high) {
  if (!(low >= 0.0) || !(low < high) || !std::isfinite(high)) {
    throw ValidationError("uniform(a, b) needs 0 <= a < b");
  }
}

double UniformInterval::sample(Rng& rng) const { return low_ + (high_ - low_) * rng.uniform(); }

double UniformInterval::upper_quantile(double alpha) const {
  check_alpha(alpha);
  if (alpha == 1.0) return 0.0;
  return high_ - alpha * (high_ - low_);
}

double UniformInterval::survival(double x) const {
  if (x < low_) return 1.0;
  if (x >= high_) return 0.0;
  return (high_ - x) / (high_ - low_);
}

std::string UniformInterval::describe() const {
  return "uniform(" + format_number(low_) + "," + format_number(high_) + ")";
}

// --- DiscreteWeighted --------------------------------------------------------

DiscreteWeighted::DiscreteWeighted(std::vector<double> values, std::vector<double> weights) {
  if (values.empty() || values.size() != weights.size()) {
    throw ValidationError("discrete law needs matching, nonempty value and weight lists");
  }
  std::map<double, double> merged;
  double total = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!(values[j] >= 0.0) || !std::isfinite(values[j])) {
      throw ValidationError("discrete values must be finite and nonnegative");
    }
    if (!(weights[j] > 0.0) || !std::isfinite(weights[j])) {
      throw ValidationError("discrete weights must be positive");
    }
    merged[values[j]] += weights[j];
    total += weights[j];
  }
  double running = 0.0;
  for (const auto& [value, weight] : merged) {
    values_.push_back(value);
    probs_.push_back(weight / total);
    running += weight / total;
    cumulative_.push_back(running);
    mean_ += value * weight / total;
  }
  cumulative_.back() = 1.0;
}

double DiscreteWeighted::sample(Rng& rng) const {
  double u = rng.uniform();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  auto j = static_cast<std::size_t>(it - cumulative_.begin());
  return values_[std::min(j, values_.size() - 1)];
}

double DiscreteWeighted::survival(double x) const {
  // Summing the upper tail directly keeps tiny tails exact.
  double tail = 0.0;
  for (std::size_t j = values_.size(); j-- > 0 && values_[j] > x;) tail += probs_[j];
  return tail;
}

double DiscreteWeighted::upper_quantile(double alpha) const {
  check_alpha(alpha);
  if (survival(0.0) <= alpha) return 0.0;
  // Walk atoms downward accumulating the tail strictly above each atom.
  double tail = 0.0;
  std::size_t answer = values_.size() - 1;
  for (std::size_t j = values_.size(); j-- > 0;) {
    if (tail <= alpha) answer = j;
    else break;
    tail += probs_[j];
  }
  return values_[answer];
}

std::vector<std::pair<double, double>> DiscreteWeighted::atoms() const {
  std::vector<std::pair<double, double>> out;
  for (std::size_t j = 0; j < values_.size(); ++j) out.emplace_back(values_[j], probs_[j]);
  return out;
}

std::string DiscreteWeighted::describe() const {
  std::string out = "discrete(";
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (j) out += ",";
    out += format_number(values_[j]) + ":" + format_number(probs_[j]);
  }
  return out + ")";
}

Degenerate::Degenerate(double value) : DiscreteWeighted({value}, {1.0}) {}

std::string Degenerate::describe() const {
  return "degenerate(" + format_number(values_.front()) + ")";
}

Empirical::Empirical(std::vector<double> samples)
    : DiscreteWeighted(samples, std::vector<double>(samples.size(), 1.0)),
      samples_(std::move(samples)) {}

double Empirical::sample(Rng& rng) const { return samples_[rng.below(samples_.size())]; }

std::string Empirical::describe() const {
  std::string out = "empirical(";
  for (std::size_t j = 0; j < samples_.size(); ++j) {
    if (j) out += ",";
    out += format_number(samples_[j]);
  }
  return out + ")";
}

// --- Smoothed ----------------------------------------------------------------

Smoothed::Smoothed(DistributionPtr base, double epsilon)
    : base_(std::move(base)), epsilon_(epsilon) {
  if (!base_) throw ValidationError("smoothing needs a base law");
  atoms_ = base_->atoms();
  if (atoms_.empty()) throw ValidationError("smoothing applies to discrete laws only");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError("smoothing width must be > 0");
  }
}

double Smoothed::sample(Rng& rng) const { return base_->sample(rng) + epsilon_ * rng.uniform(); }

double Smoothed::survival(double x) const {
  double total = 0.0;
  for (const auto& [value, prob] : atoms_) {
    double y = x - value;
    if (y < 0.0) total += prob;
    else if (y < epsilon_) total += prob * (1.0 - y / epsilon_);
  }
  return std::clamp(total, 0.0, 1.0);
}

double Smoothed::upper_quantile(double alpha) const {
  check_alpha(alpha);
  if (survival(0.0) <= alpha) return 0.0;
  // Survival is continuous, nonincreasing and linear between breakpoints.
  std::vector<double> breaks;
  for (const auto& atom : atoms_) {
    breaks.push_back(atom.first);
    breaks.push_back(atom.first + epsilon_);
  }
  std::sort(breaks.begin(), breaks.end());
  double left = 0.0;
  double s_left = survival(0.0);
  for (double right : breaks) {
    if (right <= left) continue;
    double s_right = survival(right);
    if (s_right <= alpha) {
      if (s_left == s_right) return left;
      double t = (s_left - alpha) / (s_left - s_right);
      return left + t * (right - left);
    }
    left = right;
    s_left = s_right;
  }
  return breaks.back();
}

std::optional<double> Smoothed::mean() const {
  auto base_mean = base_->mean();
  if (!base_mean) return std::nullopt;
  return *base_mean + 0.5 * epsilon_;
}

std::string Smoothed::describe() const {
  return "smooth(" + base_->describe() + "," + format_number(epsilon_) + ")";
}

double default_smoothing_epsilon(const Distribution& law) {
  double scale = 1.0;
  for (const auto& atom : law.atoms()) scale = std::max(scale, std::abs(atom.first));
  return 1e-9 * scale;
}

DistributionPtr smooth_if_discrete(DistributionPtr law, double epsilon) {
  if (law->atoms().empty()) return law;
  double eps = epsilon > 0.0 ? epsilon : default_smoothing_epsilon(*law);
  return std::make_shared<Smoothed>(std::move(law), eps);
}

// --- free functions ----------------------------------------------------------

double upper_quantile(const Distribution& law, double alpha) { return law.upper_quantile(alpha); }

double max_law_cdf(std::span<const DistributionPtr> laws, double x) {
  double cdf = 1.0;
  for (const auto& law : laws) cdf *= 1.0 - law->survival(x);
  return cdf;
}

double max_law_upper_quantile(std::span<const DistributionPtr> laws, double alpha) {
  check_alpha(alpha);
  if (laws.empty()) throw ValidationError("max law needs at least one distribution");
  if (alpha == 1.0) return 0.0;
  const double target = 1.0 - alpha;
  if (max_law_cdf(laws, 0.0) >= target) return 0.0;

  constexpr int kMaxSteps = 200;
  int steps = 0;
  double lo = 0.0;
  double hi = 1.0;
  while (max_law_cdf(laws, hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (++steps > kMaxSteps || !std::isfinite(hi)) {
      throw NumericError("max-law quantile bracket did not close");
    }
  }
  // Bisect until the bracket cannot shrink further. A 1e-9 stopping width is
  // not enough near steep (smoothed) atoms, where it moves the tail mass.
  while (true) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= hi * 0x1p-52) break;
    if (max_law_cdf(laws, mid) >= target) hi = mid;
    else lo = mid;
    if (++steps > kMaxSteps) throw NumericError("max-law quantile bisection did not converge");
  }
  return hi;
}

DistributionPtr empirical_from_samples(std::vector<double> samples) {
  if (samples.empty()) throw ValidationError("empirical law needs at least one sample");
  return std::make_shared<Empirical>(std::move(samples));
}

DistributionPtr distribution_from_node(const SpecNode& node) {
  const std::string& name = node.name;
  auto number = [&](std::size_t i, const char* what) { return node_number(node.args.at(i), what); };
  try {
    if (name == "exp") {
      expect_args(node, 1, 1);
      return std::make_shared<Exponential>(number(0, "rate"));
    }
    if (name == "truncexp") {
      expect_args(node, 1, 1);
      return std::make_shared<TruncatedExponential>(number(0, "cap"));
    }
    if (name == "uniform") {
      expect_args(node, 2, 2);
      return std::make_shared<UniformInterval>(number(0, "a"), number(1, "b"));
    }
    if (name == "degenerate") {
      expect_args(node, 1, 1);
      return std::make_shared<Degenerate>(number(0, "value"));
    }
    if (name == "discrete") {
      expect_args(node, 1, std::numeric_limits<std::size_t>::max());
      std::vector<double> values;
      std::vector<double> weights;
      for (const auto& arg : node.args) {
        if (!arg.is_number() || !arg.weight) {
          throw ConfigError("discrete entries are value:weight pairs", 0, arg.column);
        }
        for (std::size_t r = 0; r < arg.repeat; ++r) {
          values.push_back(*arg.number);
          weights.push_back(*arg.weight);
        }
      }
      return std::make_shared<DiscreteWeighted>(values, weights);
    }
    if (name == "smooth") {
      expect_args(node, 1, 2);
      auto base = distribution_from_node(node.args[0]);
      double eps = node.args.size() == 2 ? number(1, "eps") : default_smoothing_epsilon(*base);
      return std::make_shared<Smoothed>(base, eps);
    }
  } catch (const ValidationError& e) {
    throw ConfigError(e.what(), 0, node.column);
  }
  throw ConfigError("unknown distribution '" + (name.empty() ? std::string("<number>") : name) + "'",
                    0, node.column);
}

DistributionPtr parse_distribution(std::string_view text) {
  return distribution_from_node(parse_spec(text));
}

}  // namespace penbench
