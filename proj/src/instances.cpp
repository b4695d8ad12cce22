#include "penbench/instances.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "penbench/errors.hpp"

namespace penbench {

std::string to_string(OrderModel order) {
  switch (order) {
    case OrderModel::uniform_random: return "uniform";
    case OrderModel::fixed_as_given: return "fixed";
    case OrderModel::generator_defined: return "generated";
  }
  return "?";
}

OrderModel order_model_from_string(const std::string& text) {
  if (text == "uniform" || text == "uniform_random") return OrderModel::uniform_random;
  if (text == "fixed" || text == "fixed_as_given") return OrderModel::fixed_as_given;
  if (text == "generated" || text == "generator_defined") return OrderModel::generator_defined;
  throw ValidationError("unknown order model '" + text + "' (expected uniform, fixed or generated)");
}

Instance make_instance(std::vector<double> values, OrderModel order, Provenance provenance) {
  if (values.empty()) throw ValidationError("an instance needs at least one value");
  for (double v : values) {
    if (std::isnan(v) || v < 0.0 || std::isinf(v)) {
      throw ValidationError("instance values must be finite and nonnegative");
    }
  }
  Instance instance;
  instance.benchmark = *std::max_element(values.begin(), values.end());
  instance.values = std::move(values);
  instance.order = order;
  instance.provenance = std::move(provenance);
  return instance;
}

Instance iid_from(const DistributionPtr& law, std::size_t n, Rng& rng) {
  if (n == 0) throw ValidationError("iid instance needs n >= 1");
  std::vector<double> values(n);
  for (auto& v : values) v = law->sample(rng);
  Provenance provenance{"iid:" + law->describe(), {{"n", static_cast<double>(n)}}, rng.seed()};
  return make_instance(std::move(values), OrderModel::fixed_as_given, std::move(provenance));
}

Instance independent_from(std::span<const DistributionPtr> laws, Rng& rng) {
  if (laws.empty()) throw ValidationError("independent instance needs at least one law");
  std::vector<double> values;
  values.reserve(laws.size());
  for (const auto& law : laws) values.push_back(law->sample(rng));
  Provenance provenance{"independent", {{"n", static_cast<double>(laws.size())}}, rng.seed()};
  return make_instance(std::move(values), OrderModel::fixed_as_given, std::move(provenance));
}

std::vector<std::uint64_t> power_level_counts(unsigned k, unsigned base) {
  if (k < 1) throw ValidationError("power_counts needs k >= 1");
  if (base < 2) throw ValidationError("power_counts needs base >= 2");
  std::vector<std::uint64_t> counts(k + 1);
  std::uint64_t count = 1;
  std::uint64_t total = 0;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  for (unsigned j = k + 1; j-- > 0;) {
    counts[j] = count;
    if (total > kMax - count) throw ValidationError("power_counts size overflows");
    total += count;
    if (j > 0) {
      if (count > kMax / base) throw ValidationError("power_counts size overflows");
      count *= base;
    }
  }
  return counts;
}

Instance power_counts(unsigned k, unsigned base, std::uint64_t max_size) {
  auto counts = power_level_counts(k, base);
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total > max_size) {
    throw ValidationError("power_counts instance of size " + std::to_string(total) +
                          " exceeds the limit " + std::to_string(max_size));
  }
  std::vector<double> values;
  values.reserve(total);
  for (unsigned j = 0; j <= k; ++j) values.insert(values.end(), counts[j], static_cast<double>(j));
  Provenance provenance{"powers", {{"k", double(k)}, {"base", double(base)}}, std::nullopt};
  return make_instance(std::move(values), OrderModel::uniform_random, std::move(provenance));
}

unsigned geometric_level(Rng& rng) {
  auto word = rng.next();
  return std::min(static_cast<unsigned>(std::countl_zero(word)), 62u);
}

GeometricOrderSource::GeometricOrderSource(unsigned k, Rng& rng, std::uint64_t iteration_cap)
    : k_(k), rng_(rng), iteration_cap_(iteration_cap), remaining_(power_level_counts(k, 4)) {
  for (auto c : remaining_) total_ += c;
}

double GeometricOrderSource::next() {
  if (produced_ >= total_) throw ContractViolation("geometric order source exhausted");
  while (true) {
    if (++iterations_ > iteration_cap_) {
      throw NumericError("geometric order generator exceeded its iteration cap");
    }
    unsigned level = geometric_level(rng_);
    if (level <= k_ && remaining_[level] > 0) {
      --remaining_[level];
      ++produced_;
      return static_cast<double>(level);
    }
  }
}

Instance nonuniform_geometric_order(unsigned k, Rng& rng) {
  GeometricOrderSource source(k, rng);
  std::vector<double> values;
  values.reserve(source.size());
  for (std::uint64_t i = 0; i < source.size(); ++i) values.push_back(source.next());
  Provenance provenance{"geomorder", {{"k", double(k)}}, rng.seed()};
  return make_instance(std::move(values), OrderModel::generator_defined, std::move(provenance));
}

double truncated_exponential_cap(std::size_t n) {
  return std::log(static_cast<double>(n)) / 2.0;
}

Instance truncated_exponential_secretary(std::size_t n, Rng& rng) {
  if (n < 2) throw ValidationError("truncated exponential instance needs n >= 2");
  TruncatedExponential law(truncated_exponential_cap(n));
  std::vector<double> values(n);
  for (auto& v : values) v = law.sample(rng);
  Provenance provenance{"truncexp-sec", {{"n", double(n)}, {"cap", law.cap()}}, rng.seed()};
  return make_instance(std::move(values), OrderModel::uniform_random, std::move(provenance));
}

}  // namespace penbench
