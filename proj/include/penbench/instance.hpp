#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace penbench {

enum class OrderModel {
  uniform_random,     // fresh uniformly random permutation per trial
  fixed_as_given,     // values arrive in the stored order
  generator_defined,  // the stored order is part of the instance; never reshuffled
};

std::string to_string(OrderModel order);
OrderModel order_model_from_string(const std::string& text);

struct Provenance {
  std::string generator;
  std::map<std::string, double> params;
  std::optional<std::uint64_t> seed;
};

/// A hidden value sequence X_1..X_n together with its arrival-order model.
struct Instance {
  std::vector<double> values;
  OrderModel order = OrderModel::fixed_as_given;
  double benchmark = 0.0;  // max over values
  Provenance provenance;

  std::size_t size() const { return values.size(); }
};

/// Builds an instance, computing the benchmark. Throws ValidationError for an
/// empty list or a negative/NaN value.
Instance make_instance(std::vector<double> values, OrderModel order, Provenance provenance = {});

}  // namespace penbench
