#include "penbench/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "penbench/errors.hpp"
#include "penbench/instances.hpp"
#include "penbench/secretary_algs.hpp"
#include "penbench/spec_parser.hpp"
#include "penbench/transcript_json.hpp"

namespace penbench {

namespace {

// --- shared helpers ----------------------------------------------------------

std::string format_double(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

/// Records what a source hands out, for transcripts.
class RecordingSource final : public ValueSource {
 public:
  RecordingSource(ValueSource& inner, std::vector<double>* sink) : inner_(inner), sink_(sink) {}
  double next() override {
    double v = inner_.next();
    if (sink_) sink_->push_back(v);
    return v;
  }

 private:
  ValueSource& inner_;
  std::vector<double>* sink_;
};

TrialResult finish(GameResult game, double benchmark) {
  TrialResult out;
  out.score = game.score;
  out.accepted = game.accepted_index.has_value();
  out.benchmark = benchmark;
  out.game = std::move(game);
  return out;
}

// --- prophet model ------------------------------------------------------------

/// Draws X_i from its law only when step i opens.
class LazyLawSource final : public ValueSource {
 public:
  LazyLawSource(const std::vector<DistributionPtr>& laws, Rng& rng) : laws_(laws), rng_(rng) {}
  double next() override {
    if (next_ >= laws_.size()) throw ContractViolation("value source exhausted");
    double v = laws_[next_++]->sample(rng_);
    max_ = std::max(max_, v);
    return v;
  }
  std::size_t consumed() const { return next_; }
  double max_so_far() const { return max_; }

 private:
  const std::vector<DistributionPtr>& laws_;
  Rng& rng_;
  std::size_t next_ = 0;
  double max_ = 0.0;
};

/// Exact draw of the max of m independent copies of `law`:
/// the smallest tau with P(X > tau) <= 1 - U^{1/m}.
double sample_max_of(const Distribution& law, std::size_t m, Rng& rng) {
  double u = (static_cast<double>(rng.next() >> 11) + 0.5) * 0x1.0p-53;  // strictly inside (0, 1)
  double alpha = -std::expm1(std::log(u) / static_cast<double>(m));
  alpha = std::clamp(alpha, 1e-300, 1.0);
  return law.upper_quantile(alpha);
}

class ProphetModel final : public InstanceModel {
 public:
  ProphetModel(std::vector<DistributionPtr> laws, bool iid, std::string description)
      : laws_(std::move(laws)), iid_(iid), description_(std::move(description)) {
    if (laws_.empty()) throw ConfigError("prophet instance needs at least one law");
    distributions_.n = laws_.size();
    distributions_.info = DistributionInfo{laws_};
  }

  InstanceFamily family() const override { return InstanceFamily::prophet; }
  std::size_t n() const override { return laws_.size(); }
  std::string describe() const override { return description_; }
  std::string order_name() const override { return "fixed"; }
  bool iid() const { return iid_; }

  void check_compatible(const StrategyBinding& s) const override {
    InstanceModel::check_compatible(s);
    if (s.needs_iid && !iid_) {
      throw ConfigError("strategy '" + s.spec + "' needs an i.i.d. instance");
    }
  }

  TrialResult play_trial(const StrategyBinding& strategy, std::uint64_t seed, std::uint64_t index,
                         const PlayOptions& options, bool keep_arrivals) const override {
    Rng values_rng(stream_seed(seed, index, kInstanceLane));
    PublicContext sampled;
    const PublicContext* context = &distributions_;
    if (strategy.regime == InfoRegime::samples) {
      Rng sample_rng(stream_seed(seed, index, kSampleLane));
      SampleInfo info;
      info.samples.reserve(laws_.size());
      for (const auto& law : laws_) info.samples.push_back(law->sample(sample_rng));
      sampled = PublicContext{laws_.size(), std::move(info)};
      context = &sampled;
    } else if (strategy.regime == InfoRegime::none) {
      sampled = PublicContext{laws_.size(), NoInfo{}};
      context = &sampled;
    } else if (strategy.regime == InfoRegime::hint) {
      sampled = PublicContext{laws_.size(), HintInfo{*strategy.hint}};
      context = &sampled;
    }
    auto player = strategy.make(Rng(stream_seed(seed, index, kStrategyLane)), *context);

    LazyLawSource source(laws_, values_rng);
    TrialResult out;
    std::vector<double> arrived;
    RecordingSource recorder(source, keep_arrivals ? &arrived : nullptr);
    GameResult game = play(recorder, *player, *context, options);

    // The values the game never looked at only matter through their maximum.
    double benchmark = source.max_so_far();
    if (keep_arrivals) {
      for (std::size_t i = source.consumed(); i < laws_.size(); ++i) {
        arrived.push_back(laws_[i]->sample(values_rng));
        benchmark = std::max(benchmark, arrived.back());
      }
    } else {
      std::vector<std::pair<const Distribution*, std::size_t>> groups;
      std::unordered_map<const Distribution*, std::size_t> slot;
      for (std::size_t i = source.consumed(); i < laws_.size(); ++i) {
        const Distribution* law = laws_[i].get();
        auto [it, fresh] = slot.emplace(law, groups.size());
        if (fresh) groups.emplace_back(law, 0);
        ++groups[it->second].second;
      }
      for (const auto& [law, m] : groups) benchmark = std::max(benchmark, sample_max_of(*law, m, values_rng));
    }
    out = finish(std::move(game), benchmark);
    out.arrived = std::move(arrived);
    return out;
  }

  Instance sample_instance(std::uint64_t seed, std::uint64_t index) const override {
    Rng rng(stream_seed(seed, index, kInstanceLane));
    Instance instance = independent_from(laws_, rng);
    instance.provenance.generator = description_;
    instance.provenance.seed = seed;
    return instance;
  }

 private:
  std::vector<DistributionPtr> laws_;
  bool iid_;
  std::string description_;
  PublicContext distributions_;
};

// --- secretary models ------------------------------------------------------------

enum class Arrangement { uniform, fixed, ascending, descending, alternating };

Arrangement arrangement_from(const std::string& name) {
  if (name == "uniform" || name == "uniform_random") return Arrangement::uniform;
  if (name == "fixed" || name == "fixed_as_given" || name == "generated") return Arrangement::fixed;
  if (name == "ascending" || name == "good-last") return Arrangement::ascending;
  if (name == "descending" || name == "good-first") return Arrangement::descending;
  if (name == "alternating") return Arrangement::alternating;
  throw ConfigError("unknown order '" + name +
                    "' (expected uniform, fixed, ascending, descending or alternating)");
}

std::string arrangement_name(Arrangement a) {
  switch (a) {
    case Arrangement::uniform: return "uniform";
    case Arrangement::fixed: return "fixed";
    case Arrangement::ascending: return "ascending";
    case Arrangement::descending: return "descending";
    case Arrangement::alternating: return "alternating";
  }
  return "?";
}

/// Deterministic arrangements; uniform is left to the caller.
std::vector<double> arrange(const std::vector<double>& values, Arrangement a) {
  std::vector<double> out = values;
  switch (a) {
    case Arrangement::uniform:
    case Arrangement::fixed:
      break;
    case Arrangement::ascending:
      std::sort(out.begin(), out.end());
      break;
    case Arrangement::descending:
      std::sort(out.begin(), out.end(), std::greater<>());
      break;
    case Arrangement::alternating: {
      std::vector<double> sorted = values;
      std::sort(sorted.begin(), sorted.end());
      out.clear();
      std::size_t lo = 0, hi = sorted.size();
      while (lo < hi) {
        out.push_back(sorted[lo++]);
        if (lo < hi) out.push_back(sorted[--hi]);
      }
      break;
    }
  }
  return out;
}

PublicContext secretary_context(InfoRegime regime, const std::vector<double>& values,
                                const StrategyBinding& strategy) {
  double top = *std::max_element(values.begin(), values.end());
  switch (regime) {
    case InfoRegime::full: {
      FullInfo info{values};
      std::sort(info.values.begin(), info.values.end());
      return {values.size(), std::move(info)};
    }
    case InfoRegime::optimum: return {values.size(), OptimumInfo{top}};
    case InfoRegime::hint: return {values.size(), HintInfo{strategy.hint.value_or(top)}};
    case InfoRegime::none: return {values.size(), NoInfo{}};
    default: break;
  }
  throw ConfigError("secretary instances cannot provide '" + to_string(regime) + "' information");
}

class FixedMultisetModel final : public InstanceModel {
 public:
  FixedMultisetModel(std::vector<double> values, Arrangement arrangement, std::string description)
      : values_(std::move(values)), arrangement_(arrangement), description_(std::move(description)) {
    if (values_.empty()) throw ConfigError("instance needs at least one value");
    for (double v : values_) {
      if (!(v >= 0.0) || std::isinf(v)) throw ConfigError("instance values must be finite and >= 0");
    }
    top_ = *std::max_element(values_.begin(), values_.end());
    arranged_ = arrange(values_, arrangement_);
  }

  InstanceFamily family() const override { return InstanceFamily::secretary; }
  std::size_t n() const override { return values_.size(); }
  std::string describe() const override { return description_; }
  std::string order_name() const override { return arrangement_name(arrangement_); }

  TrialResult play_trial(const StrategyBinding& strategy, std::uint64_t seed, std::uint64_t index,
                         const PlayOptions& options, bool keep_arrivals) const override {
    const PublicContext& context = context_for(strategy);
    auto player = strategy.make(Rng(stream_seed(seed, index, kStrategyLane)), context);
    TrialResult out;
    if (arrangement_ == Arrangement::uniform) {
      std::vector<double> arrived = values_;
      Rng rng(stream_seed(seed, index, kInstanceLane));
      rng.shuffle(arrived.begin(), arrived.end());
      VectorSource source(arrived);
      out = finish(play(source, *player, context, options), top_);
      if (keep_arrivals) out.arrived = std::move(arrived);
    } else {
      VectorSource source(arranged_);
      out = finish(play(source, *player, context, options), top_);
      if (keep_arrivals) out.arrived = arranged_;
    }
    return out;
  }

  Instance sample_instance(std::uint64_t seed, std::uint64_t index) const override {
    std::vector<double> arrived = arranged_;
    if (arrangement_ == Arrangement::uniform) {
      Rng rng(stream_seed(seed, index, kInstanceLane));
      rng.shuffle(arrived.begin(), arrived.end());
    }
    return make_instance(std::move(arrived), OrderModel::fixed_as_given,
                         Provenance{description_, {}, seed});
  }

 private:
  const PublicContext& context_for(const StrategyBinding& strategy) const {
    std::call_once(contexts_once_, [&] {
      for (auto regime : {InfoRegime::full, InfoRegime::optimum, InfoRegime::none}) {
        contexts_.emplace(regime, secretary_context(regime, values_, strategy));
      }
    });
    if (strategy.regime == InfoRegime::hint) {
      std::lock_guard lock(hint_mutex_);
      double hint = strategy.hint.value_or(top_);
      auto it = hint_contexts_.find(hint);
      if (it == hint_contexts_.end()) {
        it = hint_contexts_.emplace(hint, PublicContext{values_.size(), HintInfo{hint}}).first;
      }
      return it->second;
    }
    return contexts_.at(strategy.regime);
  }

  std::vector<double> values_;
  Arrangement arrangement_;
  std::string description_;
  double top_ = 0.0;
  std::vector<double> arranged_;
  mutable std::once_flag contexts_once_;
  mutable std::map<InfoRegime, PublicContext> contexts_;
  mutable std::mutex hint_mutex_;
  mutable std::map<double, PublicContext> hint_contexts_;
};

class TruncExpSecretaryModel final : public InstanceModel {
 public:
  TruncExpSecretaryModel(std::size_t n, Arrangement arrangement)
      : n_(n), arrangement_(arrangement), law_(truncated_exponential_cap(n)) {
    if (n < 2) throw ConfigError("truncexp-sec needs n >= 2");
  }

  InstanceFamily family() const override { return InstanceFamily::secretary; }
  std::size_t n() const override { return n_; }
  std::string describe() const override { return "truncexp-sec(" + std::to_string(n_) + ")"; }
  std::string order_name() const override { return arrangement_name(arrangement_); }

  TrialResult play_trial(const StrategyBinding& strategy, std::uint64_t seed, std::uint64_t index,
                         const PlayOptions& options, bool keep_arrivals) const override {
    Rng rng(stream_seed(seed, index, kInstanceLane));
    std::vector<double> values(n_);
    for (auto& v : values) v = law_.sample(rng);
    std::vector<double> arrived = arrange(values, arrangement_);
    if (arrangement_ == Arrangement::uniform) rng.shuffle(arrived.begin(), arrived.end());
    PublicContext context = secretary_context(strategy.regime, values, strategy);
    auto player = strategy.make(Rng(stream_seed(seed, index, kStrategyLane)), context);
    VectorSource source(arrived);
    double top = *std::max_element(values.begin(), values.end());
    TrialResult out = finish(play(source, *player, context, options), top);
    if (keep_arrivals) out.arrived = std::move(arrived);
    return out;
  }

  Instance sample_instance(std::uint64_t seed, std::uint64_t index) const override {
    Rng rng(stream_seed(seed, index, kInstanceLane));
    Instance instance = truncated_exponential_secretary(n_, rng);
    instance.order = OrderModel::fixed_as_given;
    instance.values = arrange(instance.values, arrangement_);
    if (arrangement_ == Arrangement::uniform) rng.shuffle(instance.values.begin(), instance.values.end());
    instance.provenance.seed = seed;
    return instance;
  }

 private:
  std::size_t n_;
  Arrangement arrangement_;
  TruncatedExponential law_;
};

class GeometricOrderModel final : public InstanceModel {
 public:
  explicit GeometricOrderModel(unsigned k) : k_(k) {
    for (auto c : power_level_counts(k, 4)) n_ += c;
  }

  InstanceFamily family() const override { return InstanceFamily::secretary; }
  std::size_t n() const override { return n_; }
  std::string describe() const override { return "geomorder(" + std::to_string(k_) + ")"; }
  std::string order_name() const override { return "generated"; }

  TrialResult play_trial(const StrategyBinding& strategy, std::uint64_t seed, std::uint64_t index,
                         const PlayOptions& options, bool keep_arrivals) const override {
    const PublicContext& context = context_for(strategy);
    auto player = strategy.make(Rng(stream_seed(seed, index, kStrategyLane)), context);
    Rng rng(stream_seed(seed, index, kInstanceLane));
    GeometricOrderSource source(k_, rng);
    std::vector<double> arrived;
    RecordingSource recorder(source, keep_arrivals ? &arrived : nullptr);
    TrialResult out = finish(play(recorder, *player, context, options), static_cast<double>(k_));
    if (keep_arrivals) {
      while (source.produced() < source.size()) arrived.push_back(source.next());
      out.arrived = std::move(arrived);
    }
    return out;
  }

  Instance sample_instance(std::uint64_t seed, std::uint64_t index) const override {
    Rng rng(stream_seed(seed, index, kInstanceLane));
    Instance instance = nonuniform_geometric_order(k_, rng);
    instance.provenance.seed = seed;
    return instance;
  }

 private:
  const PublicContext& context_for(const StrategyBinding& strategy) const {
    std::lock_guard lock(mutex_);
    double hint = strategy.hint.value_or(static_cast<double>(k_));
    auto key = std::make_pair(strategy.regime, strategy.regime == InfoRegime::hint ? hint : 0.0);
    auto it = contexts_.find(key);
    if (it != contexts_.end()) return it->second;
    PublicContext context;
    context.n = n_;
    switch (strategy.regime) {
      case InfoRegime::full: {
        FullInfo info;
        info.values.reserve(n_);
        auto counts = power_level_counts(k_, 4);
        for (unsigned j = 0; j <= k_; ++j) info.values.insert(info.values.end(), counts[j], double(j));
        context.info = std::move(info);
        break;
      }
      case InfoRegime::optimum: context.info = OptimumInfo{static_cast<double>(k_)}; break;
      case InfoRegime::hint: context.info = HintInfo{hint}; break;
      case InfoRegime::none: context.info = NoInfo{}; break;
      default:
        throw ConfigError("secretary instances cannot provide '" + to_string(strategy.regime) +
                          "' information");
    }
    return contexts_.emplace(key, std::move(context)).first->second;
  }

  unsigned k_;
  std::size_t n_ = 0;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<InfoRegime, double>, PublicContext> contexts_;
};

// --- spec parsing ---------------------------------------------------------------

unsigned small_count(const SpecNode& node, const char* what, unsigned max) {
  auto v = node_count(node, what);
  if (v > max) throw ConfigError(std::string(what) + " is too large", 0, node.column);
  return static_cast<unsigned>(v);
}

std::unique_ptr<InstanceModel> secretary_values_model(std::vector<double> values, Arrangement a,
                                                      std::string description) {
  return std::make_unique<FixedMultisetModel>(std::move(values), a, std::move(description));
}

}  // namespace

void InstanceModel::check_compatible(const StrategyBinding& s) const {
  bool ok = false;
  if (family() == InstanceFamily::prophet) {
    ok = s.regime == InfoRegime::distributions || s.regime == InfoRegime::samples ||
         s.regime == InfoRegime::none || (s.regime == InfoRegime::hint && s.hint.has_value());
  } else {
    ok = s.regime == InfoRegime::full || s.regime == InfoRegime::optimum ||
         s.regime == InfoRegime::hint || s.regime == InfoRegime::none;
  }
  if (!ok) {
    std::string family_name = family() == InstanceFamily::prophet ? "prophet" : "secretary";
    throw ConfigError("strategy '" + s.spec + "' needs '" + to_string(s.regime) +
                      "' information, which a " + family_name + " instance (" + describe() +
                      ") does not provide");
  }
}

std::string substitute_n(std::string_view text, std::size_t n) {
  std::string out(text);
  const std::string token = "{n}";
  std::string value = std::to_string(n);
  for (auto pos = out.find(token); pos != std::string::npos; pos = out.find(token, pos + value.size())) {
    out.replace(pos, token.size(), value);
  }
  return out;
}

std::unique_ptr<InstanceModel> parse_instance(std::string_view spec_in, std::optional<std::size_t> n,
                                              std::optional<std::string> order) {
  std::string spec = n ? substitute_n(spec_in, *n) : std::string(spec_in);
  if (spec.find("{n}") != std::string::npos) throw ConfigError("instance spec uses {n} but no n is set");

  auto secretary_order = [&](Arrangement fallback) {
    return order ? arrangement_from(*order) : fallback;
  };
  auto prophet_order = [&] {
    if (order && *order != "fixed") throw ConfigError("prophet instances arrive in law order (order 'fixed')");
  };

  if (spec.rfind("file:", 0) == 0) {
    std::string path = spec.substr(5);
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open instance file '" + path + "'");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("instance file '" + path + "': " + e.what());
    }
    Instance instance;
    try {
      instance = instance_from_json(doc);
    } catch (const std::exception& e) {
      throw ConfigError("instance file '" + path + "': " + e.what());
    }
    Arrangement fallback =
        instance.order == OrderModel::uniform_random ? Arrangement::uniform : Arrangement::fixed;
    return secretary_values_model(std::move(instance.values), secretary_order(fallback), "file:" + path);
  }

  SpecNode node = parse_spec(spec);
  const std::string& name = node.name;
  if (name == "iid") {
    expect_args(node, 2, 2);
    prophet_order();
    auto law = distribution_from_node(node.args[0]);
    auto count = node_count(node.args[1], "n");
    if (count == 0) throw ConfigError("n must be >= 1", 0, node.args[1].column);
    return std::make_unique<ProphetModel>(std::vector<DistributionPtr>(count, law), true, spec);
  }
  if (name == "indep") {
    expect_args(node, 1, SIZE_MAX);
    prophet_order();
    std::vector<DistributionPtr> laws;
    for (const auto& arg : node.args) {
      auto law = distribution_from_node(arg);
      laws.insert(laws.end(), arg.repeat, law);
    }
    bool iid = node.args.size() == 1;
    return std::make_unique<ProphetModel>(std::move(laws), iid, spec);
  }
  if (name == "values") {
    expect_args(node, 1, SIZE_MAX);
    std::vector<double> values;
    for (const auto& arg : node.args) {
      double v = node_number(arg, "value");
      if (v < 0.0) throw ConfigError("values must be >= 0", 0, arg.column);
      values.insert(values.end(), arg.repeat, v);
    }
    return secretary_values_model(std::move(values), secretary_order(Arrangement::fixed), spec);
  }
  if (name == "powers") {
    expect_args(node, 1, 2);
    unsigned k = small_count(node.args[0], "k", 62);
    unsigned base = node.args.size() == 2 ? small_count(node.args[1], "base", 1u << 20) : 2;
    Instance instance;
    try {
      instance = power_counts(k, base);
    } catch (const ValidationError& e) {
      throw ConfigError(e.what(), 0, node.column);
    }
    return secretary_values_model(std::move(instance.values), secretary_order(Arrangement::uniform), spec);
  }
  if (name == "geomorder") {
    expect_args(node, 1, 1);
    if (order && *order != "generated") throw ConfigError("geomorder instances use their generated order");
    unsigned k = small_count(node.args[0], "k", 13);
    if (k < 1) throw ConfigError("geomorder needs k >= 1", 0, node.args[0].column);
    return std::make_unique<GeometricOrderModel>(k);
  }
  if (name == "truncexp-sec") {
    expect_args(node, 1, 1);
    auto count = node_count(node.args[0], "n");
    if (count < 2) throw ConfigError("truncexp-sec needs n >= 2", 0, node.args[0].column);
    return std::make_unique<TruncExpSecretaryModel>(count, secretary_order(Arrangement::uniform));
  }
  // A bare distribution with n supplied separately.
  auto law = distribution_from_node(node);
  if (!n) throw ConfigError("instance '" + spec + "' is a distribution; set n to play it i.i.d.");
  if (*n == 0) throw ConfigError("n must be >= 1");
  prophet_order();
  return std::make_unique<ProphetModel>(std::vector<DistributionPtr>(*n, law), true,
                                        "iid(" + law->describe() + "," + std::to_string(*n) + ")");
}

// --- aggregation -------------------------------------------------------------------

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MeanSe mean_and_se(std::span<const double> values) {
  MeanSe out;
  if (values.empty()) return out;
  double count = static_cast<double>(values.size());
  out.mean = pairwise_sum(values) / count;
  if (values.size() < 2) return out;
  std::vector<double> squares(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) squares[i] = (values[i] - out.mean) * (values[i] - out.mean);
  out.se = std::sqrt(pairwise_sum(squares) / (count - 1.0) / count);
  return out;
}

namespace {

std::optional<double> resolve_success_fraction(const std::optional<std::string>& text, std::size_t n) {
  if (!text || text->empty()) return std::nullopt;
  if (*text == "gap") return 1.0 / static_cast<double>(gap_k(n));
  try {
    std::size_t used = 0;
    double v = std::stod(*text, &used);
    if (used != text->size() || !(v >= 0.0)) throw std::invalid_argument("bad");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("success fraction must be a number >= 0 or 'gap', got '" + *text + "'");
  }
}

}  // namespace

Report run_trials(const InstanceModel& model, const StrategyBinding& strategy,
                  const ExperimentConfig& config) {
  if (config.trials == 0) throw ConfigError("trials must be >= 1");
  model.check_compatible(strategy);
  auto fraction = resolve_success_fraction(config.success_fraction, model.n());

  auto start = std::chrono::steady_clock::now();
  std::vector<double> scores(config.trials), benchmarks(config.trials);
  std::vector<std::uint8_t> accepted(config.trials);
  PlayOptions options;
  options.record_transcript = false;
  options.test_cap = config.test_cap;

  unsigned workers = std::max(1u, config.workers);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](unsigned w) {
    try {
      for (std::uint64_t t = w; t < config.trials; t += workers) {
        TrialResult r = model.play_trial(strategy, config.seed, t, options);
        scores[t] = r.score;
        benchmarks[t] = r.benchmark;
        accepted[t] = r.accepted;
        {
          std::lock_guard lock(failure_mutex);
          if (failure) return;
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& th : threads) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  Report report;
  report.strategy = strategy.spec;
  report.instance = model.describe();
  report.order = model.order_name();
  report.n = model.n();
  report.trials = config.trials;
  report.seed = config.seed;
  auto score_stats = mean_and_se(scores);
  report.mean = score_stats.mean;
  report.se = score_stats.se;
  auto bench_stats = mean_and_se(benchmarks);
  report.benchmark = bench_stats.mean;
  report.benchmark_se = bench_stats.se;
  if (report.mean > 0.0) report.ratio = report.benchmark / report.mean;

  std::vector<double> accepted_scores;
  std::vector<double> successes;
  std::uint64_t accept_count = 0;
  for (std::uint64_t t = 0; t < config.trials; ++t) {
    if (accepted[t]) {
      ++accept_count;
      accepted_scores.push_back(scores[t]);
    }
    if (fraction) successes.push_back(scores[t] >= *fraction * benchmarks[t] ? 1.0 : 0.0);
  }
  report.accept_rate = static_cast<double>(accept_count) / static_cast<double>(config.trials);
  if (!accepted_scores.empty()) {
    auto c = mean_and_se(accepted_scores);
    report.conditional_mean = c.mean;
    report.conditional_se = c.se;
  }
  if (fraction) {
    report.success_fraction = fraction;
    report.success_rate = mean_and_se(successes).mean;
  }
  if (config.timing) {
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return report;
}

Report run_experiment(const ExperimentConfig& config) {
  if (config.strategy.empty()) throw ConfigError("no strategy given");
  if (config.instance.empty()) throw ConfigError("no instance given");
  auto strategy = parse_strategy(config.strategy, config.prophet);
  auto model = parse_instance(config.instance, config.n, config.order);
  return run_trials(*model, strategy, config);
}

SweepResult sweep(const ExperimentConfig& config) {
  if (config.n_list.empty()) throw ConfigError("sweep needs a nonempty n list");
  if (!std::is_sorted(config.n_list.begin(), config.n_list.end()) ||
      std::adjacent_find(config.n_list.begin(), config.n_list.end()) != config.n_list.end()) {
    throw ConfigError("sweep n list must be strictly ascending");
  }
  SweepResult result;
  double num = 0.0, den = 0.0;
  for (std::size_t n : config.n_list) {
    SweepRow row;
    row.n = n;
    try {
      ExperimentConfig cell = config;
      cell.n = n;
      cell.instance = substitute_n(config.instance, n);
      row.report = run_experiment(cell);
      if (row.report->ratio && n >= 2) {
        double ln = std::log(static_cast<double>(n));
        num += *row.report->ratio * ln;
        den += ln * ln;
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    result.rows.push_back(std::move(row));
  }
  if (den > 0.0) result.fitted_c = num / den;
  return result;
}

TrialResult play_single(const ExperimentConfig& config, std::uint64_t trial_index) {
  auto strategy = parse_strategy(config.strategy, config.prophet);
  auto model = parse_instance(config.instance, config.n, config.order);
  model->check_compatible(strategy);
  PlayOptions options;
  options.record_transcript = true;
  options.test_cap = config.test_cap;
  return model->play_trial(strategy, config.seed, trial_index, options, true);
}

// --- output ---------------------------------------------------------------------------

nlohmann::json report_to_json(const Report& r) {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["strategy"] = r.strategy;
  j["instance"] = r.instance;
  j["order"] = r.order;
  j["n"] = r.n;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["mean"] = r.mean;
  j["se"] = r.se;
  j["benchmark"] = r.benchmark;
  j["benchmark_se"] = r.benchmark_se;
  j["ratio"] = r.ratio ? nlohmann::json(*r.ratio) : nlohmann::json(nullptr);
  j["accept_rate"] = r.accept_rate;
  j["conditional_mean"] = r.conditional_mean ? nlohmann::json(*r.conditional_mean) : nlohmann::json(nullptr);
  j["conditional_se"] = r.conditional_se ? nlohmann::json(*r.conditional_se) : nlohmann::json(nullptr);
  if (r.success_fraction) {
    j["success_fraction"] = *r.success_fraction;
    j["success_rate"] = *r.success_rate;
  }
  if (r.wall_time) j["wall_time"] = *r.wall_time;
  return j;
}

namespace {

std::string optional_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string reports_to_csv(const std::vector<Report>& reports) {
  std::ostringstream out;
  out << "n,mean,se,benchmark,ratio,trials,accept_rate,conditional_mean,success_rate,strategy,instance,"
         "order,seed\n";
  for (const auto& r : reports) {
    out << r.n << ',' << format_double(r.mean) << ',' << format_double(r.se) << ','
        << format_double(r.benchmark) << ',' << optional_cell(r.ratio) << ',' << r.trials << ','
        << format_double(r.accept_rate) << ',' << optional_cell(r.conditional_mean) << ','
        << optional_cell(r.success_rate) << ',' << csv_quote(r.strategy) << ',' << csv_quote(r.instance)
        << ',' << r.order << ',' << r.seed << '\n';
  }
  return out.str();
}

std::string sweep_to_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "n,mean,se,benchmark,ratio,success,error\n";
  for (const auto& row : result.rows) {
    out << row.n << ',';
    if (row.report) {
      const auto& r = *row.report;
      out << format_double(r.mean) << ',' << format_double(r.se) << ',' << format_double(r.benchmark) << ','
          << optional_cell(r.ratio) << ',' << optional_cell(r.success_rate) << ',';
    } else {
      out << ",,,,,";
    }
    out << csv_quote(row.error) << '\n';
  }
  return out.str();
}

nlohmann::json sweep_to_json(const SweepResult& result) {
  nlohmann::json j;
  j["schema"] = kSweepSchema;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : result.rows) {
    nlohmann::json cell;
    cell["n"] = row.n;
    if (row.report) cell["report"] = report_to_json(*row.report);
    if (!row.error.empty()) cell["error"] = row.error;
    j["rows"].push_back(std::move(cell));
  }
  j["fitted_c"] = result.fitted_c ? nlohmann::json(*result.fitted_c) : nlohmann::json(nullptr);
  return j;
}

}  // namespace penbench
