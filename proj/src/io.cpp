#include "clutter_em/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "clutter_em/error.hpp"

namespace clutter {

namespace {

std::string join_path(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string index_path(const std::string& path, std::size_t i) { return fmt::format("{}[{}]", path, i); }

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

long long as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<long long>();
}

int as_int(const json& j, const std::string& path) {
  const long long v = as_integer(j, path);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(path, "integer out of range");
  }
  return static_cast<int>(v);
}

std::uint64_t as_u64(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    const auto v = j.get<std::int64_t>();
    if (v < 0) throw ConfigError(path, "expected a nonnegative integer");
    return static_cast<std::uint64_t>(v);
  }
  throw ConfigError(path, "expected an unsigned 64-bit integer");
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected a boolean");
  return j.get<bool>();
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  return j;
}

std::vector<double> as_double_list(const json& j, const std::string& path) {
  std::vector<double> out;
  for (std::size_t i = 0; i < as_array(j, path).size(); ++i) out.push_back(as_double(j[i], index_path(path, i)));
  return out;
}

std::vector<int> as_int_list(const json& j, const std::string& path) {
  std::vector<int> out;
  for (std::size_t i = 0; i < as_array(j, path).size(); ++i) out.push_back(as_int(j[i], index_path(path, i)));
  return out;
}

/// Tracks which keys of a JSON object were consumed; finish() rejects the rest.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected a JSON object");
  }

  bool has(std::string_view key) const { return j_.contains(key); }

  const json& required(std::string_view key) {
    if (!j_.contains(key)) throw ConfigError(join_path(path_, key), "missing required field");
    seen_.emplace(key);
    return j_.at(std::string(key));
  }

  const json* optional(std::string_view key) {
    if (!j_.contains(key)) return nullptr;
    seen_.emplace(key);
    return &j_.at(std::string(key));
  }

  /// Rejects `key` with a reason when present.
  void forbid(std::string_view key, std::string_view reason) const {
    if (j_.contains(key)) throw ConfigError(join_path(path_, key), std::string(reason));
  }

  std::string path(std::string_view key) const { return join_path(path_, key); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(join_path(path_, key), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

MosCriterion mos_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  MosCriterion m;
  const std::string rule = as_string(r.required("rule"), r.path("rule"));
  if (rule == "AIC") {
    m.rule = MosRule::AIC;
  } else if (rule == "GIC") {
    m.rule = MosRule::GIC;
  } else if (rule == "BIC") {
    m.rule = MosRule::BIC;
  } else {
    throw ConfigError(r.path("rule"), fmt::format("unknown rule '{}' (expected AIC, GIC or BIC)", rule));
  }
  if (m.rule == MosRule::GIC) {
    if (const auto* a = r.optional("a")) m.a = as_double(*a, r.path("a"));
  } else {
    r.forbid("a", "only valid for the GIC rule");
  }
  r.finish();
  return m;
}

json to_json(const MosCriterion& m) {
  switch (m.rule) {
    case MosRule::AIC: return {{"rule", "AIC"}};
    case MosRule::BIC: return {{"rule", "BIC"}};
    case MosRule::GIC: return {{"rule", "GIC"}, {"a", m.a}};
  }
  return {};
}

template <class F>
auto rethrow_as_config(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    if (!e.key_path().empty()) throw;
    throw ConfigError(path, e.message());
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

// ---------------------------------------------------------------------------
// Scenario and fit configurations

json to_json(const ScenarioConfig& c) {
  json j = {{"N", c.n_channels},
            {"class_sizes", c.class_sizes},
            {"model_kind", std::string(to_string(c.model_kind))},
            {"clutter_powers_db", c.clutter_powers_db},
            {"seed", c.seed}};
  if (c.model_kind == ScenarioModel::ScaledAR1) {
    j["rho"] = c.rho;
  } else {
    j["noise_power_db"] = c.noise_power_db;
    j["angles_deg"] = c.angles_deg;
  }
  return j;
}

ScenarioConfig scenario_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  ScenarioConfig c;
  c.n_channels = as_int(r.required("N"), r.path("N"));
  c.class_sizes = as_int_list(r.required("class_sizes"), r.path("class_sizes"));
  c.model_kind = rethrow_as_config(r.path("model_kind"), [&] {
    return scenario_model_from_string(as_string(r.required("model_kind"), r.path("model_kind")));
  });
  c.clutter_powers_db = as_double_list(r.required("clutter_powers_db"), r.path("clutter_powers_db"));
  if (const auto* s = r.optional("seed")) c.seed = as_u64(*s, r.path("seed"));

  if (c.model_kind == ScenarioModel::ScaledAR1) {
    c.rho = as_double(r.required("rho"), r.path("rho"));
    r.forbid("noise_power_db", "only valid for model_kind PatchesPlusNoise");
    r.forbid("angles_deg", "only valid for model_kind PatchesPlusNoise");
  } else {
    r.forbid("rho", "only valid for model_kind ScaledAR1");
    c.noise_power_db = as_double(r.required("noise_power_db"), r.path("noise_power_db"));
    const auto& angles = as_array(r.required("angles_deg"), r.path("angles_deg"));
    for (std::size_t l = 0; l < angles.size(); ++l) {
      c.angles_deg.push_back(as_double_list(angles[l], index_path(r.path("angles_deg"), l)));
    }
  }
  r.finish();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(join_path(path, e.key_path()), e.message());
  }
  return c;
}

json to_json(const FitConfig& c) {
  json j = {{"model_kind", std::string(to_string(c.model_kind))},
            {"L", c.num_classes},
            {"h_max", c.h_max},
            {"t_max", c.t_max},
            {"mos_rule", to_json(c.mos_rule)},
            {"ll_tol", c.ll_tol},
            {"ridge_eps", c.ridge_eps}};
  if (c.ranks) j["ranks"] = *c.ranks;
  return j;
}

FitConfig fit_config_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  FitConfig c;
  c.model_kind = rethrow_as_config(r.path("model_kind"), [&] {
    return covariance_model_from_string(as_string(r.required("model_kind"), r.path("model_kind")));
  });
  c.num_classes = as_int(r.required("L"), r.path("L"));
  if (const auto* v = r.optional("h_max")) c.h_max = as_int(*v, r.path("h_max"));
  if (const auto* v = r.optional("t_max")) c.t_max = as_int(*v, r.path("t_max"));
  if (const auto* v = r.optional("mos_rule")) c.mos_rule = mos_from_json(*v, r.path("mos_rule"));
  if (const auto* v = r.optional("ranks")) c.ranks = as_int_list(*v, r.path("ranks"));
  if (const auto* v = r.optional("ll_tol")) c.ll_tol = as_double(*v, r.path("ll_tol"));
  if (const auto* v = r.optional("ridge_eps")) c.ridge_eps = as_double(*v, r.path("ridge_eps"));
  r.finish();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(join_path(path, e.key_path()), e.message());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Parameters and results

json to_json(const CMatrix& m) {
  json re = json::array();
  json im = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json rr = json::array();
    json ii = json::array();
    for (Index k = 0; k < m.cols(); ++k) {
      rr.push_back(m(i, k).real());
      ii.push_back(m(i, k).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ii));
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

CMatrix complex_matrix_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  const auto& re = as_array(r.required("re"), r.path("re"));
  const auto& im = as_array(r.required("im"), r.path("im"));
  r.finish();
  if (re.size() != im.size()) throw ConfigError(path, "re and im differ in row count");
  const auto rows = static_cast<Index>(re.size());
  const auto cols = rows == 0 ? Index{0} : static_cast<Index>(as_array(re[0], r.path("re[0]")).size());
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto rp = index_path(r.path("re"), static_cast<std::size_t>(i));
    const auto ip = index_path(r.path("im"), static_cast<std::size_t>(i));
    const auto rv = as_double_list(re[static_cast<std::size_t>(i)], rp);
    const auto iv = as_double_list(im[static_cast<std::size_t>(i)], ip);
    if (static_cast<Index>(rv.size()) != cols || static_cast<Index>(iv.size()) != cols) {
      throw ConfigError(rp, "ragged matrix rows");
    }
    for (Index k = 0; k < cols; ++k) m(i, k) = {rv[static_cast<std::size_t>(k)], iv[static_cast<std::size_t>(k)]};
  }
  return m;
}

namespace {

HermitianMatrix hermitian_from_json(const json& j, const std::string& path) {
  return rethrow_as_config(path, [&] { return HermitianMatrix(complex_matrix_from_json(j, path)); });
}

RVector rvector_from(const std::vector<double>& v) {
  return Eigen::Map<const RVector>(v.data(), static_cast<Index>(v.size()));
}

std::vector<double> to_std(const RVector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

json to_json(const MixtureParams& p) {
  json j = {{"model", std::string(to_string(p.model()))}, {"priors", to_std(p.priors)}};
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, GeneralCovariance>) {
          json classes = json::array();
          for (const auto& m : c.classes) classes.push_back(to_json(m.matrix()));
          j["classes"] = std::move(classes);
        } else if constexpr (std::is_same_v<T, ScaledCommonCovariance>) {
          j["structure"] = to_json(c.structure.matrix());
          j["powers"] = to_std(c.powers);
        } else {
          json clutter = json::array();
          for (const auto& m : c.clutter) clutter.push_back(to_json(m.matrix()));
          j["noise_power"] = c.noise_power;
          j["clutter"] = std::move(clutter);
          j["ranks"] = c.ranks;
        }
      },
      p.covariance);
  return j;
}

MixtureParams mixture_params_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  MixtureParams p;
  const auto model = rethrow_as_config(r.path("model"), [&] {
    return covariance_model_from_string(as_string(r.required("model"), r.path("model")));
  });
  p.priors = rvector_from(as_double_list(r.required("priors"), r.path("priors")));
  switch (model) {
    case CovarianceModel::General: {
      GeneralCovariance c;
      const auto& classes = as_array(r.required("classes"), r.path("classes"));
      for (std::size_t l = 0; l < classes.size(); ++l) {
        c.classes.push_back(hermitian_from_json(classes[l], index_path(r.path("classes"), l)));
      }
      p.covariance = std::move(c);
      break;
    }
    case CovarianceModel::ScaledCommon:
      p.covariance = ScaledCommonCovariance{hermitian_from_json(r.required("structure"), r.path("structure")),
                                            rvector_from(as_double_list(r.required("powers"), r.path("powers")))};
      break;
    case CovarianceModel::LowRankNoise: {
      LowRankNoiseCovariance c;
      c.noise_power = as_double(r.required("noise_power"), r.path("noise_power"));
      const auto& clutter = as_array(r.required("clutter"), r.path("clutter"));
      for (std::size_t l = 0; l < clutter.size(); ++l) {
        c.clutter.push_back(hermitian_from_json(clutter[l], index_path(r.path("clutter"), l)));
      }
      c.ranks = as_int_list(r.required("ranks"), r.path("ranks"));
      p.covariance = std::move(c);
      break;
    }
  }
  r.finish();
  rethrow_as_config(path, [&] {
    p.validate();
    return 0;
  });
  return p;
}

json to_json(const FitResult& f) {
  json q = json::array();
  for (Index k = 0; k < f.responsibilities.n_bins(); ++k) {
    q.push_back(to_std(f.responsibilities.table().row(k).transpose()));
  }
  return {{"params", to_json(f.params)},
          {"responsibilities", std::move(q)},
          {"labels", f.labels},
          {"ll_trace", f.ll_trace},
          {"rank_trace", f.rank_trace},
          {"iterations_run", f.iterations_run},
          {"diagnostics",
           {{"ridge_events", f.ridge_events},
            {"noise_floor_events", f.noise_floor_events},
            {"ll_decreases", f.ll_decreases}}}};
}

FitResult fit_result_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  FitResult f;
  f.params = mixture_params_from_json(r.required("params"), r.path("params"));
  const auto& q = as_array(r.required("responsibilities"), r.path("responsibilities"));
  RMatrix table(static_cast<Index>(q.size()), f.params.num_classes());
  for (std::size_t k = 0; k < q.size(); ++k) {
    const auto row = as_double_list(q[k], index_path(r.path("responsibilities"), k));
    if (static_cast<int>(row.size()) != f.params.num_classes()) {
      throw ConfigError(index_path(r.path("responsibilities"), k), "wrong number of classes");
    }
    table.row(static_cast<Index>(k)) = rvector_from(row).transpose();
  }
  f.responsibilities = rethrow_as_config(r.path("responsibilities"), [&] { return Responsibilities(table); });
  f.labels = as_int_list(r.required("labels"), r.path("labels"));
  f.ll_trace = as_double_list(r.required("ll_trace"), r.path("ll_trace"));
  const auto& ranks = as_array(r.required("rank_trace"), r.path("rank_trace"));
  for (std::size_t h = 0; h < ranks.size(); ++h) {
    f.rank_trace.push_back(as_int_list(ranks[h], index_path(r.path("rank_trace"), h)));
  }
  f.iterations_run = as_int(r.required("iterations_run"), r.path("iterations_run"));
  if (const auto* d = r.optional("diagnostics")) {
    ObjectReader dr(*d, r.path("diagnostics"));
    f.ridge_events = as_int(dr.required("ridge_events"), dr.path("ridge_events"));
    f.noise_floor_events = as_int(dr.required("noise_floor_events"), dr.path("noise_floor_events"));
    f.ll_decreases = as_int(dr.required("ll_decreases"), dr.path("ll_decreases"));
    dr.finish();
  }
  r.finish();
  return f;
}

json to_json(const BenchmarkReport& b, bool include_timing) {
  json hist = json::array();
  for (const auto& [count, freq] : b.error_histogram) hist.push_back({{"error_count", count}, {"frequency", freq}});
  json errors = json::array();
  json failures = json::array();
  for (std::size_t i = 0; i < b.outcomes.size(); ++i) {
    errors.push_back(b.outcomes[i].error_count);
    if (b.outcomes[i].failed) failures.push_back({{"trial", i}, {"reason", b.outcomes[i].failure}});
  }
  json j = {{"scenario", to_json(b.scenario)},
            {"method", to_json(b.method)},
            {"matching", std::string(to_string(b.matching))},
            {"master_seed", b.master_seed},
            {"trials", b.trials},
            {"rmsce", b.rmsce},
            {"error_histogram", std::move(hist)},
            {"trial_errors", std::move(errors)},
            {"failed_trials", b.failed_trials},
            {"failures", std::move(failures)},
            {"total_iterations", b.total_iterations},
            {"total_ll_decreases", b.total_ll_decreases}};
  if (b.rmsce_best_permutation) j["rmsce_best_permutation"] = *b.rmsce_best_permutation;
  if (include_timing) j["mean_runtime_ms"] = b.mean_runtime_ms;
  return j;
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Run configuration

RunConfig run_config_from_json(const json& j) {
  ObjectReader r(j, "");
  RunConfig c;
  if (const auto* v = r.optional("scenario")) c.scenario = scenario_from_json(*v, "scenario");
  if (const auto* v = r.optional("fit")) c.fit = fit_config_from_json(*v, "fit");
  if (const auto* v = r.optional("seed")) c.seed = as_u64(*v, "seed");
  if (const auto* v = r.optional("trials")) {
    c.trials = as_int(*v, "trials");
    if (c.trials < 1) throw ConfigError("trials", "must be at least 1");
  }
  if (const auto* v = r.optional("matching")) {
    c.matching = matching_from_string(as_string(*v, "matching"));
  }
  if (const auto* v = r.optional("best_permutation")) c.best_permutation = as_bool(*v, "best_permutation");
  if (const auto* v = r.optional("threads")) {
    const int t = as_int(*v, "threads");
    if (t < 0) throw ConfigError("threads", "must be nonnegative");
    c.threads = static_cast<unsigned>(t);
  }
  if (const auto* v = r.optional("init")) {
    ObjectReader ir(*v, "init");
    const std::string kind = as_string(ir.required("kind"), "init.kind");
    if (kind == "Default") {
      ir.forbid("params", "only valid for kind UserSupplied");
    } else if (kind == "UserSupplied") {
      c.init = InitRecipe::user_supplied(mixture_params_from_json(ir.required("params"), "init.params"));
    } else {
      throw ConfigError("init.kind", fmt::format("unknown kind '{}' (expected Default or UserSupplied)", kind));
    }
    ir.finish();
  }
  c.init.seed = c.seed;
  if (const auto* v = r.optional("grid")) {
    ObjectReader gr(*v, "grid");
    const auto& scenarios = as_array(gr.required("scenarios"), "grid.scenarios");
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      const auto p = index_path("grid.scenarios", i);
      ObjectReader er(scenarios[i], p);
      c.grid_scenarios.push_back({as_string(er.required("label"), er.path("label")),
                                  scenario_from_json(er.required("scenario"), er.path("scenario"))});
      er.finish();
    }
    const auto& methods = as_array(gr.required("methods"), "grid.methods");
    for (std::size_t i = 0; i < methods.size(); ++i) {
      const auto p = index_path("grid.methods", i);
      ObjectReader er(methods[i], p);
      c.grid_methods.push_back({as_string(er.required("label"), er.path("label")),
                                fit_config_from_json(er.required("fit"), er.path("fit"))});
      er.finish();
    }
    gr.finish();
  }
  r.finish();
  if (c.init.kind == InitRecipe::Kind::UserSupplied && c.fit) {
    if (c.init.params->model() != c.fit->model_kind || c.init.params->num_classes() != c.fit->num_classes) {
      throw ConfigError("init.params", "model or class count does not match the fit section");
    }
  }
  return c;
}

json to_json(const RunConfig& c) {
  json j = json::object();
  if (c.scenario) j["scenario"] = to_json(*c.scenario);
  if (c.fit) j["fit"] = to_json(*c.fit);
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["matching"] = std::string(to_string(c.matching));
  j["best_permutation"] = c.best_permutation;
  j["threads"] = c.threads;
  if (c.init.kind == InitRecipe::Kind::UserSupplied) {
    j["init"] = {{"kind", "UserSupplied"}, {"params", to_json(*c.init.params)}};
  } else {
    j["init"] = {{"kind", "Default"}};
  }
  if (!c.grid_scenarios.empty() || !c.grid_methods.empty()) {
    json s = json::array();
    for (const auto& g : c.grid_scenarios) s.push_back({{"label", g.label}, {"scenario", to_json(g.scenario)}});
    json m = json::array();
    for (const auto& g : c.grid_methods) m.push_back({{"label", g.label}, {"fit", to_json(g.fit)}});
    j["grid"] = {{"scenarios", std::move(s)}, {"methods", std::move(m)}};
  }
  return j;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", fmt::format("cannot open '{}'", path.string()));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", fmt::format("{}: malformed JSON: {}", path.string(), e.what()));
  }
}

RunConfig parse_config(const std::filesystem::path& path) { return run_config_from_json(read_json_file(path)); }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw Error(fmt::format("write to '{}' failed", path.string()));
}

// ---------------------------------------------------------------------------
// Range profiles and labels

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <class T>
bool parse_number(std::string_view s, T& value) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

void write_range_profile(std::ostream& out, const SnapshotSet& z) {
  const json header = {{"layout", "csv-interleaved"}, {"n_bins", z.n_bins()}, {"n_channels", z.n_channels()}};
  out << header.dump() << '\n';
  for (Index k = 0; k < z.n_bins(); ++k) {
    for (Index i = 0; i < z.n_channels(); ++i) {
      if (i > 0) out << ',';
      out << format_double(z.data()(i, k).real()) << ',' << format_double(z.data()(i, k).imag());
    }
    out << '\n';
  }
}

void write_range_profile(const std::filesystem::path& path, const SnapshotSet& z) {
  std::ostringstream s;
  write_range_profile(s, z);
  write_text_file(path, s.str());
}

SnapshotSet read_range_profile(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataFormatError(1, "missing header line");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataFormatError(1, fmt::format("header is not valid JSON: {}", e.what()));
  }
  Index n = 0;
  Index K = 0;
  try {
    ObjectReader r(header, "header");
    if (as_string(r.required("layout"), "header.layout") != "csv-interleaved") {
      throw ConfigError("header.layout", "only csv-interleaved is supported");
    }
    n = as_int(r.required("n_channels"), "header.n_channels");
    K = as_int(r.required("n_bins"), "header.n_bins");
    r.finish();
  } catch (const ConfigError& e) {
    throw DataFormatError(1, e.what());
  }
  if (n < 1 || K < 1) throw DataFormatError(1, "n_channels and n_bins must be positive");

  CMatrix data(n, K);
  Index row = 0;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (row >= K) throw DataFormatError(line_no, fmt::format("more than n_bins = {} rows", K));
    const auto fields = split_csv(line);
    if (static_cast<Index>(fields.size()) != 2 * n) {
      throw DataFormatError(line_no, fmt::format("row {} has {} fields, expected {}", row + 1, fields.size(), 2 * n));
    }
    for (Index i = 0; i < n; ++i) {
      double re = 0.0;
      double im = 0.0;
      if (!parse_number(fields[2 * i], re) || !parse_number(fields[2 * i + 1], im)) {
        throw DataFormatError(line_no, fmt::format("row {} has a non-numeric field near column {}", row + 1, 2 * i + 1));
      }
      data(i, row) = {re, im};
    }
    ++row;
  }
  if (row != K) throw DataFormatError(0, fmt::format("header declares {} rows but the body has {}", K, row));
  return SnapshotSet(std::move(data));
}

SnapshotSet load_range_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataFormatError(0, fmt::format("cannot open '{}'", path.string()));
  return read_range_profile(in);
}

void write_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  std::string text = "bin_index,label\n";
  for (std::size_t k = 0; k < labels.size(); ++k) text += fmt::format("{},{}\n", k + 1, labels[k]);
  write_text_file(path, text);
}

std::vector<int> read_labels(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "bin_index,label") {
    throw DataFormatError(1, "expected header 'bin_index,label'");
  }
  std::vector<int> labels;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    int bin = 0;
    int label = 0;
    if (fields.size() != 2 || !parse_number(fields[0], bin) || !parse_number(fields[1], label)) {
      throw DataFormatError(line_no, "expected 'bin_index,label' integers");
    }
    if (bin != static_cast<int>(labels.size()) + 1) throw DataFormatError(line_no, "bin indices must be 1, 2, 3, ...");
    if (label < 1) throw DataFormatError(line_no, "labels must be positive");
    labels.push_back(label);
  }
  return labels;
}

std::vector<int> load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataFormatError(0, fmt::format("cannot open '{}'", path.string()));
  return read_labels(in);
}

}  // namespace clutter
