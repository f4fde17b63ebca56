#include "mtlbal/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "mtlbal/errors.hpp"

namespace mtlbal {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path, msg);
}

// Re-anchors ConfigErrors thrown by path-less helpers (the enum parsers)
// at the key being parsed.
template <typename F>
auto at_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
}

std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

void require_known_keys(const json& obj, const std::string& path,
                        const std::set<std::string>& known) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) fail(join_path(path, key), "unknown key");
  }
}

const json* get(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::uint64_t as_uint(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    fail(path, "expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::size_t as_size(const json& v, const std::string& path) {
  return static_cast<std::size_t>(as_uint(v, path));
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_double_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_double(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

BetaSchedule parse_beta_schedule(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object {kind, c}");
  require_known_keys(v, path, {"kind", "c"});
  BetaSchedule beta;
  if (const json* k = get(v, "kind")) {
    const std::string kpath = join_path(path, "kind");
    beta.kind = at_path(kpath, [&] { return parse_beta_kind(as_string(*k, kpath)); });
  }
  if (const json* c = get(v, "c")) {
    beta.c = as_double(*c, join_path(path, "c"));
  }
  const std::string c_path = join_path(path, "c");
  if (beta.kind == BetaKind::constant) {
    if (beta.c < 0.0 || beta.c >= 1.0) {
      fail(c_path, "constant schedule needs c in [0, 1)");
    }
  } else if (!(beta.c > 0.0)) {
    fail(c_path, "inv_sqrt schedule needs c > 0");
  }
  return beta;
}

TaskSpec parse_task(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
  TaskSpec spec;
  if (const json* k = get(v, "kind")) {
    const std::string kpath = join_path(path, "kind");
    spec.kind = at_path(kpath, [&] { return parse_task_kind(as_string(*k, kpath)); });
  }

  if (spec.kind == TaskKind::scaled_quadratic_pair) {
    require_known_keys(v, path,
                       {"kind", "dim", "centers", "scales", "offset", "noise_std"});
    if (const json* d = get(v, "dim")) {
      spec.dim = as_size(*d, join_path(path, "dim"));
    }
    if (spec.dim == 0) fail(join_path(path, "dim"), "must be >= 1");

    if (const json* c = get(v, "centers")) {
      const std::string cpath = join_path(path, "centers");
      if (!c->is_array() || c->size() != 2) {
        fail(cpath, "expected an array of exactly 2 center vectors");
      }
      spec.centers = {as_double_array((*c)[0], cpath + "[0]"),
                      as_double_array((*c)[1], cpath + "[1]")};
      for (int i = 0; i < 2; ++i) {
        if (spec.centers[i].size() != spec.dim) {
          fail(cpath + "[" + std::to_string(i) + "]",
               "center length must equal dim");
        }
      }
    } else {
      // default: -e1 and +e1
      spec.centers.assign(2, std::vector<double>(spec.dim, 0.0));
      spec.centers[0][0] = -1.0;
      spec.centers[1][0] = 1.0;
    }

    spec.scales = {1.0, 1.0};
    if (const json* s = get(v, "scales")) {
      spec.scales = as_double_array(*s, join_path(path, "scales"));
      if (spec.scales.size() != 2) {
        fail(join_path(path, "scales"), "expected exactly 2 scales");
      }
    }
    if (const json* o = get(v, "offset")) {
      spec.offset = as_double(*o, join_path(path, "offset"));
    }
    if (!(spec.offset > 0.0)) fail(join_path(path, "offset"), "must be > 0");
    if (const json* n = get(v, "noise_std")) {
      spec.noise_std = as_double(*n, join_path(path, "noise_std"));
    }
    if (spec.noise_std < 0.0) fail(join_path(path, "noise_std"), "must be >= 0");
  } else {
    require_known_keys(v, path,
                       {"kind", "tasks", "input_dim", "hidden",
                        "samples_per_task", "scales", "data_seed"});
    if (const json* t = get(v, "tasks")) {
      spec.task_count = as_size(*t, join_path(path, "tasks"));
    }
    if (spec.task_count == 0) fail(join_path(path, "tasks"), "must be >= 1");
    if (const json* d = get(v, "input_dim")) {
      spec.input_dim = as_size(*d, join_path(path, "input_dim"));
    }
    if (spec.input_dim == 0) fail(join_path(path, "input_dim"), "must be >= 1");
    if (const json* h = get(v, "hidden")) {
      spec.hidden = as_size(*h, join_path(path, "hidden"));
    }
    if (spec.hidden == 0) fail(join_path(path, "hidden"), "must be >= 1");
    if (const json* s = get(v, "samples_per_task")) {
      spec.samples_per_task = as_size(*s, join_path(path, "samples_per_task"));
    }
    if (spec.samples_per_task == 0) {
      fail(join_path(path, "samples_per_task"), "must be >= 1");
    }
    if (const json* ds = get(v, "data_seed")) {
      spec.data_seed = as_uint(*ds, join_path(path, "data_seed"));
    }
    spec.scales.assign(spec.task_count, 1.0);
    if (const json* s = get(v, "scales")) {
      spec.scales = as_double_array(*s, join_path(path, "scales"));
      if (spec.scales.size() != spec.task_count) {
        fail(join_path(path, "scales"), "scales length must equal tasks");
      }
    }
  }

  for (std::size_t i = 0; i < spec.scales.size(); ++i) {
    if (!(spec.scales[i] > 0.0)) {
      fail(join_path(path, "scales") + "[" + std::to_string(i) + "]",
           "must be > 0");
    }
  }
  return spec;
}

TrainConfig parse_train(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
  require_known_keys(v, path,
                     {"method", "alpha", "beta", "lr", "lr_halve_at", "steps",
                      "batch_size", "seed", "init_scale"});
  TrainConfig train;
  if (const json* m = get(v, "method")) {
    const std::string mpath = join_path(path, "method");
    train.method = at_path(mpath, [&] { return parse_method(as_string(*m, mpath)); });
  }
  if (const json* a = get(v, "alpha")) {
    const std::string apath = join_path(path, "alpha");
    train.alpha = at_path(apath, [&] { return parse_alpha(as_string(*a, apath)); });
  }
  if (const json* b = get(v, "beta")) {
    train.beta = parse_beta_schedule(*b, join_path(path, "beta"));
  }
  if (const json* lr = get(v, "lr")) {
    train.lr = as_double(*lr, join_path(path, "lr"));
  }
  if (!(train.lr > 0.0)) fail(join_path(path, "lr"), "must be > 0");
  if (const json* h = get(v, "lr_halve_at")) {
    train.lr_halve_at = as_size(*h, join_path(path, "lr_halve_at"));
  }
  if (const json* s = get(v, "steps")) {
    train.steps = as_size(*s, join_path(path, "steps"));
  }
  if (train.steps == 0) fail(join_path(path, "steps"), "must be >= 1");
  if (const json* b = get(v, "batch_size")) {
    train.batch_size = as_size(*b, join_path(path, "batch_size"));
  }
  if (train.batch_size == 0) fail(join_path(path, "batch_size"), "must be >= 1");
  if (const json* s = get(v, "seed")) {
    train.seed = as_uint(*s, join_path(path, "seed"));
  }
  if (const json* i = get(v, "init_scale")) {
    train.init_scale = as_double(*i, join_path(path, "init_scale"));
  }
  if (!(train.init_scale > 0.0)) {
    fail(join_path(path, "init_scale"), "must be > 0");
  }
  return train;
}

SweepAxes parse_sweep(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
  require_known_keys(v, path, {"method", "alpha", "beta"});
  SweepAxes sweep;
  if (const json* m = get(v, "method")) {
    const std::string mpath = join_path(path, "method");
    if (!m->is_array() || m->empty()) fail(mpath, "expected a nonempty array");
    for (std::size_t i = 0; i < m->size(); ++i) {
      const std::string ipath = mpath + "[" + std::to_string(i) + "]";
      sweep.method.push_back(
          at_path(ipath, [&] { return parse_method(as_string((*m)[i], ipath)); }));
    }
  }
  if (const json* a = get(v, "alpha")) {
    const std::string apath = join_path(path, "alpha");
    if (!a->is_array() || a->empty()) fail(apath, "expected a nonempty array");
    for (std::size_t i = 0; i < a->size(); ++i) {
      const std::string ipath = apath + "[" + std::to_string(i) + "]";
      sweep.alpha.push_back(
          at_path(ipath, [&] { return parse_alpha(as_string((*a)[i], ipath)); }));
    }
  }
  if (const json* b = get(v, "beta")) {
    const std::string bpath = join_path(path, "beta");
    if (!b->is_array() || b->empty()) fail(bpath, "expected a nonempty array");
    for (std::size_t i = 0; i < b->size(); ++i) {
      sweep.beta.push_back(
          parse_beta_schedule((*b)[i], bpath + "[" + std::to_string(i) + "]"));
    }
  }
  return sweep;
}

json render_beta(const BetaSchedule& beta) {
  return json{{"kind", beta_kind_name(beta.kind)}, {"c", beta.c}};
}

}  // namespace

TaskSet make_task_set(const TaskSpec& spec) {
  if (spec.kind == TaskKind::scaled_quadratic_pair) {
    std::vector<std::vector<double>> centers = spec.centers;
    if (centers.empty()) {
      centers.assign(2, std::vector<double>(spec.dim, 0.0));
      centers[0][0] = -1.0;
      centers[1][0] = 1.0;
    }
    std::vector<double> scales =
        spec.scales.empty() ? std::vector<double>{1.0, 1.0} : spec.scales;
    return TaskSet::make_scaled_quadratic_pair(
        spec.dim, {RealVector(centers[0]), RealVector(centers[1])},
        {scales[0], scales[1]}, spec.offset, spec.noise_std);
  }
  std::vector<double> scales = spec.scales.empty()
                                   ? std::vector<double>(spec.task_count, 1.0)
                                   : spec.scales;
  return TaskSet::make_mlp_regression(spec.task_count, spec.input_dim,
                                      spec.hidden, spec.samples_per_task,
                                      scales, spec.data_seed);
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("", std::string("syntax error: ") + e.what());
  }
  if (!root.is_object()) fail("", "top level must be an object");
  require_known_keys(root, "", {"task", "train", "seeds", "out", "sweep"});

  ExperimentConfig config;
  if (const json* t = get(root, "task")) {
    config.task = parse_task(*t, "task");
  } else {
    config.task = parse_task(json::object(), "task");
  }
  if (const json* t = get(root, "train")) {
    config.train = parse_train(*t, "train");
  }
  if (const json* s = get(root, "seeds")) {
    if (!s->is_array() || s->empty()) fail("seeds", "expected a nonempty array");
    config.seeds.clear();
    for (std::size_t i = 0; i < s->size(); ++i) {
      config.seeds.push_back(as_uint((*s)[i], "seeds[" + std::to_string(i) + "]"));
    }
  }
  if (const json* o = get(root, "out")) {
    config.out_dir = as_string(*o, "out");
  }
  if (const json* sw = get(root, "sweep")) {
    config.sweep = parse_sweep(*sw, "sweep");
  }
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("", "cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string render_config(const ExperimentConfig& config) {
  json task;
  task["kind"] = task_kind_name(config.task.kind);
  if (config.task.kind == TaskKind::scaled_quadratic_pair) {
    task["dim"] = config.task.dim;
    task["centers"] = config.task.centers;
    task["scales"] = config.task.scales;
    task["offset"] = config.task.offset;
    task["noise_std"] = config.task.noise_std;
  } else {
    task["tasks"] = config.task.task_count;
    task["input_dim"] = config.task.input_dim;
    task["hidden"] = config.task.hidden;
    task["samples_per_task"] = config.task.samples_per_task;
    task["scales"] = config.task.scales;
    task["data_seed"] = config.task.data_seed;
  }

  json train;
  train["method"] = method_name(config.train.method);
  train["alpha"] = alpha_name(config.train.alpha);
  train["beta"] = render_beta(config.train.beta);
  train["lr"] = config.train.lr;
  if (config.train.lr_halve_at) train["lr_halve_at"] = *config.train.lr_halve_at;
  train["steps"] = config.train.steps;
  train["batch_size"] = config.train.batch_size;
  train["seed"] = config.train.seed;
  train["init_scale"] = config.train.init_scale;

  json root;
  root["task"] = task;
  root["train"] = train;
  root["seeds"] = config.seeds;
  root["out"] = config.out_dir;
  if (!config.sweep.empty()) {
    json sweep = json::object();
    if (!config.sweep.method.empty()) {
      json arr = json::array();
      for (Method m : config.sweep.method) arr.push_back(method_name(m));
      sweep["method"] = arr;
    }
    if (!config.sweep.alpha.empty()) {
      json arr = json::array();
      for (AlphaStrategy a : config.sweep.alpha) arr.push_back(alpha_name(a));
      sweep["alpha"] = arr;
    }
    if (!config.sweep.beta.empty()) {
      json arr = json::array();
      for (const BetaSchedule& b : config.sweep.beta) arr.push_back(render_beta(b));
      sweep["beta"] = arr;
    }
    root["sweep"] = sweep;
  }
  return root.dump(2) + "\n";
}

Method parse_method(const std::string& s) {
  if (s == "ew") return Method::ew;
  if (s == "lw") return Method::lw;
  if (s == "rlw") return Method::rlw;
  if (s == "gls") return Method::gls;
  if (s == "pcgrad") return Method::pcgrad;
  if (s == "si_g") return Method::si_g;
  if (s == "si_mtl") return Method::si_mtl;
  throw ConfigError("", "unknown method '" + s +
                            "' (expected ew|lw|rlw|gls|pcgrad|si_g|si_mtl)");
}

AlphaStrategy parse_alpha(const std::string& s) {
  if (s == "max") return AlphaStrategy::max;
  if (s == "min") return AlphaStrategy::min;
  if (s == "mean") return AlphaStrategy::mean;
  if (s == "median") return AlphaStrategy::median;
  if (s == "constant_inv_t") return AlphaStrategy::constant_inv_t;
  throw ConfigError("", "unknown alpha strategy '" + s +
                            "' (expected max|min|mean|median|constant_inv_t)");
}

BetaKind parse_beta_kind(const std::string& s) {
  if (s == "constant") return BetaKind::constant;
  if (s == "inv_sqrt") return BetaKind::inv_sqrt;
  throw ConfigError("", "unknown beta kind '" + s +
                            "' (expected constant|inv_sqrt)");
}

TaskKind parse_task_kind(const std::string& s) {
  if (s == "quadratic_pair") return TaskKind::scaled_quadratic_pair;
  if (s == "mlp_regression") return TaskKind::mlp_regression;
  throw ConfigError("", "unknown task kind '" + s +
                            "' (expected quadratic_pair|mlp_regression)");
}

const char* alpha_name(AlphaStrategy a) {
  switch (a) {
    case AlphaStrategy::max: return "max";
    case AlphaStrategy::min: return "min";
    case AlphaStrategy::mean: return "mean";
    case AlphaStrategy::median: return "median";
    case AlphaStrategy::constant_inv_t: return "constant_inv_t";
  }
  return "?";
}

const char* beta_kind_name(BetaKind k) {
  return k == BetaKind::constant ? "constant" : "inv_sqrt";
}

const char* task_kind_name(TaskKind k) {
  return k == TaskKind::scaled_quadratic_pair ? "quadratic_pair"
                                              : "mlp_regression";
}

}  // namespace mtlbal
