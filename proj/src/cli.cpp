// Copyright 2026 The theta-kernels Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "theta_kernels/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "theta_kernels/errors.hpp"
#include "theta_kernels/gp.hpp"
#include "theta_kernels/io.hpp"
#include "theta_kernels/kernel.hpp"
#include "theta_kernels/mlp.hpp"

namespace theta_kernels {

namespace {

using nlohmann::json;

// Everything a subcommand may read. Config values fill what flags leave unset.
struct Settings {
  std::optional<double> theta, a, c, q, r;
  std::optional<std::string> regime;

  std::optional<std::string> kind;
  std::optional<std::int64_t> depth;
  std::optional<std::vector<double>> c_sequence;
  std::optional<std::vector<std::string>> layers;

  std::optional<std::string> act_source, act_name;
  std::optional<int> k_max;
  std::optional<double> slope;
  std::optional<std::vector<std::string>> activations;

  std::optional<std::vector<std::size_t>> widths, study_widths;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> sampler;
  std::optional<unsigned> threads;

  std::optional<double> noise;

  std::optional<std::string> out_path, format;

  // Flag-only inputs.
  std::optional<std::vector<double>> s, x, z;
  std::optional<std::int64_t> n;
  std::optional<double> rho, x_min, x_max, step, c_sum;
  std::optional<int> m;
  std::optional<std::string> coeffs, curve, points, train, query, model, sum, figure;
  std::optional<std::string> config;
};

template <class T>
void fill(std::optional<T>& dst, const std::optional<T>& src) {
  if (!dst && src) dst = src;
}

void merge(Settings& flags, const Settings& cfg) {
  fill(flags.theta, cfg.theta);
  fill(flags.a, cfg.a);
  fill(flags.c, cfg.c);
  fill(flags.q, cfg.q);
  fill(flags.r, cfg.r);
  fill(flags.regime, cfg.regime);
  fill(flags.kind, cfg.kind);
  fill(flags.depth, cfg.depth);
  fill(flags.c_sequence, cfg.c_sequence);
  fill(flags.layers, cfg.layers);
  fill(flags.act_source, cfg.act_source);
  fill(flags.act_name, cfg.act_name);
  fill(flags.k_max, cfg.k_max);
  fill(flags.slope, cfg.slope);
  fill(flags.widths, cfg.widths);
  fill(flags.study_widths, cfg.study_widths);
  fill(flags.samples, cfg.samples);
  fill(flags.seed, cfg.seed);
  fill(flags.sampler, cfg.sampler);
  fill(flags.threads, cfg.threads);
  fill(flags.noise, cfg.noise);
  fill(flags.out_path, cfg.out_path);
  fill(flags.format, cfg.format);
}

// ---------------------------------------------------------------- config

void check_keys(const json& section, std::string_view name,
                std::initializer_list<std::string_view> allowed) {
  if (!section.is_object()) throw ValidationError(fmt::format("config section '{}' must be an object", name));
  for (const auto& item : section.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ValidationError(fmt::format("unknown config key '{}.{}'", name, item.key()));
    }
  }
}

template <class T>
void read_key(const json& section, std::string_view section_name, const char* key,
              std::optional<T>& dst) {
  if (!section.contains(key)) return;
  try {
    dst = section.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(fmt::format("config key '{}.{}' has the wrong type", section_name, key));
  }
}

std::string layer_to_string(const json& layer) {
  check_keys(layer, "kernel.layers[]", {"theta", "a", "c", "q", "r"});
  std::string spec;
  for (const char* key : {"theta", "a", "c", "q", "r"}) {
    if (!layer.contains(key)) continue;
    if (!layer[key].is_number()) throw ValidationError(fmt::format("kernel.layers[].{} must be a number", key));
    if (!spec.empty()) spec += ',';
    spec += fmt::format("{}={}", key, format_number(layer[key].get<double>()));
  }
  return spec;
}

Settings load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot open config '{}'", path));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("config '{}' is not valid JSON: {}", path, e.what()));
  }
  check_keys(doc, "config", {"pgf", "kernel", "activation", "mlp", "gp", "output"});
  Settings s;
  if (doc.contains("pgf")) {
    const json& p = doc["pgf"];
    check_keys(p, "pgf", {"theta", "a", "c", "q", "r", "regime"});
    read_key(p, "pgf", "theta", s.theta);
    read_key(p, "pgf", "a", s.a);
    read_key(p, "pgf", "c", s.c);
    read_key(p, "pgf", "q", s.q);
    read_key(p, "pgf", "r", s.r);
    read_key(p, "pgf", "regime", s.regime);
  }
  if (doc.contains("kernel")) {
    const json& k = doc["kernel"];
    check_keys(k, "kernel", {"kind", "depth", "c_sequence", "layers"});
    read_key(k, "kernel", "kind", s.kind);
    read_key(k, "kernel", "depth", s.depth);
    read_key(k, "kernel", "c_sequence", s.c_sequence);
    if (k.contains("layers")) {
      if (!k["layers"].is_array()) throw ValidationError("kernel.layers must be an array");
      std::vector<std::string> layers;
      for (const auto& layer : k["layers"]) layers.push_back(layer_to_string(layer));
      s.layers = std::move(layers);
    }
  }
  if (doc.contains("activation")) {
    const json& act = doc["activation"];
    check_keys(act, "activation", {"source", "name", "k_max", "slope"});
    read_key(act, "activation", "source", s.act_source);
    read_key(act, "activation", "name", s.act_name);
    read_key(act, "activation", "k_max", s.k_max);
    read_key(act, "activation", "slope", s.slope);
  }
  if (doc.contains("mlp")) {
    const json& mlp = doc["mlp"];
    check_keys(mlp, "mlp", {"widths", "samples", "seed", "study_widths", "sampler", "threads"});
    read_key(mlp, "mlp", "widths", s.widths);
    read_key(mlp, "mlp", "samples", s.samples);
    read_key(mlp, "mlp", "seed", s.seed);
    read_key(mlp, "mlp", "study_widths", s.study_widths);
    read_key(mlp, "mlp", "sampler", s.sampler);
    read_key(mlp, "mlp", "threads", s.threads);
  }
  if (doc.contains("gp")) {
    check_keys(doc["gp"], "gp", {"noise"});
    read_key(doc["gp"], "gp", "noise", s.noise);
  }
  if (doc.contains("output")) {
    check_keys(doc["output"], "output", {"path", "format"});
    read_key(doc["output"], "output", "path", s.out_path);
    read_key(doc["output"], "output", "format", s.format);
  }
  return s;
}

// ---------------------------------------------------------------- builders

template <class T>
const T& require(const std::optional<T>& v, std::string_view flag) {
  if (!v) throw ValidationError(fmt::format("missing required option --{}", flag));
  return *v;
}

Regime parse_regime(const std::string& name) {
  for (Regime r : {Regime::kMainSuper, Regime::kMainSub1, Regime::kMainSubR, Regime::kZero1,
                   Regime::kZeroR, Regime::kMinusOne}) {
    if (name == to_string(r)) return r;
  }
  throw ValidationError(fmt::format("unknown regime '{}'", name));
}

ThetaParams pgf_params(const Settings& s) {
  ThetaParams p;
  p.theta = require(s.theta, "theta");
  p.a = require(s.a, "a");
  p.c = s.c;
  p.q = s.q;
  p.r = s.r.value_or(1.0);
  if (s.regime) p.regime = parse_regime(*s.regime);
  return p;
}

// "theta=1,a=0.5,c=0.2,r=1"
ThetaParams parse_layer(const std::string& text) {
  ThetaParams p;
  bool have_theta = false, have_a = false;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError(fmt::format("bad --pgf entry '{}'", item));
    const std::string key = item.substr(0, eq);
    const auto values = parse_number_list(item.substr(eq + 1));
    if (values.size() != 1) throw ValidationError(fmt::format("bad --pgf value in '{}'", item));
    const double v = values.front();
    if (key == "theta") {
      p.theta = v;
      have_theta = true;
    } else if (key == "a") {
      p.a = v;
      have_a = true;
    } else if (key == "c") {
      p.c = v;
    } else if (key == "q") {
      p.q = v;
    } else if (key == "r") {
      p.r = v;
    } else {
      throw ValidationError(fmt::format("unknown --pgf key '{}'", key));
    }
  }
  if (!have_theta || !have_a) throw ValidationError(fmt::format("--pgf '{}' needs theta and a", text));
  return p;
}

// Serializable kernel description; KernelSpec itself does not keep parameters.
struct KernelDescription {
  std::string kind = "pure";
  std::int64_t depth = 1;
  std::vector<ThetaParams> layers;
  double theta = 1.0;
  std::vector<double> c;

  KernelSpec build() const {
    if (kind == "pure") {
      if (layers.size() != 1) throw ValidationError("pure kernel needs exactly one PGF");
      return KernelSpec::pure(make_theta_pgf(layers.front()), depth);
    }
    if (kind == "mixed") {
      std::vector<Pgf> fs;
      for (const auto& p : layers) fs.push_back(make_theta_pgf(p));
      return KernelSpec::mixed(std::move(fs));
    }
    if (kind == "cmixed") return KernelSpec::cmixed(theta, c);
    throw ValidationError(fmt::format("unknown kernel kind '{}'", kind));
  }
};

KernelDescription kernel_description(const Settings& s) {
  KernelDescription d;
  d.kind = s.kind.value_or("pure");
  if (d.kind == "pure") {
    d.depth = s.depth.value_or(1);
    d.layers = {pgf_params(s)};
  } else if (d.kind == "mixed") {
    for (const auto& text : require(s.layers, "pgf")) d.layers.push_back(parse_layer(text));
  } else if (d.kind == "cmixed") {
    d.theta = require(s.theta, "theta");
    d.c = require(s.c_sequence, "c");
  } else {
    throw ValidationError(fmt::format("unknown kernel kind '{}'", d.kind));
  }
  return d;
}

json params_to_json(const ThetaParams& p) {
  json j{{"theta", p.theta}, {"a", p.a}, {"r", p.r}};
  if (p.c) j["c"] = *p.c;
  if (p.q) j["q"] = *p.q;
  return j;
}

ThetaParams params_from_json(const json& j) {
  check_keys(j, "model.kernel.layers[]", {"theta", "a", "c", "q", "r"});
  ThetaParams p;
  p.theta = j.at("theta").get<double>();
  p.a = j.at("a").get<double>();
  p.r = j.value("r", 1.0);
  if (j.contains("c")) p.c = j["c"].get<double>();
  if (j.contains("q")) p.q = j["q"].get<double>();
  return p;
}

json kernel_to_json(const KernelDescription& d) {
  json j{{"kind", d.kind}};
  if (d.kind == "cmixed") {
    j["theta"] = d.theta;
    j["c_sequence"] = d.c;
  } else {
    j["depth"] = d.depth;
    j["layers"] = json::array();
    for (const auto& p : d.layers) j["layers"].push_back(params_to_json(p));
  }
  return j;
}

KernelDescription kernel_from_json(const json& j) {
  check_keys(j, "model.kernel", {"kind", "depth", "layers", "theta", "c_sequence"});
  KernelDescription d;
  d.kind = j.at("kind").get<std::string>();
  if (d.kind == "cmixed") {
    d.theta = j.at("theta").get<double>();
    d.c = j.at("c_sequence").get<std::vector<double>>();
  } else {
    d.depth = j.value("depth", std::int64_t{1});
    for (const auto& p : j.at("layers")) d.layers.push_back(params_from_json(p));
  }
  return d;
}

std::vector<double> last_column(const CsvTable& table) {
  std::vector<double> v;
  for (const auto& row : table.rows) {
    if (row.empty()) throw ValidationError("empty CSV row");
    v.push_back(row.back());
  }
  return v;
}

// "linear", "relu", "prelu" (slope from --slope), "prelu:0.25", or "theta".
Activation named_activation(const std::string& name, const Settings& s) {
  if (name == "linear") return Activation::linear();
  if (name == "relu") return Activation::relu();
  if (name.rfind("prelu", 0) == 0) {
    if (name.size() > 6 && name[5] == ':') {
      const auto v = parse_number_list(name.substr(6));
      if (v.size() != 1) throw ValidationError(fmt::format("bad activation '{}'", name));
      return Activation::prelu(v.front());
    }
    if (name == "prelu") return Activation::prelu(s.slope.value_or(0.25));
  }
  if (name == "theta") {
    return activation_from_coefficients(theta_coefficients(pgf_params(s), s.k_max.value_or(kDefaultHermiteOrder)));
  }
  throw ValidationError(fmt::format("unknown activation '{}'", name));
}

// Activation for activation-curve and activation-to-pgf.
Activation source_activation(const Settings& s) {
  if (s.coeffs) return activation_from_coefficients(last_column(read_csv_file(*s.coeffs)));
  const std::string source = s.act_source.value_or(s.act_name ? "reference" : "theta");
  if (source == "theta") return named_activation("theta", s);
  if (source == "reference") return named_activation(require(s.act_name, "activation"), s);
  throw ValidationError(fmt::format("unknown activation source '{}'", source));
}

double rho_from(const Settings& s) {
  if (s.rho) {
    if (s.x || s.z) throw ValidationError("give either --rho or --x/--z");
    return *s.rho;
  }
  return correlation(require(s.x, "x"), require(s.z, "z"));
}

void write_to(const Settings& s, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
  if (!s.out_path) {
    body(fallback);
    return;
  }
  std::ofstream file(*s.out_path);
  if (!file) throw ValidationError(fmt::format("cannot write '{}'", *s.out_path));
  body(file);
  if (!file) throw ValidationError(fmt::format("error writing '{}'", *s.out_path));
}

void write_coefficients(std::ostream& os, std::span<const double> p) {
  os << "k,p\n";
  for (std::size_t k = 0; k < p.size(); ++k) os << k << ',' << format_number(p[k]) << '\n';
}

// ---------------------------------------------------------------- commands

void cmd_pgf_eval(const Settings& s, std::ostream& out) {
  const Pgf f = make_theta_pgf(pgf_params(s));
  for (double v : require(s.s, "s")) out << format_number(pgf_eval(f, v)) << '\n';
}

void cmd_pgf_iterate(const Settings& s, std::ostream& out) {
  const Pgf f = pgf_iterate_closed(make_theta_pgf(pgf_params(s)), require(s.n, "n"));
  for (double v : require(s.s, "s")) out << format_number(pgf_eval(f, v)) << '\n';
}

void cmd_pgf_coeffs(const Settings& s, std::ostream& out) {
  const auto p = theta_coefficients(pgf_params(s), s.k_max.value_or(30));
  write_to(s, out, [&](std::ostream& os) { write_coefficients(os, p); });
}

void cmd_activation_curve(const Settings& s, std::ostream& out) {
  const Activation act = source_activation(s);
  write_to(s, out, [&](std::ostream& os) {
    write_activation_curve(os, act, s.x_min.value_or(-3.0), s.x_max.value_or(3.0), s.step.value_or(0.01));
  });
}

void cmd_activation_to_pgf(const Settings& s, std::ostream& out) {
  const int k_max = s.k_max.value_or(30);
  std::vector<double> p;
  if (s.curve) {
    const CsvTable table = read_csv_file(*s.curve);
    std::vector<double> xs, phis;
    for (const auto& row : table.rows) {
      if (row.size() != 2) throw ValidationError("curve CSV needs columns x,phi");
      xs.push_back(row[0]);
      phis.push_back(row[1]);
    }
    p = tabulated_activation_to_pgf(xs, phis, k_max);
  } else {
    p = activation_to_pgf(source_activation(s), k_max);
  }
  write_to(s, out, [&](std::ostream& os) { write_coefficients(os, p); });
}

void cmd_kernel_eval(const Settings& s, std::ostream& out) {
  const KernelSpec spec = kernel_description(s).build();
  out << format_number(spec.at(rho_from(s))) << '\n';
}

void cmd_kernel_gram(const Settings& s, std::ostream& out) {
  const KernelSpec spec = kernel_description(s).build();
  const auto points = read_csv_file(require(s.points, "points")).rows;
  const Eigen::MatrixXd g = gram(spec, points);
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < g.cols(); ++j) header.push_back(fmt::format("k{}", j));
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(g.rows()));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) rows[static_cast<std::size_t>(i)].push_back(g(i, j));
  }
  write_to(s, out, [&](std::ostream& os) { write_csv(os, header, rows); });
}

void cmd_kernel_limit(const Settings& s, std::ostream& out) {
  const double rho = require(s.rho, "rho");
  const std::string kind = s.kind.value_or("pure");
  double value = 0.0;
  if (kind == "pure") {
    value = kernel_limit(make_theta_pgf(pgf_params(s)), rho);
  } else if (kind == "cmixed") {
    CMixedLimit spec;
    spec.theta = require(s.theta, "theta");
    const std::string sum = s.sum.value_or(s.c_sum ? "converges" : "unknown");
    if (sum == "converges") {
      spec.behavior = SumBehavior::kConverges;
      spec.c_sum = require(s.c_sum, "c-sum");
    } else if (sum == "diverges") {
      spec.behavior = SumBehavior::kDiverges;
    } else if (sum == "unknown") {
      spec.behavior = SumBehavior::kUnknown;
    } else {
      throw ValidationError(fmt::format("--sum must be converges, diverges or unknown, got '{}'", sum));
    }
    value = kernel_limit(spec, rho);
  } else {
    throw ValidationError(fmt::format("kernel-limit supports kinds pure and cmixed, got '{}'", kind));
  }
  out << format_number(value) << '\n';
}

void cmd_kernel_eigen(const Settings& s, std::ostream& out) {
  const KernelSpec spec = kernel_description(s).build();
  const Eigensystem sys = eigensystem(spec, require(s.m, "m"), s.k_max.value_or(30));
  write_to(s, out, [&](std::ostream& os) {
    os << "k,p,lambda,multiplicity\n";
    for (const auto& e : sys.entries) {
      os << e.k << ',' << format_number(e.p) << ',' << format_number(e.lambda) << ','
         << e.multiplicity << '\n';
    }
  });
}

void cmd_mlp_study(const Settings& s, std::ostream& out) {
  std::vector<Activation> acts;
  for (const auto& name : s.activations.value_or(std::vector<std::string>{s.act_name.value_or("relu")})) {
    acts.push_back(named_activation(name, s));
  }
  std::vector<std::size_t> widths;
  if (s.widths) {
    widths = *s.widths;
  } else {
    const std::size_t hidden = acts.size() > 1 ? acts.size() : static_cast<std::size_t>(s.depth.value_or(2));
    widths.assign(hidden + 2, 1);
    widths.front() = 2;
  }
  const MlpConfig base = acts.size() == 1 ? MlpConfig::pure(widths, acts.front(), s.seed.value_or(0))
                                          : MlpConfig::mixed(widths, acts, s.seed.value_or(0));
  std::vector<double> x, z;
  if (s.x || s.z) {
    x = require(s.x, "x");
    z = require(s.z, "z");
  } else {
    const double rho = s.rho.value_or(0.5);
    if (!(rho >= -1.0 && rho <= 1.0)) throw DomainError(fmt::format("rho {} outside [-1, 1]", rho));
    x.assign(widths.front(), 0.0);
    z.assign(widths.front(), 0.0);
    if (x.size() < 2) throw DimensionMismatch("input width must be >= 2 to realize a correlation");
    x[0] = 1.0;
    z[0] = rho;
    z[1] = std::sqrt(1.0 - rho * rho);
  }
  EstimateOptions options;
  const std::string sampler = s.sampler.value_or("pairwise");
  if (sampler == "pairwise") {
    options.sampler = Sampler::kPairwise;
  } else if (sampler == "full") {
    options.sampler = Sampler::kFullWeights;
  } else {
    throw ValidationError(fmt::format("unknown sampler '{}'", sampler));
  }
  options.threads = s.threads.value_or(0);
  const auto study_widths = s.study_widths.value_or(std::vector<std::size_t>{64, 256, 1024});
  const StudyReport report =
      convergence_study(base, study_widths, x, z, s.samples.value_or(20000), options);
  const std::string format = s.format.value_or("csv");
  if (format != "csv" && format != "json") throw ValidationError(fmt::format("unknown format '{}'", format));
  write_to(s, out, [&](std::ostream& os) {
    if (format == "csv") {
      write_study_csv(os, report);
    } else {
      write_study_json(os, report);
    }
  });
}

void cmd_gp_fit(const Settings& s, std::ostream& out, std::ostream& err) {
  const KernelDescription desc = kernel_description(s);
  std::ifstream in(require(s.train, "train"));
  if (!in) throw ValidationError(fmt::format("cannot open '{}'", *s.train));
  const TrainingData data = read_training_csv(in);
  const double noise = s.noise.value_or(0.0);
  const GpModel model = fit(desc.build(), data.inputs, data.targets, noise);
  if (model.jitter_rescued()) {
    err << fmt::format("warning: Gram matrix needed jitter {}\n", format_number(model.jitter()));
  }
  json doc{{"kernel", kernel_to_json(desc)},
           {"noise", noise},
           {"inputs", data.inputs},
           {"targets", data.targets},
           {"jitter", model.jitter()},
           {"jitter_level", model.jitter_level()},
           {"jitter_rescued", model.jitter_rescued()}};
  write_to(s, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
}

void cmd_gp_predict(const Settings& s, std::ostream& out, std::ostream& err) {
  std::ifstream model_in(require(s.model, "model"));
  if (!model_in) throw ValidationError(fmt::format("cannot open '{}'", *s.model));
  json doc;
  try {
    doc = json::parse(model_in);
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("model is not valid JSON: {}", e.what()));
  }
  check_keys(doc, "model", {"kernel", "noise", "inputs", "targets", "jitter", "jitter_level", "jitter_rescued"});
  const KernelDescription desc = kernel_from_json(doc.at("kernel"));
  const GpModel model = fit(desc.build(), doc.at("inputs").get<std::vector<std::vector<double>>>(),
                            doc.at("targets").get<std::vector<double>>(), doc.at("noise").get<double>());
  std::ifstream query_in(require(s.query, "query"));
  if (!query_in) throw ValidationError(fmt::format("cannot open '{}'", *s.query));
  const GpPrediction prediction = predict(model, read_query_csv(query_in));
  if (prediction.clamped > 0) err << fmt::format("note: {} variances clamped at 0\n", prediction.clamped);
  write_to(s, out, [&](std::ostream& os) { write_prediction_csv(os, prediction); });
}

void cmd_reproduce_fig1(const Settings& s, std::ostream& out) {
  const FigureCurve curve = figure1_curve(require(s.figure, "case"), s.k_max.value_or(kDefaultHermiteOrder));
  write_to(s, out, [&](std::ostream& os) {
    os << "x,theta_phi,reference\n";
    for (std::size_t i = 0; i < curve.xs.size(); ++i) {
      os << format_number(curve.xs[i]) << ',' << format_number(curve.theta_phi[i]) << ','
         << format_number(curve.reference_phi[i]) << '\n';
    }
  });
  if (s.out_path) out << "sup_distance " << format_number(curve.sup_distance) << '\n';
}

// ---------------------------------------------------------------- wiring

template <class T>
CLI::Option* option(CLI::App* app, const std::string& name, std::optional<T>& dst,
                    const std::string& help) {
  return app->add_option_function<T>(name, [&dst](const T& v) { dst = v; }, help);
}

template <class T>
CLI::Option* list_option(CLI::App* app, const std::string& name, std::optional<std::vector<T>>& dst,
                         const std::string& help) {
  return app->add_option_function<std::vector<T>>(name, [&dst](const std::vector<T>& v) { dst = v; }, help)
      ->delimiter(',');
}

void add_pgf_flags(CLI::App* app, Settings& s) {
  option(app, "--theta", s.theta, "θ");
  option(app, "--a", s.a, "a");
  option(app, "--c", s.c, "c");
  option(app, "--q", s.q, "q (extinction probability)");
  option(app, "--r", s.r, "r (radius of convergence)");
  option(app, "--regime", s.regime, "MainSuper, MainSub1, MainSubR, Zero1, ZeroR or MinusOne");
}

void add_kernel_flags(CLI::App* app, Settings& s, bool cmixed_c) {
  add_pgf_flags(app, s);
  option(app, "--kind", s.kind, "pure, mixed or cmixed");
  option(app, "--depth", s.depth, "composition depth n for pure kernels");
  app->add_option_function<std::vector<std::string>>(
      "--pgf", [&s](const std::vector<std::string>& v) { s.layers = v; },
      "mixed layer, innermost first: theta=..,a=..,c=..|q=..,r=..");
  if (cmixed_c) {
    // --c doubles as the c-mixed sequence for kernel commands.
    app->remove_option(app->get_option("--c"));
    app->add_option_function<std::vector<double>>(
           "--c",
           [&s](const std::vector<double>& v) {
             s.c_sequence = v;
             if (v.size() == 1) s.c = v.front();
           },
           "c for a θ PGF, or c_1,..,c_n for cmixed")
        ->delimiter(',');
  }
}

void add_common(CLI::App* app, Settings& s) {
  option(app, "--config", s.config, "JSON experiment config");
  option(app, "--out", s.out_path, "output file (default: stdout)");
}

}  // namespace

FigureCurve figure1_curve(std::string_view name, int k_max) {
  FigureCurve curve{std::string(name), {}, Activation::linear(), {}, {}, {}, 0.0};
  if (name == "linear") {
    curve.params = {.theta = -1.0, .a = 0.99, .q = 0.99};
    curve.reference = Activation::linear();
  } else if (name == "prelu") {
    curve.params = {.theta = 1.0, .a = 1.65, .c = 0.146, .r = 1.0};
    curve.reference = Activation::prelu(0.25);
  } else if (name == "relu") {
    curve.params = {.theta = 0.99, .a = 0.22, .c = 0.203, .r = 4.8};
    curve.reference = Activation::relu();
  } else {
    throw ValidationError(fmt::format("unknown figure case '{}' (linear, prelu, relu)", name));
  }
  const Activation act = activation_from_coefficients(theta_coefficients(curve.params, k_max));
  curve.xs = curve_grid(-3.0, 3.0, 0.01);
  for (double x : curve.xs) {
    const double t = act(x);
    const double ref = curve.reference(x);
    curve.theta_phi.push_back(t);
    curve.reference_phi.push_back(ref);
    if (std::abs(x) <= 2.0 + 1e-9) curve.sup_distance = std::max(curve.sup_distance, std::abs(t - ref));
  }
  return curve;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"θ PGFs, activations and compositional kernels", "theta-kernels"};
  app.require_subcommand(1);
  app.allow_windows_style_options(false);
  Settings s;
  std::string command;
  std::map<std::string, std::function<void()>> actions;

  auto sub = [&](const std::string& name, const std::string& help, std::function<void()> action) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common(cmd, s);
    actions[name] = std::move(action);
    return cmd;
  };

  auto* pgf_eval_cmd = sub("pgf-eval", "evaluate a θ PGF", [&] { cmd_pgf_eval(s, out); });
  add_pgf_flags(pgf_eval_cmd, s);
  list_option(pgf_eval_cmd, "--s", s.s, "points in [0, 1]");

  auto* iter_cmd = sub("pgf-iterate", "evaluate the n-fold iterate", [&] { cmd_pgf_iterate(s, out); });
  add_pgf_flags(iter_cmd, s);
  option(iter_cmd, "--n", s.n, "iterations");
  list_option(iter_cmd, "--s", s.s, "points in [0, 1]");

  auto* coeff_cmd = sub("pgf-coeffs", "power-series coefficients p_0..p_K", [&] { cmd_pgf_coeffs(s, out); });
  add_pgf_flags(coeff_cmd, s);
  option(coeff_cmd, "--k-max", s.k_max, "highest index K (default 30)");

  auto add_activation_source = [&](CLI::App* cmd) {
    add_pgf_flags(cmd, s);
    option(cmd, "--coeffs", s.coeffs, "CSV of p_k (last column), e.g. pgf-coeffs output");
    option(cmd, "--activation", s.act_name, "linear, relu, prelu[:slope] or theta");
    option(cmd, "--slope", s.slope, "PReLU slope (default 0.25)");
    option(cmd, "--k-max", s.k_max, "Hermite truncation");
  };
  auto* curve_cmd = sub("activation-curve", "tabulate an activation", [&] { cmd_activation_curve(s, out); });
  add_activation_source(curve_cmd);
  option(curve_cmd, "--x-min", s.x_min, "default -3");
  option(curve_cmd, "--x-max", s.x_max, "default 3");
  option(curve_cmd, "--step", s.step, "default 0.01");

  auto* to_pgf_cmd = sub("activation-to-pgf", "Hermite coefficients p_k of an activation",
                         [&] { cmd_activation_to_pgf(s, out); });
  add_activation_source(to_pgf_cmd);
  option(to_pgf_cmd, "--curve", s.curve, "CSV x,phi from activation-curve");

  auto* keval_cmd = sub("kernel-eval", "evaluate a compositional kernel", [&] { cmd_kernel_eval(s, out); });
  add_kernel_flags(keval_cmd, s, true);
  option(keval_cmd, "--rho", s.rho, "input correlation");
  list_option(keval_cmd, "--x", s.x, "first input vector");
  list_option(keval_cmd, "--z", s.z, "second input vector");

  auto* gram_cmd = sub("kernel-gram", "Gram matrix of points", [&] { cmd_kernel_gram(s, out); });
  add_kernel_flags(gram_cmd, s, true);
  option(gram_cmd, "--points", s.points, "CSV, one point per row");

  auto* limit_cmd = sub("kernel-limit", "infinite-depth limit", [&] { cmd_kernel_limit(s, out); });
  add_pgf_flags(limit_cmd, s);
  option(limit_cmd, "--kind", s.kind, "pure or cmixed");
  option(limit_cmd, "--rho", s.rho, "input correlation");
  option(limit_cmd, "--sum", s.sum, "behavior of Σ c_k: converges, diverges or unknown");
  option(limit_cmd, "--c-sum", s.c_sum, "Σ c_k when it converges");

  auto* eigen_cmd = sub("kernel-eigen", "eigenvalues on the unit sphere", [&] { cmd_kernel_eigen(s, out); });
  add_kernel_flags(eigen_cmd, s, true);
  option(eigen_cmd, "--m", s.m, "ambient dimension");
  option(eigen_cmd, "--k-max", s.k_max, "highest degree (default 30)");

  auto* mlp_cmd = sub("mlp-study", "finite-width NNGP convergence", [&] { cmd_mlp_study(s, out); });
  add_pgf_flags(mlp_cmd, s);
  app.get_subcommand("mlp-study")
      ->add_option_function<std::vector<std::string>>(
          "--activation", [&s](const std::vector<std::string>& v) { s.activations = v; },
          "one per hidden layer, or one for a pure MLP")
      ->delimiter(',');
  option(mlp_cmd, "--slope", s.slope, "PReLU slope");
  option(mlp_cmd, "--k-max", s.k_max, "Hermite truncation for theta activations");
  option(mlp_cmd, "--depth", s.depth, "hidden layers of a pure MLP (default 2)");
  list_option(mlp_cmd, "--widths", s.widths, "h_0,...,h_{n+1}");
  list_option(mlp_cmd, "--study-widths", s.study_widths, "hidden widths to compare (default 64,256,1024)");
  option(mlp_cmd, "--samples", s.samples, "weight samples per width (default 20000)");
  option(mlp_cmd, "--seed", s.seed, "RNG seed (default 0)");
  option(mlp_cmd, "--sampler", s.sampler, "pairwise or full");
  option(mlp_cmd, "--threads", s.threads, "worker threads");
  option(mlp_cmd, "--rho", s.rho, "input correlation (default 0.5)");
  list_option(mlp_cmd, "--x", s.x, "first input vector");
  list_option(mlp_cmd, "--z", s.z, "second input vector");
  option(mlp_cmd, "--format", s.format, "csv or json");

  auto* fit_cmd = sub("gp-fit", "fit a GP and write the model JSON", [&] { cmd_gp_fit(s, out, err); });
  add_kernel_flags(fit_cmd, s, true);
  option(fit_cmd, "--train", s.train, "CSV rows: coordinates..., target");
  option(fit_cmd, "--noise", s.noise, "noise variance σ² (default 0)");

  auto* pred_cmd = sub("gp-predict", "posterior mean and variance", [&] { cmd_gp_predict(s, out, err); });
  option(pred_cmd, "--model", s.model, "model JSON from gp-fit");
  option(pred_cmd, "--query", s.query, "CSV of query points");

  auto* fig_cmd = sub("reproduce-fig1", "θ activations next to linear, PReLU and ReLU",
                      [&] { cmd_reproduce_fig1(s, out); });
  option(fig_cmd, "--case", s.figure, "linear, prelu or relu");
  option(fig_cmd, "--k-max", s.k_max, "Hermite truncation (default 64)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (s.config) merge(s, load_config(*s.config));
    for (const auto& [name, action] : actions) {
      if (app.got_subcommand(name)) action();
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace theta_kernels
