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

#include "theta_kernels/mlp.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

#include <fmt/format.h>

#include "json.hpp"
#include "theta_kernels/errors.hpp"
#include "theta_kernels/io.hpp"
#include "theta_kernels/kernel.hpp"
#include "theta_kernels/philox.hpp"

namespace theta_kernels {

namespace {

constexpr std::size_t kMinSamples = 100;

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// Coordinate-averaged product (1/h) Σ F(x)_i F(z)_i for one pairwise draw.
double pairwise_draw(const MlpConfig& config, double rho, std::uint64_t sample) {
  const std::size_t n = config.hidden_layers();
  for (std::size_t k = 0; k <= n; ++k) {
    NormalStream stream(config.seed, sample, static_cast<std::uint32_t>(k));
    const std::size_t rows = config.widths[k + 1];
    const double ortho = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    if (k == n) {
      double acc = 0.0;
      for (std::size_t i = 0; i < rows; ++i) {
        const double g1 = stream.next();
        const double g2 = stream.next();
        acc += g1 * (rho * g1 + ortho * g2);
      }
      return acc / static_cast<double>(rows);
    }
    const Activation& act = config.activation(k + 1);
    double xx = 0.0, zz = 0.0, xz = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      const double g1 = stream.next();
      const double g2 = stream.next();
      const double a = act(g1);
      const double b = act(rho * g1 + ortho * g2);
      xx += a * a;
      zz += b * b;
      xz += a * b;
    }
    if (xx == 0.0 || zz == 0.0) {
      throw ZeroNormLayer(fmt::format("hidden layer {} has zero norm (sample {})", k + 1, sample));
    }
    rho = std::clamp(xz / std::sqrt(xx * zz), -1.0, 1.0);
  }
  return 0.0;
}

double full_weight_draw(const MlpConfig& config, std::span<const double> x,
                        std::span<const double> z, std::uint64_t sample) {
  const auto weights = draw_weights(config, sample);
  const auto fx = mlp_forward(config, weights, x);
  const auto fz = mlp_forward(config, weights, z);
  double acc = 0.0;
  for (std::size_t i = 0; i < fx.size(); ++i) acc += fx[i] * fz[i];
  return acc / static_cast<double>(fx.size());
}

void check_input(const MlpConfig& config, std::span<const double> input) {
  if (input.size() != config.widths.front()) {
    throw DimensionMismatch(
        fmt::format("input has {} entries, h_0 = {}", input.size(), config.widths.front()));
  }
  if (squared_norm(input) == 0.0) throw ZeroVector("MLP input is the zero vector");
}

}  // namespace

MlpConfig MlpConfig::pure(std::vector<std::size_t> widths, Activation act, std::uint64_t seed) {
  MlpConfig config{std::move(widths), {std::move(act)}, seed};
  config.validate();
  return config;
}

MlpConfig MlpConfig::mixed(std::vector<std::size_t> widths, std::vector<Activation> acts,
                           std::uint64_t seed) {
  MlpConfig config{std::move(widths), std::move(acts), seed};
  config.validate();
  return config;
}

std::size_t MlpConfig::weight_count() const {
  std::size_t eta = 0;
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) eta += widths[k] * widths[k + 1];
  return eta;
}

const Activation& MlpConfig::activation(std::size_t layer) const {
  if (layer < 1 || layer > hidden_layers()) {
    throw IndexOutOfRange(fmt::format("layer {} outside 1..{}", layer, hidden_layers()));
  }
  return activations.size() == 1 ? activations.front() : activations[layer - 1];
}

void MlpConfig::validate() const {
  if (widths.size() < 3) throw ValidationError("an MLP needs h_0, at least one hidden width, and h_{n+1}");
  for (std::size_t h : widths) {
    if (h < 1) throw ValidationError("all widths must be >= 1");
  }
  const std::size_t n = hidden_layers();
  if (activations.empty()) throw ValidationError("an MLP needs an activation");
  if (activations.size() != 1 && activations.size() != n) {
    throw ValidationError(
        fmt::format("mixed MLP has {} activations for {} hidden layers", activations.size(), n));
  }
}

std::vector<Eigen::MatrixXd> draw_weights(const MlpConfig& config, std::uint64_t seed_offset) {
  config.validate();
  std::vector<Eigen::MatrixXd> weights;
  weights.reserve(config.hidden_layers() + 1);
  for (std::size_t k = 0; k + 1 < config.widths.size(); ++k) {
    NormalStream stream(config.seed, seed_offset, static_cast<std::uint32_t>(k));
    const auto rows = static_cast<Eigen::Index>(config.widths[k + 1]);
    const auto cols = static_cast<Eigen::Index>(config.widths[k]);
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) w(i, j) = stream.next();
    }
    weights.push_back(std::move(w));
  }
  return weights;
}

std::vector<double> mlp_forward(const MlpConfig& config, std::span<const Eigen::MatrixXd> weights,
                                std::span<const double> input) {
  config.validate();
  check_input(config, input);
  const std::size_t n = config.hidden_layers();
  if (weights.size() != n + 1) {
    throw DimensionMismatch(fmt::format("{} weight matrices for {} layers", weights.size(), n + 1));
  }
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(input.data(),
                                                        static_cast<Eigen::Index>(input.size()));
  for (std::size_t k = 0; k <= n; ++k) {
    const auto& w = weights[k];
    if (static_cast<std::size_t>(w.rows()) != config.widths[k + 1] ||
        static_cast<std::size_t>(w.cols()) != config.widths[k]) {
      throw DimensionMismatch(fmt::format("W^({}) has shape {}x{}", k, w.rows(), w.cols()));
    }
    const double norm = x.norm();
    if (norm == 0.0) throw ZeroNormLayer(fmt::format("layer {} output has zero norm", k));
    Eigen::VectorXd pre = w * (x / norm);
    if (k < n) {
      const Activation& act = config.activation(k + 1);
      for (Eigen::Index i = 0; i < pre.size(); ++i) pre(i) = act(pre(i));
    }
    x = std::move(pre);
  }
  return {x.data(), x.data() + x.size()};
}

std::vector<double> sample_mlp_output(const MlpConfig& config, std::span<const double> input,
                                      std::uint64_t seed_offset) {
  const auto weights = draw_weights(config, seed_offset);
  return mlp_forward(config, weights, input);
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("THETA_KERNELS_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

KernelEstimate empirical_kernel(const MlpConfig& config, std::span<const double> x,
                                std::span<const double> z, std::size_t num_samples,
                                const EstimateOptions& options) {
  config.validate();
  check_input(config, x);
  check_input(config, z);
  if (num_samples < kMinSamples) {
    throw ValidationError(fmt::format("need at least {} samples", kMinSamples));
  }
  const double rho = correlation(x, z);

  std::vector<double> draws(num_samples);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      draws[s] = options.sampler == Sampler::kPairwise ? pairwise_draw(config, rho, s)
                                                       : full_weight_draw(config, x, z, s);
    }
  };

  const unsigned threads =
      std::max(1u, std::min<unsigned>(options.threads ? options.threads : default_thread_count(),
                                      static_cast<unsigned>(num_samples)));
  if (threads == 1) {
    work(0, num_samples);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (num_samples + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = std::min(num_samples, t * chunk);
      const std::size_t end = std::min(num_samples, begin + chunk);
      pool.emplace_back([&, t, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  // Fixed-order reduction.
  double sum = 0.0;
  for (double d : draws) sum += d;
  const double mean = sum / static_cast<double>(num_samples);
  double ss = 0.0;
  for (double d : draws) ss += (d - mean) * (d - mean);
  const double variance = ss / static_cast<double>(num_samples - 1);

  return {mean, std::sqrt(variance / static_cast<double>(num_samples)), num_samples,
          config.widths};
}

double limiting_kernel(const MlpConfig& config, double rho, int k_max, int quad_nodes) {
  config.validate();
  std::vector<Pgf> layers;
  for (std::size_t k = 1; k <= config.hidden_layers(); ++k) {
    const Activation& act = config.activation(k);
    auto p = activation_to_pgf(act, k_max, quad_nodes);
    const double m2 = activation_second_moment(act, quad_nodes);
    if (m2 == 0.0) throw ZeroNormLayer(fmt::format("activation of layer {} vanishes", k));
    for (double& pk : p) pk /= m2;
    // Bessel's inequality keeps Σ p_k/E[φ²] ≤ 1 up to quadrature rounding.
    double mass = 0.0;
    for (double pk : p) mass += pk;
    if (mass > 1.0) {
      for (double& pk : p) pk /= mass;
    }
    layers.push_back(Pgf::series(std::move(p)));
  }
  return mixed_kernel_at(layers, rho);
}

StudyReport convergence_study(const MlpConfig& base, std::span<const std::size_t> widths,
                              std::span<const double> x, std::span<const double> z,
                              std::size_t num_samples, const EstimateOptions& options) {
  base.validate();
  if (widths.empty()) throw ValidationError("convergence study needs at least one width");
  for (std::size_t i = 1; i < widths.size(); ++i) {
    if (widths[i] <= widths[i - 1]) throw ValidationError("study widths must be strictly increasing");
  }
  StudyReport report;
  report.rho = correlation(x, z);
  const double reference = limiting_kernel(base, report.rho);
  for (std::size_t w : widths) {
    MlpConfig config = base;
    for (std::size_t k = 1; k + 1 < config.widths.size(); ++k) config.widths[k] = w;
    StudyRow row;
    row.width = w;
    row.estimate = empirical_kernel(config, x, z, num_samples, options);
    row.reference = reference;
    row.gap = row.estimate.value - reference;
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_study_csv(std::ostream& out, const StudyReport& report) {
  out << "width,estimate,se,reference,gap\n";
  for (const auto& row : report.rows) {
    out << row.width << ',' << format_number(row.estimate.value) << ','
        << format_number(row.estimate.standard_error) << ',' << format_number(row.reference) << ','
        << format_number(row.gap) << '\n';
  }
}

void write_study_json(std::ostream& out, const StudyReport& report) {
  nlohmann::json doc;
  doc["rho"] = report.rho;
  doc["rows"] = nlohmann::json::array();
  for (const auto& row : report.rows) {
    doc["rows"].push_back({{"width", row.width},
                           {"estimate", row.estimate.value},
                           {"se", row.estimate.standard_error},
                           {"reference", row.reference},
                           {"gap", row.gap},
                           {"num_samples", row.estimate.num_samples}});
  }
  out << doc.dump(2) << '\n';
}

}  // namespace theta_kernels
