#include "decmdp/policy/policy.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "decmdp/errors.hpp"
#include "decmdp/simd/kernels.hpp"

namespace decmdp::policy {

namespace {

// [0, 1) from the top 53 bits of a 64-bit draw.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void fill_glorot(std::span<double> w, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : w) v = (2.0 * unit_uniform(rng) - 1.0) * limit;
}

struct LayerShape {
  std::size_t offset_w;
  std::size_t offset_b;
  std::size_t rows;
  std::size_t cols;
};

constexpr LayerShape kLayers[3] = {
    {kW1, kB1, kHidden, kInputs},
    {kW2, kB2, kHidden, kHidden},
    {kW3, kB3, kOutputs, kHidden},
};

std::string join(std::span<const double> v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += io::format_exact(v[i]);
  }
  return out;
}

}  // namespace

void PolicyParams::validate() const {
  if (values.size() != kParamCount) throw ConfigError("policy parameters have the wrong size");
  for (double v : values) {
    if (!std::isfinite(v)) throw ConfigError("policy parameters contain a non-finite value");
  }
}

std::string_view input_mode_name(InputMode mode) {
  switch (mode) {
    case InputMode::off: return "off";
    case InputMode::max_abs: return "max-abs";
    case InputMode::shape: return "shape";
  }
  return "?";
}

InputMode input_mode_from_name(std::string_view name) {
  if (name == "off" || name == "false") return InputMode::off;
  if (name == "max-abs" || name == "true") return InputMode::max_abs;
  if (name == "shape") return InputMode::shape;
  throw ConfigError("unknown input normalization '" + std::string(name) + "'");
}

PolicyParams init_params(std::uint64_t seed, InputMode input) {
  PolicyParams p;
  p.input = input;
  std::mt19937_64 rng(seed);
  fill_glorot(p.w1(), kInputs, kHidden, rng);
  fill_glorot(p.w2(), kHidden, kHidden, rng);
  fill_glorot(p.w3(), kHidden, kOutputs, rng);
  return p;
}

std::array<double, kOutputs> policy_forward(const PolicyParams& params, const StencilInput<double>& input) {
  params.validate();
  for (double x : input.x) {
    if (!std::isfinite(x)) throw ConfigError("policy_forward: non-finite input");
  }
  return forward_item<double>(params.values.data(), input.x.data());
}

void prepare_inputs(const PolicyParams& params, std::span<const double> raw, std::span<double> inputs) {
  const std::size_t batch = raw.size() / kInputs;
  for (std::size_t b = 0; b < batch; ++b) {
    const auto x = prepare_input(params.input, raw[3 * b], raw[3 * b + 1], raw[3 * b + 2]);
    inputs[3 * b] = x[0];
    inputs[3 * b + 1] = x[1];
    inputs[3 * b + 2] = x[2];
  }
}

void policy_forward_batch(const PolicyParams& params, std::span<const double> raw, std::span<double> weights) {
  const std::size_t batch = raw.size() / kInputs;
  if (weights.size() < batch * kOutputs) throw std::invalid_argument("policy_forward_batch: output too small");
  std::vector<double> inputs(batch * kInputs);
  prepare_inputs(params, raw, inputs);
  simd::MlpForwardArgs args;
  args.params = params.values.data();
  args.inputs = inputs.data();
  args.batch = batch;
  args.outputs = weights.data();
  simd::mlp_forward(args);
}

// ---------------------------------------------------------------------------

std::string checkpoint_to_string(const Checkpoint& ck) {
  ck.params.validate();
  std::ostringstream out;
  out << "# weno-decmdp policy checkpoint\n";
  out << "format_version = " << kCheckpointVersion << '\n';
  out << "network = mlp relu softmax\n";
  out << "layers = 3\n";
  out << "normalize = " << input_mode_name(ck.params.input) << '\n';
  const std::span<const double> all(ck.params.values);
  for (std::size_t l = 0; l < 3; ++l) {
    const LayerShape& s = kLayers[l];
    out << "layer." << l << ".shape = " << s.rows << ' ' << s.cols << '\n';
    out << "layer." << l << ".weight = " << join(all.subspan(s.offset_w, s.rows * s.cols)) << '\n';
    out << "layer." << l << ".bias = " << join(all.subspan(s.offset_b, s.rows)) << '\n';
  }
  for (const auto& [k, v] : ck.config_echo.entries()) out << "config." << k << " = " << v << '\n';
  return out.str();
}

Checkpoint checkpoint_from_string(std::string_view text, std::string_view origin) {
  const io::KeyValue kv = io::KeyValue::parse(text, origin);
  const auto version = kv.get_int("format_version");
  if (version != kCheckpointVersion) {
    throw ConfigError("checkpoint format version " + std::to_string(version) + " is not supported");
  }
  if (kv.get_int("layers") != 3) throw ConfigError("checkpoint: expected 3 layers");
  Checkpoint ck;
  ck.params.input = input_mode_from_name(kv.get_string("normalize"));
  for (std::size_t l = 0; l < 3; ++l) {
    const LayerShape& s = kLayers[l];
    const std::string base = "layer." + std::to_string(l) + ".";
    const auto shape = kv.get_doubles(base + "shape");
    if (shape.size() != 2 || shape[0] != static_cast<double>(s.rows) || shape[1] != static_cast<double>(s.cols)) {
      throw ConfigError("checkpoint: " + base + "shape does not match the network");
    }
    const auto w = kv.get_doubles(base + "weight");
    const auto b = kv.get_doubles(base + "bias");
    if (w.size() != s.rows * s.cols || b.size() != s.rows) {
      throw ConfigError("checkpoint: " + base + "parameter count mismatch");
    }
    std::copy(w.begin(), w.end(), ck.params.values.begin() + static_cast<std::ptrdiff_t>(s.offset_w));
    std::copy(b.begin(), b.end(), ck.params.values.begin() + static_cast<std::ptrdiff_t>(s.offset_b));
  }
  ck.params.validate();
  for (const auto& [k, v] : kv.entries()) {
    if (k.rfind("config.", 0) == 0) ck.config_echo.set(k.substr(7), v);
  }
  return ck;
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write checkpoint " + path.string());
  out << checkpoint_to_string(ck);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str(), path.string());
}

}  // namespace decmdp::policy
