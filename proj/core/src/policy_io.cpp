#include "gprt/policy_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gprt/gp_io.hpp"

namespace gprt {

namespace {

constexpr std::string_view kMagic = "gprt-policy";
constexpr int kVersion = 1;

void write_vector(std::ostream& out, std::string_view name, const std::vector<double>& v) {
  out << name << ' ' << v.size() << '\n';
  for (double x : v) out << format_double(x) << '\n';
}

std::string expect_key(std::istream& in, std::string_view key) {
  std::string k;
  if (!(in >> k) || k != key) {
    throw std::runtime_error("policy checkpoint: expected '" + std::string(key) + "'");
  }
  std::string value;
  if (!(in >> value)) throw std::runtime_error("policy checkpoint: missing value for " + k);
  return value;
}

std::size_t read_size(std::istream& in, std::string_view key) {
  return std::stoull(expect_key(in, key));
}

double read_double(std::istream& in, std::string_view key) {
  return parse_double(expect_key(in, key));
}

std::vector<double> read_vector(std::istream& in, std::string_view key) {
  const std::size_t n = read_size(in, key);
  std::vector<double> v(n);
  std::string word;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(in >> word)) throw std::runtime_error("policy checkpoint: truncated " + std::string(key));
    v[i] = parse_double(word);
  }
  return v;
}

}  // namespace

void save_policy(std::ostream& out, const SequencePolicy& policy, const TrainState& state) {
  const PolicyConfig& c = policy.config();
  out << kMagic << ' ' << kVersion << '\n';
  out << "kind " << policy_kind_name(c.kind) << '\n';
  out << "max_depth " << c.max_depth << '\n';
  out << "seed " << c.seed << '\n';
  out << "embedding " << c.embedding << '\n';
  out << "hidden " << c.hidden << '\n';
  out << "layers " << c.layers << '\n';
  out << "width " << c.width << '\n';
  out << "heads " << c.heads << '\n';
  out << "ffn " << c.ffn << '\n';
  out << "max_positions " << c.max_positions << '\n';
  out << "vocabulary " << Vocabulary::kSize;
  for (std::size_t i = 0; i < Vocabulary::kEmitSize; ++i) out << ' ' << Vocabulary::token(i).symbol();
  out << " <bos>\n";
  write_vector(out, "parameters", policy.parameters());
  const AdamConfig& a = state.optimizer.config();
  out << "learning_rate " << format_double(a.learning_rate) << '\n';
  out << "beta1 " << format_double(a.beta1) << '\n';
  out << "beta2 " << format_double(a.beta2) << '\n';
  out << "epsilon " << format_double(a.epsilon) << '\n';
  out << "adam_steps " << state.optimizer.steps() << '\n';
  write_vector(out, "first_moment", state.optimizer.first_moment());
  write_vector(out, "second_moment", state.optimizer.second_moment());
  out << "baseline " << format_double(state.baseline) << '\n';
  out << "baseline_decay " << format_double(state.baseline_decay) << '\n';
  out << "episode " << state.episode << '\n';
  out << "kappa " << format_double(state.kappa) << '\n';
}

void save_policy(const std::filesystem::path& path, const SequencePolicy& policy,
                 const TrainState& state) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write policy checkpoint " + path.string());
  save_policy(out, policy, state);
}

PolicyCheckpoint load_policy(std::istream& in) {
  if (std::to_string(kVersion) != expect_key(in, kMagic)) {
    throw std::runtime_error("policy checkpoint: unsupported version");
  }
  PolicyConfig c;
  const auto kind = parse_policy_kind(expect_key(in, "kind"));
  if (!kind) throw std::runtime_error("policy checkpoint: unknown policy kind");
  c.kind = *kind;
  c.max_depth = read_size(in, "max_depth");
  c.seed = read_size(in, "seed");
  c.embedding = read_size(in, "embedding");
  c.hidden = read_size(in, "hidden");
  c.layers = read_size(in, "layers");
  c.width = read_size(in, "width");
  c.heads = read_size(in, "heads");
  c.ffn = read_size(in, "ffn");
  c.max_positions = read_size(in, "max_positions");
  if (read_size(in, "vocabulary") != Vocabulary::kSize) {
    throw std::runtime_error("policy checkpoint: vocabulary size mismatch");
  }
  std::string symbol;
  for (std::size_t i = 0; i < Vocabulary::kEmitSize; ++i) {
    in >> symbol;
    if (symbol != Vocabulary::token(i).symbol()) {
      throw std::runtime_error("policy checkpoint: vocabulary ordering mismatch at '" + symbol + "'");
    }
  }
  if (!(in >> symbol) || symbol != "<bos>") throw std::runtime_error("policy checkpoint: missing <bos>");

  PolicyCheckpoint out;
  out.policy = make_policy(c);
  std::vector<double> params = read_vector(in, "parameters");
  if (params.size() != out.policy->parameters().size()) {
    throw std::runtime_error("policy checkpoint: parameter count does not match the architecture");
  }
  out.policy->parameters() = std::move(params);
  AdamConfig a;
  a.learning_rate = read_double(in, "learning_rate");
  a.beta1 = read_double(in, "beta1");
  a.beta2 = read_double(in, "beta2");
  a.epsilon = read_double(in, "epsilon");
  out.state.optimizer = Adam(a);
  const std::size_t steps = read_size(in, "adam_steps");
  std::vector<double> m = read_vector(in, "first_moment");
  std::vector<double> v = read_vector(in, "second_moment");
  out.state.optimizer.restore(steps, std::move(m), std::move(v));
  out.state.baseline = read_double(in, "baseline");
  out.state.baseline_decay = read_double(in, "baseline_decay");
  out.state.episode = read_size(in, "episode");
  out.state.kappa = read_double(in, "kappa");
  return out;
}

PolicyCheckpoint load_policy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open policy checkpoint " + path.string());
  return load_policy(in);
}

}  // namespace gprt
