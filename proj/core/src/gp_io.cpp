#include "gprt/gp_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gprt/heuristic_io.hpp"

namespace gprt {

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::hex);
  if (ec != std::errc{}) throw std::runtime_error("cannot format double");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  if (text == "nan") return std::nan("");
  bool negative = !text.empty() && text[0] == '-';
  std::string_view body = negative ? text.substr(1) : text;
  double v = 0.0;
  const auto [ptr, ec] =
      std::from_chars(body.data(), body.data() + body.size(), v, std::chars_format::hex);
  if (ec != std::errc{} || ptr != body.data() + body.size()) {
    throw std::invalid_argument("malformed hex float '" + std::string(text) + "'");
  }
  return negative ? -v : v;
}

void write_checkpoint(std::ostream& out, const GpRun& run) {
  out << "# gprt gp checkpoint v1\n";
  out << "generation " << run.generation() << '\n';
  out << "rng " << run.rng() << '\n';
  out << "population " << run.population().size() << '\n';
  for (const Individual& ind : run.population()) {
    out << (ind.fitness ? format_double(*ind.fitness) : std::string("unevaluated")) << '\t'
        << origin_name(ind.origin) << '\t' << format_tokens(to_polish(ind.tree)) << '\n';
  }
}

void write_checkpoint(const std::filesystem::path& path, const GpRun& run) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  write_checkpoint(out, run);
}

GpCheckpoint read_checkpoint(std::istream& in) {
  GpCheckpoint cp;
  std::string line;
  auto next = [&](const char* what) {
    do {
      if (!std::getline(in, line)) throw std::runtime_error(std::string("checkpoint missing ") + what);
    } while (line.empty() || line[0] == '#');
  };
  auto expect = [&](const std::string& key) {
    if (line.rfind(key + ' ', 0) != 0) throw std::runtime_error("checkpoint expected '" + key + "'");
    return line.substr(key.size() + 1);
  };
  next("generation");
  cp.generation = std::stoull(expect("generation"));
  next("rng");
  {
    std::istringstream s(expect("rng"));
    s >> cp.rng;
    if (!s) throw std::runtime_error("checkpoint rng state is malformed");
  }
  next("population");
  const std::size_t count = std::stoull(expect("population"));
  cp.population.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    next("individual");
    const auto tab1 = line.find('\t');
    const auto tab2 = line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos) {
      throw std::runtime_error("checkpoint individual line is malformed");
    }
    const std::string fitness = line.substr(0, tab1);
    const auto origin = parse_origin(line.substr(tab1 + 1, tab2 - tab1 - 1));
    if (!origin) throw std::runtime_error("checkpoint individual has an unknown origin");
    Individual ind{from_polish(parse_tokens(line.substr(tab2 + 1))), std::nullopt, *origin};
    if (fitness != "unevaluated") ind.fitness = parse_double(fitness);
    cp.population.push_back(std::move(ind));
  }
  return cp;
}

GpCheckpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

void write_gp_log(std::ostream& out, const std::vector<GenerationStats>& history) {
  out << "generation,best,mean,median,best_token_count,evaluations\n";
  out << std::setprecision(17);
  for (const GenerationStats& s : history) {
    out << s.generation << ',' << s.best << ',' << s.mean << ',' << s.median << ','
        << s.best_token_count << ',' << s.evaluations << '\n';
  }
}

}  // namespace gprt
