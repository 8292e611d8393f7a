#include "dlaw/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dlaw/codec.hpp"
#include "dlaw/error.hpp"
#include "dlaw/fitting.hpp"
#include "dlaw/lawforms.hpp"
#include "dlaw/signal_io.hpp"
#include "dlaw/spectral.hpp"

namespace dlaw::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> read_input(const std::string& path, std::istream& in) {
  if (path == "-") return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return read_file(path);
}

void write_output(const std::string& path, std::span<const std::uint8_t> bytes,
                  std::ostream& out) {
  if (path.empty() || path == "-") {
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    return;
  }
  write_file(path, bytes);
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  write_output(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()),
               out);
}

std::vector<std::uint8_t> parse_mask(const std::string& text, std::size_t n) {
  if (text.empty()) return std::vector<std::uint8_t>(n + 1, 1);
  std::vector<std::uint8_t> mask;
  for (char ch : text) {
    if (ch == '0' || ch == '1')
      mask.push_back(static_cast<std::uint8_t>(ch - '0'));
    else if (ch != ',' && ch != ' ')
      throw UsageError("mask must contain only 0/1 digits");
  }
  if (mask.size() != n + 1) throw UsageError("mask needs n+1 = " + std::to_string(n + 1) + " bits");
  return mask;
}

FitMode parse_mode(const std::string& m) {
  if (m == "amp") return FitMode::Amplitudes;
  if (m == "ic") return FitMode::InitialConditions;
  throw UsageError("--mode must be amp or ic");
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

// Rebuilds a generic real solution from the roots (unit amplitudes) and checks
// that the recursion reproduces it.
double recursion_model_deviation(const LinearLaw& law, const RootSet& roots, double dt) {
  std::vector<complex> amps;
  for (const auto& q : roots.roots) amps.push_back(q.imag() == 0.0 ? complex(1.0) : complex(0.5, q.imag() > 0 ? 0.5 : -0.5));
  const auto model = roots_to_model(roots, amps, dt);
  const std::size_t steps = 50;
  std::vector<double> sampled(steps);
  for (std::size_t k = 0; k < steps; ++k) sampled[k] = evaluate_model(model, static_cast<double>(k) * dt);

  LinearLaw reduced = law;
  reduced.weights.resize(roots.size() + 1);  // trailing zero weights lower the degree
  const auto rec = run_recursion(reduced, std::span(sampled).first(roots.size()), steps);
  double scale = 0.0, dev = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    scale = std::max(scale, std::abs(sampled[k]));
    dev = std::max(dev, std::abs(sampled[k] - rec[k]));
  }
  return dev / std::max(scale, 1e-300);
}

int cmd_extract(const TimeSeries& series, const EmbeddingConfig& config, bool symmetric,
                std::size_t index, const std::string& format, const std::string& output,
                std::ostream& out) {
  const auto dataset = embed(series, config);
  const auto c = correlation(dataset);
  const LinearLaw law =
      symmetric ? extract_symmetric_law(c, config) : extract_law(masked_spectrum(c, config), config, index);
  const auto coeffs = recursion_coefficients(law);
  const RootSet roots = weights_to_roots(law);
  const double dt = static_cast<double>(config.stride) / series.sample_rate();

  // roots -> weights round trip, compared after normalizing by the leading weight
  std::size_t degree = roots.size();
  const auto back = roots_to_weights(roots, 1.0);
  double weight_dev = 0.0;
  for (std::size_t i = 0; i <= degree; ++i)
    weight_dev = std::max(weight_dev, std::abs(back[i] - law.weights[i] / law.weights[degree]));
  std::string model_check;
  double model_dev = std::numeric_limits<double>::quiet_NaN();
  try {
    model_dev = recursion_model_deviation(law, roots, dt);
  } catch (const Error& e) {
    model_check = e.what();
  }
  const bool consistent = weight_dev < 1e-6 && (model_check.empty() ? model_dev < 1e-6 : true);

  std::vector<complex> exponents;
  for (const auto& q : roots.roots)
    exponents.push_back(std::abs(q) > 0.0 ? std::log(q) / dt : complex(std::nan("")));

  std::ostringstream os;
  if (format == "json") {
    nlohmann::json j;
    j["n"] = config.order_n;
    j["stride"] = config.stride;
    j["eigenvalue"] = law.eigenvalue;
    j["symmetric"] = law.symmetric;
    j["weights"] = law.weights;
    j["recursion"] = coeffs;
    for (std::size_t a = 0; a < roots.size(); ++a) {
      j["roots"].push_back({roots.roots[a].real(), roots.roots[a].imag()});
      j["exponents"].push_back({exponents[a].real(), exponents[a].imag()});
    }
    j["check"] = {{"roots_to_weights_max_dev", weight_dev},
                  {"recursion_vs_model_max_rel_dev", model_check.empty() ? model_dev : -1.0},
                  {"consistent", consistent}};
    if (!model_check.empty()) j["check"]["model_skipped"] = model_check;
    os << j.dump(2) << '\n';
  } else {
    os << "law: n=" << config.order_n << " stride=" << config.stride
       << " eigenvalue=" << fmt(law.eigenvalue) << " symmetric=" << (law.symmetric ? "yes" : "no")
       << '\n';
    os << "weights:";
    for (double w : law.weights) os << ' ' << fmt(w);
    os << "\nrecursion: y[k] = sum_i c_i y[k-i], c =";
    for (double v : coeffs) os << ' ' << fmt(v);
    os << "\nroots (re im |q|):\n";
    for (const auto& q : roots.roots)
      os << "  " << fmt(q.real()) << ' ' << fmt(q.imag()) << ' ' << fmt(std::abs(q)) << '\n';
    os << "exponents alpha = ln(q)/dt [1/s] (re im):\n";
    for (const auto& a : exponents) os << "  " << fmt(a.real()) << ' ' << fmt(a.imag()) << '\n';
    os << "check: roots->weights max dev " << fmt(weight_dev) << "; recursion vs model ";
    if (model_check.empty())
      os << "max rel dev " << fmt(model_dev);
    else
      os << "skipped (" << model_check << ')';
    os << "; " << (consistent ? "consistent" : "INCONSISTENT") << '\n';
  }
  write_text(output, os.str(), out);
  return consistent ? kOk : kNumericalFailure;
}

int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Linear dynamic laws: extraction, representation and block compression", "dlaw"};
  app.require_subcommand(1);

  std::string input = "-", output, format = "csv", mode = "amp", mask_text, grid_n = "4:32:4",
              grid_stride = "1";
  std::size_t n = 2, stride = 1, offset = 0, index = 0, block = 1024, length = 8000;
  std::uint64_t seed = 0;
  std::size_t seeds = 1;
  bool symmetric = false;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  };
  auto add_law = [&](CLI::App* sub) {
    sub->add_option("--n", n, "Law order (window length n+1)")->check(CLI::PositiveNumber);
    sub->add_option("--stride", stride, "Lag spacing in samples")->check(CLI::PositiveNumber);
  };

  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of the correlation matrix");
  spectrum->add_option("input", input, "WAV file or - for stdin");
  add_law(spectrum);
  spectrum->add_option("--offset", offset, "Index of the first window's oldest sample");
  spectrum->add_option("--mask", mask_text, "n+1 bits, e.g. 1,0,1");
  spectrum->add_option("-o,--output", output);
  add_format(spectrum);

  auto* extract = app.add_subcommand("extract", "Print a law in all four representations");
  extract->add_option("input", input, "WAV file or - for stdin");
  add_law(extract);
  extract->add_option("--offset", offset);
  extract->add_option("--mask", mask_text);
  extract->add_option("--index", index, "Eigenvalue index (0 = smallest)");
  extract->add_flag("--symmetric", symmetric, "Time-reversal symmetric law");
  extract->add_option("-o,--output", output);
  extract->add_option("--format", format)->check(CLI::IsMember({"text", "json", "csv"}));

  auto* comp = app.add_subcommand("compress", "Compress a WAV file into a DLAW artifact");
  comp->add_option("input", input, "WAV file or - for stdin");
  add_law(comp);
  comp->add_option("--block", block, "Block size in samples")->check(CLI::PositiveNumber);
  comp->add_option("--mode", mode, "amp | ic")->check(CLI::IsMember({"amp", "ic"}));
  comp->add_flag("--symmetric", symmetric);
  comp->add_option("-o,--output", output, "DLAW output path")->required();

  std::string reference;
  auto* decomp = app.add_subcommand("decompress", "Decode a DLAW artifact to WAV");
  decomp->add_option("input", input, "DLAW file or - for stdin");
  decomp->add_option("-o,--output", output, "WAV output path (default stdout)");
  decomp->add_option("--reference", reference, "Original WAV; prints the accuracy A");

  auto* sw = app.add_subcommand("sweep", "Accuracy vs compression rate over an (n, stride) grid");
  sw->add_option("input", input, "WAV file or - for stdin");
  sw->add_option("--grid-n", grid_n, "a:b:step or comma list");
  sw->add_option("--grid-stride", grid_stride, "a:b:step or comma list");
  sw->add_option("--block", block)->check(CLI::PositiveNumber);
  sw->add_option("--mode", mode)->check(CLI::IsMember({"amp", "ic"}));
  sw->add_flag("--symmetric", symmetric);
  sw->add_option("-o,--output", output);
  add_format(sw);

  auto* base = app.add_subcommand("baseline", "Accuracy vs rate on seeded uniform noise");
  base->add_option("--length", length)->check(CLI::PositiveNumber);
  base->add_option("--seed", seed);
  base->add_option("--seeds", seeds, "Number of consecutive seeds to average")->check(CLI::PositiveNumber);
  base->add_option("--grid-n", grid_n);
  base->add_option("--block", block)->check(CLI::PositiveNumber);
  base->add_option("--mode", mode)->check(CLI::IsMember({"amp", "ic"}));
  base->add_option("-o,--output", output);
  add_format(base);

  SynthSpec synth_spec;
  std::string kind = "sine";
  double rate = 8000.0;
  auto* synth = app.add_subcommand("synth", "Write a synthetic WAV signal");
  synth->add_option("--kind", kind)
      ->check(CLI::IsMember({"sine", "multi_sine", "damped_sine", "poly_exp", "noise", "constant"}));
  synth->add_option("--freq", synth_spec.frequencies, "Frequencies in Hz");
  synth->add_option("--amp", synth_spec.amplitudes, "Amplitudes");
  synth->add_option("--phase", synth_spec.phases, "Phases in rad");
  synth->add_option("--decay", synth_spec.decay, "Decay rate 1/s");
  synth->add_option("--degree", synth_spec.degree, "poly_exp degree");
  synth->add_option("--value", synth_spec.value, "constant value");
  synth->add_option("--seed", synth_spec.seed);
  synth->add_option("--noise", synth_spec.noise_amplitude, "Additive uniform noise amplitude");
  synth->add_option("--length", length)->check(CLI::PositiveNumber);
  synth->add_option("--rate", rate)->check(CLI::PositiveNumber);
  synth->add_option("-o,--output", output, "WAV output path (default stdout)");

  std::vector<const char*> argv{"dlaw"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  auto load_series = [&] { return read_wav(read_input(input, in)); };

  if (*synth) {
    static const std::map<std::string, SynthKind> kinds{
        {"sine", SynthKind::Sine},           {"multi_sine", SynthKind::MultiSine},
        {"damped_sine", SynthKind::DampedSine}, {"poly_exp", SynthKind::PolyExp},
        {"noise", SynthKind::UniformNoise},  {"constant", SynthKind::Constant}};
    synth_spec.kind = kinds.at(kind);
    synth_spec.length = length;
    synth_spec.sample_rate = rate;
    const auto series = synthesize(synth_spec);
    write_output(output, write_wav(series), out);
    return kOk;
  }

  if (*spectrum || *extract) {
    EmbeddingConfig config = EmbeddingConfig::dense(n, stride);
    config.start_offset = offset;
    config.mask = parse_mask(mask_text, n);
    config.validate();
    const auto series = load_series();
    if (*extract) {
      if (format == "csv") format = "text";
      return cmd_extract(series, config, symmetric, index, format, output, out);
    }
    const auto c = correlation(embed(series, config));
    const auto spec = masked_spectrum(c, config);
    std::ostringstream os;
    os << std::setprecision(17);
    if (format == "json") {
      nlohmann::json j;
      j["n"] = n;
      j["stride"] = stride;
      j["trace"] = c.trace();
      j["windows"] = c.sample_count;
      j["eigenvalues"] = spec.eigenvalues;
      os << j.dump(2) << '\n';
    } else {
      os << "index,eigenvalue\n";
      for (std::size_t j = 0; j < spec.size(); ++j) os << j << ',' << spec.eigenvalues[j] << '\n';
    }
    write_text(output, os.str(), out);
    return kOk;
  }

  if (*comp) {
    CodecParams params;
    params.order_n = n;
    params.stride = stride;
    params.block_size = block;
    params.fit_mode = parse_mode(mode);
    params.symmetric = symmetric;
    try {
      params.validate();
    } catch (const Error& e) {
      throw UsageError(e.message());
    }
    const auto series = load_series();
    const auto artifact = compress(series, params);
    const auto bytes = serialize(artifact);
    write_file(output, bytes);
    const auto restored = decompress(artifact);
    out << "blocks=" << artifact.blocks.size() << " tail=" << artifact.tail.size()
        << " R=" << fmt(params.compression_rate()) << " bytes=" << bytes.size()
        << " A=" << fmt(accuracy(series.samples(), restored.samples())) << '\n';
    return kOk;
  }

  if (*decomp) {
    const auto artifact = deserialize(read_input(input, in));
    const auto series = decompress(artifact);
    write_output(output, write_wav(series), out);
    if (!reference.empty()) {
      const auto ref = read_wav(read_file(reference));
      const std::size_t m = std::min(ref.size(), series.size());
      (output.empty() || output == "-" ? err : out)
          << "A=" << fmt(accuracy(std::span(ref.samples()).first(m),
                                  std::span(series.samples()).first(m)))
          << '\n';
    }
    return kOk;
  }

  const auto n_grid = parse_grid(grid_n);
  const FitMode fit_mode = parse_mode(mode);

  if (*sw) {
    const auto stride_grid = parse_grid(grid_stride);
    const auto series = load_series();
    SweepOptions options;
    options.fit_mode = fit_mode;
    options.symmetric = symmetric;
    auto report = sweep(series, n_grid, stride_grid, block, options);
    report.signal_id = input;
    for (const auto& row : report.rows)
      if (!row.ok)
        err << "skipped n=" << row.n << " stride=" << row.stride << ": " << row.reason << '\n';
    write_text(output, format == "json" ? report.to_json() + "\n" : report.to_csv(), out);
    return kOk;
  }

  if (*base) {
    std::vector<double> slopes;
    SweepReport merged;
    for (std::size_t s = 0; s < seeds; ++s) {
      const auto result = random_baseline(length, seed + s, n_grid, block, fit_mode);
      slopes.push_back(result.slope);
      if (s == 0) {
        merged = result.report;
        continue;
      }
      for (std::size_t r = 0; r < merged.rows.size(); ++r) {
        auto& row = merged.rows[r];
        const auto& other = result.report.rows[r];
        if (!other.ok && row.ok) {
          row.ok = false;
          row.reason = other.reason;
        }
        row.accuracy += other.accuracy;
        row.lambda_min += other.lambda_min;
      }
    }
    for (auto& row : merged.rows) {
      row.accuracy /= static_cast<double>(seeds);
      row.lambda_min /= static_cast<double>(seeds);
    }
    std::vector<double> sorted = slopes;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                            : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
    if (format == "json") {
      auto j = nlohmann::json::parse(merged.to_json());
      j["slopes"] = slopes;
      j["median_slope"] = median;
      write_text(output, j.dump(2) + "\n", out);
    } else {
      write_text(output, merged.to_csv(), out);
    }
    err << "slope (median of " << seeds << " seeds): " << fmt(median) << '\n';
    return kOk;
  }
  return kUsage;
}

}  // namespace

std::vector<std::size_t> parse_grid(const std::string& text) {
  std::vector<std::size_t> values;
  auto number = [&](const std::string& s) -> std::size_t {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty() || s[0] == '-' || v == 0)
      throw UsageError("bad grid value '" + s + "'");
    return static_cast<std::size_t>(v);
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() < 2 || parts.size() > 3) throw UsageError("grid must be a:b or a:b:step");
    const std::size_t a = number(parts[0]);
    const std::size_t b = number(parts[1]);
    const std::size_t step = parts.size() == 3 ? number(parts[2]) : 1;
    if (b < a) throw UsageError("grid end before start");
    for (std::size_t v = a; v <= b; v += step) values.push_back(v);
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) values.push_back(number(p));
  }
  if (values.empty()) throw UsageError("empty grid");
  return values;
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  try {
    return dispatch(args, in, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_numerical(e.code()) ? kNumericalFailure : kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
}

}  // namespace dlaw::cli
