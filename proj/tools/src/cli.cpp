#include "dps_cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dps/analysis.hpp"
#include "dps/codec.hpp"
#include "dps/error.hpp"
#include "dps/gaussian_measures.hpp"
#include "dps/lattice.hpp"
#include "dps/montecarlo.hpp"
#include "dps/sampler.hpp"
#include "dps/suites.hpp"

namespace dps::cli {
namespace {

using nlohmann::ordered_json;

constexpr const char* kToolName = "dps";

// ---------------------------------------------------------------------------
// Parsing helpers

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::UsageError, "cannot parse '" + s + "' as a number for " + what);
  }
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(to_double(item, what));
  if (out.empty()) fail(ErrorCode::UsageError, what + " must be a comma-separated list of numbers");
  return out;
}

Vector parse_vector(const std::string& s, int dim, const std::string& what) {
  if (trim(s).empty()) return Vector::Zero(dim);
  const auto values = parse_list(s, what);
  if (static_cast<int>(values.size()) != dim) {
    fail(ErrorCode::UsageError, what + " needs " + std::to_string(dim) + " comma-separated entries");
  }
  return Eigen::Map<const Vector>(values.data(), dim);
}

// "E8", "Z4", "D3", "A2", optionally prefixed by a scale as in "2*Z1".
Lattice parse_lattice_name(const std::string& spec) {
  const auto star = spec.find('*');
  if (star == std::string::npos) return Lattice::standard(trim(spec));
  const double c = to_double(trim(spec.substr(0, star)), "lattice scale");
  return Lattice::standard(trim(spec.substr(star + 1))).scaled(c);
}

// JSON {"name"?, "n", "basis": rows} or a whitespace-separated matrix with
// one row per line; columns are the generators.
Lattice read_basis_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::UsageError, "cannot open basis file '" + path + "'");
  std::vector<std::vector<double>> rows;
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    const nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.contains("basis")) fail(ErrorCode::UsageError, "'" + path + "' lacks a basis");
    rows = doc["basis"].get<std::vector<std::vector<double>>>();
    if (doc.contains("n") && doc["n"].get<std::size_t>() != rows.size()) {
      fail(ErrorCode::DimensionMismatch, "'n' does not match the basis in '" + path + "'");
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.empty() ? 0 : rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != static_cast<std::size_t>(m.cols())) fail(ErrorCode::NonSquare, "ragged basis");
      for (std::size_t j = 0; j < rows[i].size(); ++j) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
      }
    }
    return Lattice(m, doc.value("name", path));
  }
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<double> row;
    double v = 0.0;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) fail(ErrorCode::UsageError, "non-numeric entry in basis file '" + path + "'");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::UsageError, "basis file '" + path + "' is empty");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) fail(ErrorCode::NonSquare, "basis rows differ in length");
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return Lattice(m, path);
}

// ---------------------------------------------------------------------------
// Output helpers

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

ordered_json ci_json(const CIEstimate& ci) {
  return ordered_json{{"estimate", ci.p_hat}, {"lo", ci.lo}, {"hi", ci.hi}, {"trials", ci.trials}};
}

ordered_json matrix_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

ordered_json vector_json(const Vector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::string kind_name(LatticeKind k) {
  switch (k) {
    case LatticeKind::Diagonal:
      return "diagonal";
    case LatticeKind::Dn:
      return "Dn";
    case LatticeKind::E8:
      return "E8";
    default:
      return "generic";
  }
}

// ---------------------------------------------------------------------------
// Options shared by the subcommands

struct Common {
  std::uint64_t seed = kDefaultSeed;
  int threads = 1;
  std::string output;
  std::string config;
};

struct LatticeOpt {
  std::string name;
  std::string basis_file;

  Lattice get() const {
    if (!basis_file.empty()) return read_basis_file(basis_file);
    return parse_lattice_name(name);
  }
};

struct ChannelOpt {
  std::optional<double> snr;
  std::optional<double> sigma_s2;
  std::optional<double> sigma_w2;

  ChannelParams get() const {
    if (snr && sigma_w2) fail(ErrorCode::UsageError, "give either --snr or --sigma-w2, not both");
    if (snr) return channel_params_from_snr(*snr, sigma_s2.value_or(1.0));
    if (sigma_w2) return channel_params(sigma_s2.value_or(1.0), *sigma_w2);
    fail(ErrorCode::UsageError, "give the channel as --snr or as --sigma-s2/--sigma-w2");
  }
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Random seed (default overridable by DPS_SEED)")->envname("DPS_SEED");
  sub->add_option("--threads", c.threads, "Worker threads; 1 gives bit-exact reproducibility")
      ->check(CLI::Range(1, 1024));
  sub->add_option("-o,--output", c.output, "Output file (default: standard output)");
  sub->add_option("--config", c.config, "key=value configuration file; command-line flags override it");
}

void add_lattice(CLI::App* sub, LatticeOpt& l, const std::string& fallback) {
  sub->add_option("-l,--lattice", l.name, "Lattice name: Z<n>, D<n>, E8, A2, optionally scaled as c*NAME (default " +
                                              fallback + ")");
  sub->add_option("--basis-file", l.basis_file,
                  "Basis matrix file, one row per line; columns are generators (overrides --lattice)");
}

void add_channel(CLI::App* sub, ChannelOpt& ch) {
  sub->add_option("--snr", ch.snr, "Signal-to-noise ratio sigma_s^2 / sigma_w^2 (linear)");
  sub->add_option("--sigma-s2", ch.sigma_s2, "Signal parameter sigma_s^2 (power units, default 1)");
  sub->add_option("--sigma-w2", ch.sigma_w2, "Noise variance sigma_w^2 (power units)");
}

// Canonical text of a subcommand's effective options, excluding those that do
// not affect results.
std::string canonical_config(const CLI::App* sub) {
  std::vector<std::string> lines;
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_name(false, true);
    if (name.empty() || opt->check_lname("help") || opt->check_lname("output") || opt->check_lname("threads") ||
        opt->check_lname("config")) {
      continue;
    }
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = opt->get_default_str();
    }
    lines.push_back(name + "=" + value);
  }
  std::sort(lines.begin(), lines.end());
  std::string out = sub->get_name() + "\n";
  for (const auto& l : lines) out += l + "\n";
  return out;
}

struct Meta {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_hash;

  ordered_json json() const {
    return ordered_json{{"tool", kToolName}, {"version", DPS_VERSION}, {"command", command}, {"seed", seed},
                        {"config_hash", config_hash}};
  }
  std::string csv_comment() const {
    return "# tool=" + std::string(kToolName) + " version=" + DPS_VERSION + " command=" + command +
           " seed=" + std::to_string(seed) + " config_hash=" + config_hash + "\n";
  }
};

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) fail(ErrorCode::UsageError, "cannot open output file '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

void emit_json(std::ostream& os, const Meta& meta, ordered_json body) {
  ordered_json doc;
  doc["meta"] = meta.json();
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
  os << doc.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Simulation shared by simulate and sweep

struct SimOptions {
  std::string dither = "cont";
  std::string fine;
  std::string peak = "off";
  double power = 0.0;
  double modulus = 0.0;
  double eps_peak = 1e-3;
  double epsilon = 0.05;
  std::optional<double> scale;
  std::uint64_t trials = 100000;
  std::uint64_t trials_per_dither = 100;
  std::uint64_t err_inv_trials = kDefaultErrInvTrials;
  std::string trace;
};

void add_sim_options(CLI::App* sub, SimOptions& s) {
  sub->add_option("--dither", s.dither, "Dither mode: none, cont, cont-reduced, discrete[:<fine lattice>]");
  sub->add_option("--fine", s.fine, "Fine lattice for --dither discrete (must contain the scaled lattice)");
  sub->add_option("--peak", s.peak, "Peak-power handling: off, zeroize[:<P>], modb[:<B>]");
  sub->add_option("--power", s.power, "Per-dimension power budget for --peak zeroize (power units)");
  sub->add_option("--modulus", s.modulus, "Coordinate modulus B for --peak modb (default: smallest nested "
                                          "multiple of the peak union bound)");
  sub->add_option("--eps-peak", s.eps_peak, "Target peak-violation probability for the default modulus");
  sub->add_option("--eps", s.epsilon, "Target decoding error probability used to scale the lattice");
  sub->add_option("--scale", s.scale, "Explicit lattice scale (skips the inverse-error-function estimate)");
  sub->add_option("--trials", s.trials, "Channel uses to simulate")->check(CLI::PositiveNumber);
  sub->add_option("--trials-per-dither", s.trials_per_dither, "Channel uses per dither draw")
      ->check(CLI::PositiveNumber);
  sub->add_option("--err-inv-trials", s.err_inv_trials, "Samples for the inverse error function estimate")
      ->check(CLI::Range(std::uint64_t{100}, std::uint64_t{1} << 40));
  sub->add_option("--trace", s.trace, "Write per-trial records to this CSV file");
}

// Splits "mode:value" shorthands such as "discrete:Z8" or "modb:4" into the
// mode and its parameter options.
void normalize_modes(SimOptions& s) {
  auto split_mode = [](std::string& mode) {
    const auto colon = mode.find(':');
    if (colon == std::string::npos) return std::string();
    std::string arg = trim(mode.substr(colon + 1));
    mode = trim(mode.substr(0, colon));
    return arg;
  };
  const std::string dither_arg = split_mode(s.dither);
  if (s.dither != "none" && s.dither != "cont" && s.dither != "cont-reduced" && s.dither != "discrete") {
    fail(ErrorCode::UsageError, "--dither must be none, cont, cont-reduced or discrete[:<lattice>]");
  }
  if (!dither_arg.empty()) s.fine = dither_arg;
  const std::string peak_arg = split_mode(s.peak);
  if (s.peak == "zeroize" && !peak_arg.empty()) s.power = to_double(peak_arg, "--peak zeroize:<P>");
  else if (s.peak == "modb" && !peak_arg.empty()) s.modulus = to_double(peak_arg, "--peak modb:<B>");
  else if (s.peak != "off" && s.peak != "zeroize" && s.peak != "modb") {
    fail(ErrorCode::UsageError, "--peak must be off, zeroize[:<P>] or modb[:<B>]");
  }
}

struct SimResult {
  double err_inv = 0.0;
  double scale = 0.0;
  double modulus = 0.0;
  CIEstimate p_err;
  CIEstimate escape;
  CIEstimate power;
  std::uint64_t encoding_failures = 0;
  std::uint64_t dithers = 0;
  double rate_proxy = 0.0;  // mean entropy of the coding distribution per dimension, nats
};

double estimate_err_inv(const Lattice& lat, const SimOptions& s, const Common& c) {
  return inverse_error_function(lat, s.epsilon, s.err_inv_trials, kDefaultErrInvTol,
                                RunOptions{derive_seed(c.seed, 1), c.threads})
      .value;
}

PeakMode make_peak(const SimOptions& s, const Lattice& scaled, const ChannelParams& params, double& modulus) {
  if (s.peak == "zeroize") {
    if (!(s.power > 0.0)) fail(ErrorCode::UsageError, "--peak zeroize needs --power > 0");
    return PeakZeroize{s.power};
  }
  if (s.peak == "modb") {
    modulus = s.modulus;
    if (!(modulus > 0.0)) {
      // Smallest B >= the union-bound value with B Z^n inside the scaled lattice.
      const int n = scaled.dim();
      const double target = suggest_modulus(params.sigma_s(), n, s.eps_peak);
      const double unit = scaled.kind_scale();
      for (int m = std::max(1, static_cast<int>(std::ceil(target / unit))); m < 100000; ++m) {
        if (scaled.contains_lattice(Lattice((m * unit) * Matrix::Identity(n, n)), 1e-9)) {
          modulus = m * unit;
          break;
        }
      }
      if (!(modulus > 0.0)) fail(ErrorCode::UsageError, "no nested modulus found; pass --modulus");
    }
    return PeakModB{modulus};
  }
  return PeakOff{};
}

SimResult simulate_once(const Lattice& lat, const ChannelParams& params, const SimOptions& s, double err_inv,
                        const Common& c, std::ostream* trace = nullptr) {
  SimResult out;
  out.err_inv = err_inv;
  out.scale = s.scale ? *s.scale : normalize_scale(params, err_inv);
  const Lattice scaled = lat.scaled(out.scale);
  DitherMode dither = DitherNone{};
  if (s.dither == "cont") dither = DitherContinuous{false};
  if (s.dither == "cont-reduced") dither = DitherContinuous{true};
  if (s.dither == "discrete") {
    if (s.fine.empty()) fail(ErrorCode::UsageError, "--dither discrete needs a fine lattice (discrete:<lattice>)");
    dither = DitherDiscrete{parse_lattice_name(s.fine)};
  }
  const PeakMode peak = make_peak(s, scaled, params, out.modulus);
  const Codec codec(CodecConfig{lat, out.scale, params, dither, peak});

  const std::uint64_t per = s.dither == "none" ? kBlockSize : s.trials_per_dither;
  const std::size_t groups = block_count(s.trials, per);
  struct Tally {
    std::uint64_t errors = 0;
    std::uint64_t escapes = 0;
    std::uint64_t failures = 0;
    double power = 0.0;
    double power_sq = 0.0;
    double rate = 0.0;
    std::string rows;
  };
  std::vector<Tally> tallies(groups);
  const int n = lat.dim();
  parallel_blocks(groups, c.threads, [&](std::size_t g) {
    RngStream rng(c.seed, g);
    const Vector t = codec.draw_dither(rng);
    const DiscreteGaussianSampler sampler = codec.coding_sampler(t);
    const std::uint64_t m = std::min<std::uint64_t>(per, s.trials - g * per);
    Tally tally;
    tally.rate = sampler.support().entropy() / n;
    for (std::uint64_t i = 0; i < m; ++i) {
      const TransmissionRecord rec = codec.trial(sampler, t, rng);
      if (trace) {
        tally.rows += std::to_string(g * per + i) + "," + std::to_string(g) + "," + std::to_string(rec.error) + "," +
                      std::to_string(rec.effective_escape) + "," + std::to_string(rec.encoding_failure) + "," +
                      format_number(rec.power) + "\n";
      }
      tally.errors += rec.error;
      tally.escapes += rec.effective_escape;
      tally.failures += rec.encoding_failure;
      const double p = rec.power / params.sigma_s2;
      tally.power += p;
      tally.power_sq += p * p;
    }
    tallies[g] = std::move(tally);
  });
  if (trace) {
    *trace << "trial,dither,error,effective_escape,encoding_failure,power\n";
    for (const auto& t : tallies) *trace << t.rows;
  }
  Tally total;
  double rate_sum = 0.0;
  // Trials sharing a dither are correlated, so the power interval is built
  // from per-dither means when there is more than one dither.
  double group_sum = 0.0;
  double group_sq = 0.0;
  for (std::size_t g = 0; g < groups; ++g) {
    const auto& t = tallies[g];
    total.errors += t.errors;
    total.escapes += t.escapes;
    total.failures += t.failures;
    total.power += t.power;
    total.power_sq += t.power_sq;
    rate_sum += t.rate;
    const double m = t.power / static_cast<double>(std::min<std::uint64_t>(per, s.trials - g * per));
    group_sum += m;
    group_sq += m * m;
  }
  out.p_err = proportion_ci(total.errors, s.trials, c.seed);
  out.escape = proportion_ci(total.escapes, s.trials, c.seed);
  const bool clustered = s.dither != "none" && per > 1 && groups > 1;
  out.power = clustered ? mean_ci(group_sum, group_sq, groups, c.seed)
                        : mean_ci(total.power, total.power_sq, s.trials, c.seed);
  out.power.p_hat = total.power / static_cast<double>(s.trials);
  out.dithers = s.dither == "none" ? 0 : groups;
  out.encoding_failures = total.failures;
  out.rate_proxy = rate_sum / static_cast<double>(groups);
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands

struct Context {
  Common common;
  LatticeOpt lattice;
  ChannelOpt channel;
  SimOptions sim;
  // lattice
  std::string closest;
  // measure / sample
  double sigma = 1.0;
  std::string shift;
  double smoothing_eps = 0.01;
  int flatness_samples = 64;
  std::uint64_t n_samples = 10;
  // analyze / sweep
  std::string snr_grid = "0.25,1,4";
  std::string n_grid = "8,64,512";
  double epsilon = 0.05;
  std::optional<double> gamma;
  std::optional<double> noise_sigma;
  std::string sandwich;
  std::string format = "csv";
  std::uint64_t err_inv_trials = kDefaultErrInvTrials;
  // verify
  std::vector<std::string> suites;
  std::optional<double> sigma_s;
  std::optional<double> snr;
  std::optional<double> suite_eps;
  std::uint64_t suite_trials = 0;
  std::uint64_t suite_dithers = 0;
  bool lattice_given = false;
  // converse
  double sigma_w = 2.0;
  std::uint64_t trials = 100000;
};

int cmd_lattice(const Context& cx, const Meta& meta, std::ostream& os) {
  const Lattice lat = cx.lattice.get();
  ordered_json body;
  body["name"] = lat.name();
  body["n"] = lat.dim();
  body["kind"] = kind_name(lat.kind());
  body["volume"] = lat.volume();
  body["min_distance"] = lat.min_distance();
  body["dual_volume"] = 1.0 / lat.volume();
  body["basis"] = matrix_json(lat.basis());
  body["gram"] = matrix_json(lat.gram());
  if (!cx.closest.empty()) {
    const Vector y = parse_vector(cx.closest, lat.dim(), "--closest");
    const LatticePoint p = closest_point(lat, y);
    ordered_json coords = ordered_json::array();
    for (Eigen::Index i = 0; i < p.coords.size(); ++i) coords.push_back(p.coords(i));
    body["closest"] = {{"query", vector_json(y)},
                       {"coords", coords},
                       {"point", vector_json(p.embedding)},
                       {"residue", vector_json(mod_lattice(lat, y))}};
  }
  emit_json(os, meta, body);
  return kExitOk;
}

int cmd_measure(const Context& cx, const Meta& meta, std::ostream& os) {
  const Lattice lat = cx.lattice.get();
  const Vector t = parse_vector(cx.shift, lat.dim(), "--shift");
  const ThetaSum mass = gaussian_mass(lat, t, cx.sigma);
  const FlatnessBracket flat = flatness_factor(lat, cx.sigma, cx.flatness_samples, cx.common.seed);
  const SmoothingResult smooth = smoothing_parameter(lat, cx.smoothing_eps);
  const NldReport nl = nld(lat, cx.sigma);
  ordered_json body;
  body["lattice"] = lat.name();
  body["sigma"] = cx.sigma;
  body["shift"] = vector_json(t);
  body["mass"] = {{"value", mass.value},
                  {"log_value", mass.log_value},
                  {"truncation_radius", mass.truncation_radius},
                  {"tail_bound", mass.tail_bound}};
  body["mass_zero"] = mass_zero(lat, cx.sigma);
  body["entropy_nats"] = entropy_exact(lat, t, cx.sigma);
  body["flatness"] = {{"lower", flat.lower}, {"upper", flat.upper}};
  body["smoothing"] = {{"epsilon", smooth.epsilon}, {"s", smooth.s}, {"residual", smooth.residual}};
  body["nld"] = {{"nld_nats", nl.nld}, {"poltyrev_limit_nats", nl.poltyrev_limit}, {"margin_nats", nl.margin}};
  emit_json(os, meta, body);
  return kExitOk;
}

int cmd_sample(const Context& cx, const Meta& meta, std::ostream& os) {
  const Lattice lat = cx.lattice.get();
  const Vector t = parse_vector(cx.shift, lat.dim(), "--shift");
  const DiscreteGaussianSampler sampler(DiscreteGaussianSpec{lat, t, cx.sigma, kDefaultSamplerTail});
  const std::uint64_t n = cx.n_samples;
  Matrix draws(lat.dim(), static_cast<Eigen::Index>(n));
  parallel_blocks(block_count(n), cx.common.threads, [&](std::size_t b) {
    RngStream rng(cx.common.seed, b);
    const std::uint64_t start = b * kBlockSize;
    const std::uint64_t m = std::min<std::uint64_t>(kBlockSize, n - start);
    for (std::uint64_t i = 0; i < m; ++i) draws.col(static_cast<Eigen::Index>(start + i)) = sampler.sample(rng);
  });
  os << meta.csv_comment();
  for (int i = 0; i < lat.dim(); ++i) os << (i ? "," : "") << "x" << i;
  os << "\n";
  for (Eigen::Index k = 0; k < draws.cols(); ++k) {
    for (Eigen::Index i = 0; i < draws.rows(); ++i) os << (i ? "," : "") << format_number(draws(i, k));
    os << "\n";
  }
  return kExitOk;
}

ordered_json sim_json(const SimResult& r) {
  ordered_json j;
  j["err_inv"] = r.err_inv;
  j["scale"] = r.scale;
  if (r.modulus > 0.0) j["modulus"] = r.modulus;
  j["p_err"] = ci_json(r.p_err);
  j["effective_escape"] = ci_json(r.escape);
  j["power_ratio"] = ci_json(r.power);
  j["encoding_failures"] = r.encoding_failures;
  j["dithers"] = r.dithers;
  j["rate_proxy_nats"] = r.rate_proxy;
  return j;
}

int cmd_simulate(const Context& cx, const Meta& meta, std::ostream& os) {
  const Lattice lat = cx.lattice.get();
  const ChannelParams params = cx.channel.get();
  const double err_inv = cx.sim.scale ? 0.0 : estimate_err_inv(lat, cx.sim, cx.common);
  std::unique_ptr<std::ofstream> trace;
  if (!cx.sim.trace.empty()) {
    trace = std::make_unique<std::ofstream>(cx.sim.trace);
    if (!*trace) fail(ErrorCode::UsageError, "cannot open trace file '" + cx.sim.trace + "'");
  }
  const SimResult r = simulate_once(lat, params, cx.sim, err_inv, cx.common, trace.get());
  ordered_json body;
  body["lattice"] = lat.name();
  body["channel"] = {{"snr", params.snr},
                     {"sigma_s2", params.sigma_s2},
                     {"sigma_w2", params.sigma_w2},
                     {"alpha", params.alpha},
                     {"sigma_eff2", params.sigma_eff2},
                     {"capacity_nats", capacity(params.snr)}};
  body["dither"] = cx.sim.dither;
  body["peak"] = cx.sim.peak;
  body["epsilon"] = cx.sim.epsilon;
  body["result"] = sim_json(r);
  emit_json(os, meta, body);
  return kExitOk;
}

int cmd_sweep(const Context& cx, const Meta& meta, std::ostream& os) {
  const Lattice lat = cx.lattice.get();
  if (!cx.sim.trace.empty()) fail(ErrorCode::UsageError, "--trace is only available for simulate");
  const auto snrs = parse_list(cx.snr_grid, "--snr-grid");
  const double sigma_s2 = cx.channel.sigma_s2.value_or(1.0);
  const double err_inv = cx.sim.scale ? 0.0 : estimate_err_inv(lat, cx.sim, cx.common);
  os << meta.csv_comment();
  os << "snr,capacity_nats,err_inv,scale,p_err,p_err_lo,p_err_hi,escape,power_ratio,power_ratio_lo,"
        "power_ratio_hi\n";
  for (double snr : snrs) {
    const ChannelParams params = channel_params_from_snr(snr, sigma_s2);
    const SimResult r = simulate_once(lat, params, cx.sim, err_inv, cx.common);
    os << format_number(snr) << "," << format_number(capacity(snr)) << "," << format_number(r.err_inv) << ","
       << format_number(r.scale) << "," << format_number(r.p_err.p_hat) << "," << format_number(r.p_err.lo) << ","
       << format_number(r.p_err.hi) << "," << format_number(r.escape.p_hat) << "," << format_number(r.power.p_hat)
       << "," << format_number(r.power.lo) << "," << format_number(r.power.hi) << "\n";
  }
  return kExitOk;
}

int cmd_verify(const Context& cx, const Meta& meta, std::ostream& os) {
  std::vector<std::string> names = cx.suites;
  if (names.empty() || std::find(names.begin(), names.end(), "all") != names.end()) names = suite_names();
  SuiteOptions opts;
  if (cx.lattice_given) opts.lattice = cx.lattice.get();
  opts.sigma_s = cx.sigma_s;
  opts.epsilon = cx.suite_eps;
  opts.snr = cx.snr;
  opts.trials = cx.suite_trials;
  opts.dithers = cx.suite_dithers;
  opts.run = RunOptions{cx.common.seed, cx.common.threads};
  ordered_json suites = ordered_json::array();
  bool all = true;
  for (const auto& name : names) {
    const SuiteResult r = run_suite(name, opts);
    ordered_json checks = ordered_json::array();
    for (const auto& c : r.checks) {
      checks.push_back({{"label", c.label}, {"value", c.value}, {"bound", c.bound}, {"pass", c.pass},
                        {"detail", c.detail}});
    }
    suites.push_back({{"suite", r.name}, {"pass", r.pass}, {"checks", checks}});
    all = all && r.pass;
  }
  emit_json(os, meta, ordered_json{{"pass", all}, {"suites", suites}});
  return all ? kExitOk : kExitCheckFailed;
}

int cmd_analyze(const Context& cx, const Meta& meta, std::ostream& os) {
  const auto snrs = parse_list(cx.snr_grid, "--snr-grid");
  std::vector<int> ns;
  for (double v : parse_list(cx.n_grid, "--n-grid")) {
    if (v < 1 || v != std::floor(v)) fail(ErrorCode::UsageError, "--n-grid entries must be positive integers");
    ns.push_back(static_cast<int>(v));
  }
  struct Row {
    double snr;
    int n;
    FiniteBlocklengthReport fb;
    DitherRateBound dr;
  };
  std::vector<Row> rows;
  for (double snr : snrs) {
    for (int n : ns) {
      rows.push_back(Row{snr, n, finite_blocklength(snr, n, cx.epsilon, cx.gamma, cx.noise_sigma),
                         dither_rate_bound(snr)});
    }
  }
  if (cx.format == "csv") {
    if (!cx.sandwich.empty()) fail(ErrorCode::UsageError, "--sandwich needs --format json");
    os << meta.csv_comment();
    os << "snr,n,eps,capacity_nats,dispersion_nats2,normal_approx_rate_nats,delta_star_nats,delta_eps_n_nats,"
          "intro_gap_nats,theorem1_gap_nats,dither_rate_nats,no_dither_needed\n";
    for (const auto& r : rows) {
      os << format_number(r.snr) << "," << r.n << "," << format_number(cx.epsilon) << ","
         << format_number(r.fb.capacity) << "," << format_number(r.fb.dispersion) << ","
         << format_number(r.fb.normal_approx_rate) << "," << format_number(r.fb.delta_star) << ","
         << format_number(r.fb.delta_eps_n) << "," << format_number(r.fb.intro_gap) << ","
         << (r.fb.theorem1_gap ? format_number(*r.fb.theorem1_gap) : "") << "," << format_number(r.dr.rate) << ","
         << (r.dr.no_dither_needed ? 1 : 0) << "\n";
    }
    return kExitOk;
  }
  ordered_json table = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json j{{"snr", r.snr},
                   {"n", r.n},
                   {"eps", cx.epsilon},
                   {"capacity_nats", r.fb.capacity},
                   {"dispersion_nats2", r.fb.dispersion},
                   {"normal_approx_rate_nats", r.fb.normal_approx_rate},
                   {"delta_star_nats", r.fb.delta_star},
                   {"delta_eps_n_nats", r.fb.delta_eps_n},
                   {"intro_gap_nats", r.fb.intro_gap},
                   {"theorem1_gap_nats", r.fb.theorem1_gap ? ordered_json(*r.fb.theorem1_gap) : ordered_json()},
                   {"dither_rate_nats", r.dr.rate},
                   {"no_dither_needed", r.dr.no_dither_needed}};
    table.push_back(j);
  }
  ordered_json body{{"omitted_terms", "O(log n / n)"}, {"grid", table}};
  bool ok = true;
  if (!cx.sandwich.empty()) {
    ordered_json sandwiches = ordered_json::array();
    std::uint64_t tag = 0;
    for (const auto& name : split(cx.sandwich, ',')) {
      const Lattice lat = parse_lattice_name(name);
      const SandwichReport s = cdlp_sandwich(lat, cx.epsilon, cx.err_inv_trials, kDefaultErrInvTol,
                                             RunOptions{derive_seed(cx.common.seed, tag++), cx.common.threads});
      sandwiches.push_back({{"lattice", lat.name()},
                            {"eps", cx.epsilon},
                            {"lower", s.lower},
                            {"mid", s.mid.value},
                            {"mid_lo", s.mid.lo},
                            {"mid_hi", s.mid.hi},
                            {"upper", s.upper},
                            {"ok", s.ok}});
      ok = ok && s.ok;
    }
    body["sandwich"] = sandwiches;
  }
  emit_json(os, meta, body);
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_converse(const Context& cx, const Meta& meta, std::ostream& os) {
  const Lattice lat = cx.lattice.get();
  const ConverseReport r = converse_experiment(lat, cx.sigma, cx.sigma_w, cx.trials,
                                               RunOptions{cx.common.seed, cx.common.threads});
  ordered_json body;
  body["lattice"] = lat.name();
  body["sigma_s"] = cx.sigma;
  body["sigma_w"] = cx.sigma_w;
  body["p0"] = r.p0;
  body["entropy_rate_nats"] = r.entropy_rate;
  body["entropy_upper_nats"] = r.entropy_upper;
  body["half_gap"] = r.half_gap;
  body["p_err"] = ci_json(r.p_err);
  body["applies"] = r.applies;
  body["pass_entropy"] = r.pass_entropy;
  body["pass_error"] = r.pass_error;
  emit_json(os, meta, body);
  return r.pass_entropy && r.pass_error ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// Config files

// Reads flat key=value lines ('#' starts a comment) into --key=value tokens.
std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::UsageError, "cannot open config file '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::UsageError, path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key == "config") fail(ErrorCode::UsageError, "config files cannot include other config files");
    args.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
  }
  return args;
}

// Splices config-file options in front of the command-line ones so that later
// (command-line) values win.
std::vector<std::string> expand_config(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::vector<std::string> from_file;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      from_file = read_config(args[i + 1]);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      from_file = read_config(args[i].substr(9));
      break;
    }
  }
  if (from_file.empty() || args.size() < 2) return args;
  std::vector<std::string> out = {args[0], args[1]};
  out.insert(out.end(), from_file.begin(), from_file.end());
  out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dithered probabilistic shaping with discrete Gaussians over lattices.\n"
               "Rates are in nats, probabilities are raw proportions with 99% intervals, powers are "
               "ratios to the signal parameter sigma_s^2.",
               kToolName};
  app.set_version_flag("--version", DPS_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();

  Context cx;
  std::map<CLI::App*, std::function<int(const Context&, const Meta&, std::ostream&)>> handlers;
  std::map<CLI::App*, std::string> default_lattice;

  auto* lat = app.add_subcommand("lattice", "Lattice invariants and closest-point queries (JSON)");
  add_common(lat, cx.common);
  add_lattice(lat, cx.lattice, "E8");
  default_lattice[lat] = "E8";
  lat->add_option("--closest", cx.closest, "Comma-separated query point for closest_point and mod_lattice");
  lat->footer("Output: name, dim, kind, volume, min_distance, basis (columns are generators), gram.");
  handlers[lat] = cmd_lattice;

  auto* meas = app.add_subcommand("measure", "Gaussian mass, entropy, flatness and smoothing (JSON)");
  add_common(meas, cx.common);
  add_lattice(meas, cx.lattice, "Z1");
  default_lattice[meas] = "Z1";
  meas->add_option("--sigma", cx.sigma, "Gaussian parameter sigma")->check(CLI::PositiveNumber);
  meas->add_option("--shift", cx.shift, "Comma-separated coset shift t (default 0)");
  meas->add_option("--smoothing-eps", cx.smoothing_eps, "epsilon for the smoothing parameter");
  meas->add_option("--flatness-samples", cx.flatness_samples, "Sample points for the flatness lower bound");
  meas->footer("Output: mass (f_sigma(L + t), density units), mass_zero (probability), entropy_nats, "
               "flatness {lower, upper} (ratio), smoothing {s}, nld (nats per dimension).");
  handlers[meas] = cmd_measure;

  auto* samp = app.add_subcommand("sample", "Samples of the discrete Gaussian on a coset (CSV)");
  add_common(samp, cx.common);
  add_lattice(samp, cx.lattice, "Z1");
  default_lattice[samp] = "Z1";
  samp->add_option("--sigma", cx.sigma, "Gaussian parameter sigma")->check(CLI::PositiveNumber);
  samp->add_option("--shift", cx.shift, "Comma-separated coset shift t (default 0)");
  samp->add_option("--n-samples", cx.n_samples, "Number of samples")->check(CLI::PositiveNumber);
  samp->footer("Output: one sample per line, columns x0..x{n-1} (coordinates).");
  handlers[samp] = cmd_sample;

  auto* sim = app.add_subcommand("simulate", "End-to-end transmission over the AWGN channel (JSON)");
  add_common(sim, cx.common);
  add_lattice(sim, cx.lattice, "E8");
  default_lattice[sim] = "E8";
  add_channel(sim, cx.channel);
  add_sim_options(sim, cx.sim);
  sim->footer("Output: p_err and effective_escape (probabilities, 99% Clopper-Pearson), power_ratio "
              "(|X|^2 / (n sigma_s^2), 99% normal interval), err_inv, scale, capacity_nats.");
  handlers[sim] = cmd_simulate;

  auto* sweep = app.add_subcommand("sweep", "Simulation over an SNR grid (CSV)");
  add_common(sweep, cx.common);
  add_lattice(sweep, cx.lattice, "E8");
  default_lattice[sweep] = "E8";
  sweep->add_option("--snr-grid", cx.snr_grid, "Comma-separated SNR values (linear)");
  sweep->add_option("--sigma-s2", cx.channel.sigma_s2, "Signal parameter sigma_s^2 (power units, default 1)");
  add_sim_options(sweep, cx.sim);
  sweep->footer("Columns: snr (linear), capacity_nats, err_inv, scale, p_err[_lo,_hi] (probability), escape "
                "(probability), power_ratio[_lo,_hi] (|X|^2 / (n sigma_s^2)).");
  handlers[sweep] = cmd_sweep;

  auto* ver = app.add_subcommand("verify", "Run verification suites (JSON verdicts)");
  add_common(ver, cx.common);
  auto* lat_opt = ver->add_option("-l,--lattice", cx.lattice.name, "Override the suite lattices");
  ver->add_option("--basis-file", cx.lattice.basis_file, "Override the suite lattices with a basis file");
  ver->add_option("--suite", cx.suites, "Suite name or 'all'; repeatable")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  ver->add_option("--sigma-s", cx.sigma_s, "Override sigma_s");
  ver->add_option("--snr", cx.snr, "Override the SNR (linear)");
  ver->add_option("--eps", cx.suite_eps, "Override epsilon");
  ver->add_option("--trials", cx.suite_trials, "Override the sample count (per dither where applicable)");
  ver->add_option("--dithers", cx.suite_dithers, "Override the number of dithers");
  ver->footer("Suites: sampling-lemma, discrete-sampling-lemma, negative-moment, chernoff, tail-bounds, "
              "markov, converse, theorem1, genie. Exit status 1 when any check fails.");
  handlers[ver] = cmd_verify;

  auto* ana = app.add_subcommand("analyze", "Finite-blocklength calculators and smoothing sandwich");
  add_common(ana, cx.common);
  ana->add_option("--snr-grid", cx.snr_grid, "Comma-separated SNR values (linear)");
  ana->add_option("--n-grid", cx.n_grid, "Comma-separated block lengths");
  ana->add_option("--eps", cx.epsilon, "Error probability")->check(CLI::Range(1e-300, 0.5));
  ana->add_option("--gamma", cx.gamma, "Normalized volume-to-noise ratio gamma for the theorem1_gap column");
  ana->add_option("--noise-sigma", cx.noise_sigma, "Noise sigma for delta_star (default 1 / sqrt(1 + snr))");
  ana->add_option("--sandwich", cx.sandwich, "Comma-separated lattices for the smoothing sandwich (JSON only)");
  ana->add_option("--err-inv-trials", cx.err_inv_trials, "Samples for the inverse error function");
  ana->add_option("--format", cx.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  ana->footer("Columns: capacity_nats, dispersion_nats2, normal_approx_rate_nats, delta_star_nats, "
              "delta_eps_n_nats, intro_gap_nats, theorem1_gap_nats (nats per dimension), dither_rate_nats "
              "(nats per channel use), no_dither_needed (0/1). O(log n / n) terms are omitted.");
  handlers[ana] = cmd_analyze;

  auto* conv = app.add_subcommand("converse", "Converse experiment without dither (JSON)");
  add_common(conv, cx.common);
  add_lattice(conv, cx.lattice, "Z1");
  default_lattice[conv] = "Z1";
  conv->add_option("--sigma-s", cx.sigma, "Signal parameter sigma_s")->check(CLI::PositiveNumber);
  conv->add_option("--sigma-w", cx.sigma_w, "Noise standard deviation sigma_w")->check(CLI::PositiveNumber);
  conv->add_option("--trials", cx.trials, "Channel uses")->check(CLI::PositiveNumber);
  conv->footer("Output: p0 (probability), entropy_rate_nats, entropy_upper_nats, half_gap, p_err (99% CI). "
               "Exit status 1 when a bound is violated.");
  handlers[conv] = cmd_converse;

  CLI::App* active = nullptr;
  try {
    const std::vector<std::string> args = expand_config(argc, argv);
    std::vector<const char*> cargs;
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
    for (auto* sub : app.get_subcommands()) active = sub;
    if (cx.lattice.name.empty()) cx.lattice.name = default_lattice[active];
    if (active == sim || active == sweep) normalize_modes(cx.sim);
    cx.lattice_given = lat_opt->count() > 0 || !cx.lattice.basis_file.empty();
    const Meta meta{active->get_name(), cx.common.seed, hex64(fnv1a(canonical_config(active)))};
    Sink sink(cx.common.output, out);
    const int code = handlers.at(active)(cx, meta, sink.get());
    sink.get().flush();
    return code;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << kToolName << ": " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << kToolName << " " << (active ? active->get_name() : std::string("")) << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << kToolName << ": " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace dps::cli
