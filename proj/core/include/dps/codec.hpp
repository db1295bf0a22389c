#pragma once

#include <memory>
#include <variant>

#include "dps/lattice.hpp"
#include "dps/rng.hpp"
#include "dps/sampler.hpp"

namespace dps {

// Power-constrained AWGN channel with signal parameter sigma_s^2 and noise
// variance sigma_w^2, plus the MMSE quantities derived from them.
struct ChannelParams {
  double sigma_s2 = 1.0;
  double sigma_w2 = 1.0;
  double snr = 1.0;
  double alpha = 0.5;       // sigma_s^2 / (sigma_s^2 + sigma_w^2)
  double sigma_eff2 = 0.5;  // sigma_s^2 sigma_w^2 / (sigma_s^2 + sigma_w^2)

  double sigma_s() const;
  double sigma_w() const;
  double sigma_eff() const;
};

ChannelParams channel_params(double sigma_s2, double sigma_w2);
// sigma_w^2 = sigma_s^2 / snr.
ChannelParams channel_params_from_snr(double snr, double sigma_s2 = 1.0);

// Lattice scale s = err_inv * sigma_eff, so the scaled lattice has escape
// probability epsilon under N(0, sigma_eff^2 I).
double normalize_scale(const ChannelParams& params, double err_inv);

struct DitherNone {};
struct DitherContinuous {
  bool reduce = false;  // reduce T into the Voronoi cell of the scaled lattice
};
struct DitherDiscrete {
  Lattice fine;  // T ~ D_{fine, sigma_s}, reduced mod the scaled coding lattice
};
using DitherMode = std::variant<DitherNone, DitherContinuous, DitherDiscrete>;

struct PeakOff {};
struct PeakZeroize {
  double power = 0.0;  // per-dimension budget P; codewords with |X|^2 > n P are replaced by 0
};
struct PeakModB {
  double modulus = 0.0;  // each coordinate reduced to [-B/2, B/2)
};
using PeakMode = std::variant<PeakOff, PeakZeroize, PeakModB>;

struct CodecConfig {
  Lattice lattice;  // unscaled coding lattice
  double scale = 1.0;
  ChannelParams params;
  DitherMode dither = DitherNone{};
  PeakMode peak = PeakOff{};
};

struct Encoded {
  Vector x;
  Vector dither;
  bool encoding_failure = false;
};

struct TransmissionRecord {
  Vector dither;
  Vector x;
  Vector noise;
  Vector y;
  Vector x_hat;
  bool error = false;
  bool encoding_failure = false;
  // (alpha - 1) X + alpha W falls outside the Voronoi cell of the scaled lattice
  bool effective_escape = false;
  double power = 0.0;  // |X|^2 / n
};

class Codec {
 public:
  // Throws InvalidParams (scale, modulus) and NotNested (B Z^n or fine lattice).
  explicit Codec(CodecConfig config);

  const CodecConfig& config() const { return config_; }
  const Lattice& scaled_lattice() const { return scaled_; }
  int dim() const { return scaled_.dim(); }

  Vector draw_dither(RngStream& rng) const;
  // Sampler for D_{s Lambda + t, sigma_s}.
  DiscreteGaussianSampler coding_sampler(const Vector& dither) const;

  Encoded encode(RngStream& rng) const;
  Encoded encode(const DiscreteGaussianSampler& sampler, const Vector& dither, RngStream& rng) const;
  Vector transmit(const Vector& x, RngStream& rng) const;
  Vector decode(const Vector& dither, const Vector& y) const;
  // Coordinate equality (modulo B Z^n in ModB mode).
  bool same_codeword(const Vector& x, const Vector& x_hat) const;

  TransmissionRecord trial(RngStream& rng) const;
  TransmissionRecord trial(const DiscreteGaussianSampler& sampler, const Vector& dither, RngStream& rng) const;

 private:
  CodecConfig config_;
  Lattice scaled_;
  std::shared_ptr<const DiscreteGaussianSampler> fixed_sampler_;
  std::shared_ptr<const DiscreteDither> discrete_dither_;
};

// Density of the effective noise for the centered coding distribution:
// f_{sigma_eff}(w) f_{sqrt(alpha) sigma_s}(Lambda + w) / f_{sigma_s}(Lambda).
double effective_noise_pdf(const Lattice& lattice, const ChannelParams& params, const Vector& w);

struct EffectiveNoiseBounds {
  double pdf_upper = 0.0;   // (1 + flatness(sqrt(alpha) sigma_s)) f_{sigma_eff}(w)
  double tail_bound = 0.0;  // exp(-(n/4)(eps^2 - eps^3)) for |W_eff| > sqrt((1 + eps) n) sigma_eff
};
EffectiveNoiseBounds effective_noise_bounds(const Lattice& fine, const ChannelParams& params, const Vector& w,
                                            double epsilon);

// Modulus from the peak union bound: sigma_s sqrt(2 log(2 n / eps_peak)).
double suggest_modulus(double sigma_s, int n, double eps_peak);

// Coordinatewise representative in [-B/2, B/2).
Vector reduce_mod_b(const Vector& x, double modulus);

}  // namespace dps
