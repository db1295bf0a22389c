#include "dps/codec.hpp"

#include <cmath>

#include "dps/error.hpp"
#include "dps/gaussian_measures.hpp"

namespace dps {

double ChannelParams::sigma_s() const { return std::sqrt(sigma_s2); }
double ChannelParams::sigma_w() const { return std::sqrt(sigma_w2); }
double ChannelParams::sigma_eff() const { return std::sqrt(sigma_eff2); }

ChannelParams channel_params(double sigma_s2, double sigma_w2) {
  if (!(sigma_s2 > 0.0) || !(sigma_w2 > 0.0) || !std::isfinite(sigma_s2) || !std::isfinite(sigma_w2)) {
    fail(ErrorCode::NonPositive, "signal and noise variances must be positive");
  }
  ChannelParams p;
  p.sigma_s2 = sigma_s2;
  p.sigma_w2 = sigma_w2;
  p.snr = sigma_s2 / sigma_w2;
  p.alpha = sigma_s2 / (sigma_s2 + sigma_w2);
  p.sigma_eff2 = sigma_s2 * sigma_w2 / (sigma_s2 + sigma_w2);
  return p;
}

ChannelParams channel_params_from_snr(double snr, double sigma_s2) {
  if (!(snr > 0.0)) fail(ErrorCode::NonPositive, "snr must be positive");
  return channel_params(sigma_s2, sigma_s2 / snr);
}

double normalize_scale(const ChannelParams& params, double err_inv) {
  if (!(err_inv > 0.0)) fail(ErrorCode::NonPositive, "err_inv must be positive");
  return err_inv * params.sigma_eff();
}

Vector reduce_mod_b(const Vector& x, double modulus) {
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out(i) = x(i) - modulus * std::floor(x(i) / modulus + 0.5);
  }
  return out;
}

Codec::Codec(CodecConfig config) : config_(std::move(config)), scaled_(config_.lattice) {
  if (!(config_.scale > 0.0) || !std::isfinite(config_.scale)) fail(ErrorCode::InvalidParams, "scale must be positive");
  scaled_ = config_.lattice.scaled(config_.scale);
  const int n = scaled_.dim();
  if (const auto* modb = std::get_if<PeakModB>(&config_.peak)) {
    if (!(modb->modulus > 0.0)) fail(ErrorCode::InvalidParams, "modulus must be positive");
    if (!scaled_.contains_lattice(Lattice(modb->modulus * Matrix::Identity(n, n)), 1e-9)) {
      fail(ErrorCode::NotNested, "B Z^n is not contained in the scaled lattice");
    }
  }
  if (const auto* zero = std::get_if<PeakZeroize>(&config_.peak)) {
    if (!(zero->power > 0.0)) fail(ErrorCode::InvalidParams, "power budget must be positive");
  }
  if (std::holds_alternative<DitherNone>(config_.dither)) {
    DiscreteGaussianSpec spec{scaled_, Vector::Zero(n), config_.params.sigma_s(), kDefaultSamplerTail};
    fixed_sampler_ = std::make_shared<const DiscreteGaussianSampler>(spec);
  }
  if (const auto* disc = std::get_if<DitherDiscrete>(&config_.dither)) {
    discrete_dither_ = std::make_shared<const DiscreteDither>(scaled_, disc->fine, config_.params.sigma_s());
  }
}

Vector Codec::draw_dither(RngStream& rng) const {
  const int n = dim();
  if (std::holds_alternative<DitherNone>(config_.dither)) return Vector::Zero(n);
  if (const auto* cont = std::get_if<DitherContinuous>(&config_.dither)) {
    return sample_dither_continuous(config_.params.sigma_s(), n, rng, cont->reduce ? &scaled_ : nullptr);
  }
  return discrete_dither_->sample(rng);
}

DiscreteGaussianSampler Codec::coding_sampler(const Vector& dither) const {
  if (fixed_sampler_ && dither.isZero(0.0)) return *fixed_sampler_;
  return DiscreteGaussianSampler(DiscreteGaussianSpec{scaled_, dither, config_.params.sigma_s(), kDefaultSamplerTail});
}

Encoded Codec::encode(const DiscreteGaussianSampler& sampler, const Vector& dither, RngStream& rng) const {
  Encoded out;
  out.dither = dither;
  out.x = sampler.sample(rng);
  if (const auto* zero = std::get_if<PeakZeroize>(&config_.peak)) {
    if (out.x.squaredNorm() > dim() * zero->power) {
      out.x.setZero();
      out.encoding_failure = true;
    }
  } else if (const auto* modb = std::get_if<PeakModB>(&config_.peak)) {
    out.x = reduce_mod_b(out.x, modb->modulus);
  }
  return out;
}

Encoded Codec::encode(RngStream& rng) const {
  const Vector t = draw_dither(rng);
  if (fixed_sampler_) return encode(*fixed_sampler_, t, rng);
  return encode(coding_sampler(t), t, rng);
}

Vector Codec::transmit(const Vector& x, RngStream& rng) const {
  return x + sample_normal(config_.params.sigma_w(), static_cast<int>(x.size()), rng);
}

Vector Codec::decode(const Vector& dither, const Vector& y) const {
  if (y.size() != dim() || dither.size() != dim()) fail(ErrorCode::DimensionMismatch, "decoder input has wrong size");
  return dither + closest_point(scaled_, config_.params.alpha * y - dither).embedding;
}

bool Codec::same_codeword(const Vector& x, const Vector& x_hat) const {
  if (const auto* modb = std::get_if<PeakModB>(&config_.peak)) {
    const Vector d = (x_hat - x) / modb->modulus;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (std::abs(d(i) - std::round(d(i))) > 1e-6) return false;
    }
    return true;
  }
  // Both are points of the same coset; compare lattice coordinates.
  const Vector diff = x_hat - x;
  const IntVector coords = scaled_.coords_of(diff);
  return (coords.array() == 0).all();
}

TransmissionRecord Codec::trial(const DiscreteGaussianSampler& sampler, const Vector& dither, RngStream& rng) const {
  TransmissionRecord rec;
  Encoded enc = encode(sampler, dither, rng);
  rec.dither = std::move(enc.dither);
  rec.x = std::move(enc.x);
  rec.encoding_failure = enc.encoding_failure;
  rec.noise = sample_normal(config_.params.sigma_w(), dim(), rng);
  rec.y = rec.x + rec.noise;
  rec.x_hat = decode(rec.dither, rec.y);
  rec.error = rec.encoding_failure || !same_codeword(rec.x, rec.x_hat);
  const double alpha = config_.params.alpha;
  const Vector w_eff = (alpha - 1.0) * rec.x + alpha * rec.noise;
  rec.effective_escape = !(closest_point(scaled_, w_eff).coords.array() == 0).all();
  rec.power = rec.x.squaredNorm() / dim();
  return rec;
}

TransmissionRecord Codec::trial(RngStream& rng) const {
  const Vector t = draw_dither(rng);
  if (fixed_sampler_) return trial(*fixed_sampler_, t, rng);
  return trial(coding_sampler(t), t, rng);
}

double effective_noise_pdf(const Lattice& lattice, const ChannelParams& params, const Vector& w) {
  if (w.size() != lattice.dim()) fail(ErrorCode::DimensionMismatch, "w has wrong dimension");
  const Vector zero = Vector::Zero(lattice.dim());
  const double sigma_s = params.sigma_s();
  const double numerator = gaussian_mass(lattice, w, std::sqrt(params.alpha) * sigma_s).log_value;
  const double denominator = gaussian_mass(lattice, zero, sigma_s).log_value;
  return gaussian_pdf(params.sigma_eff(), w) * std::exp(numerator - denominator);
}

EffectiveNoiseBounds effective_noise_bounds(const Lattice& fine, const ChannelParams& params, const Vector& w,
                                            double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail(ErrorCode::InvalidParams, "epsilon must lie in (0, 1)");
  if (w.size() != fine.dim()) fail(ErrorCode::DimensionMismatch, "w has wrong dimension");
  const int n = fine.dim();
  EffectiveNoiseBounds out;
  const double flat = flatness_upper(fine, std::sqrt(params.alpha) * params.sigma_s());
  out.pdf_upper = (1.0 + flat) * gaussian_pdf(params.sigma_eff(), w);
  out.tail_bound = std::exp(-0.25 * n * (epsilon * epsilon - epsilon * epsilon * epsilon));
  return out;
}

double suggest_modulus(double sigma_s, int n, double eps_peak) {
  if (!(sigma_s > 0.0)) fail(ErrorCode::NonPositive, "sigma_s must be positive");
  if (n < 1 || !(eps_peak > 0.0 && eps_peak < 1.0)) fail(ErrorCode::InvalidParams, "need n >= 1 and eps in (0, 1)");
  return sigma_s * std::sqrt(2.0 * std::log(2.0 * n / eps_peak));
}

}  // namespace dps
