#include "proxsplit/restoration.hpp"

namespace proxsplit {

const ScalarPotential& SubbandPrior::for_band(int band) const {
  const auto it = bands.find(band);
  return it == bands.end() ? fallback : it->second;
}

RestorationProblem::RestorationProblem(const RestorationSetup& setup) {
  require(setup.width >= 1 && setup.height >= 1, "restoration: empty image");
  require(setup.z.size() == static_cast<std::size_t>(setup.width * setup.height),
          "restoration: observation size differs from width * height");
  require(setup.theta > 0.0 && std::isfinite(setup.theta), "restoration: theta must be > 0");

  FrameOp frame(setup.frame, setup.width, setup.height, setup.levels);
  BlurOp blur(setup.blur_q, setup.width, setup.height);
  state_ = std::make_shared<State>(State{setup, blur, FrameBoxConstraint(frame), {}, nullptr});
  auto& st = *state_;

  for (int band : frame.subband_map()) st.potentials.push_back(setup.prior.for_band(band));

  const auto pixels = static_cast<std::size_t>(frame.pixels());
  const auto family = NoiseFamily::uniform(setup.noise, pixels, setup.alpha);
  Observation obs(setup.noise, setup.z);
  const auto chain = blur_synthesis_chain(blur, frame);
  opnorm_ = opnorm_estimate(chain.forward, chain.adjoint, chain.dim_in, 100, setup.opnorm_seed);
  auto ext = ExtensionParams::build(family, obs, setup.theta, setup.epsilon);
  st.term = std::make_unique<SmoothDataTerm>(family, std::move(obs), std::move(ext), chain, opnorm_);

  const std::shared_ptr<const State> s = state_;
  composite_.dim = frame.coeff_count();
  composite_.f = [s](const Vec& x) {
    double total = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) total += s->potentials[static_cast<std::size_t>(k)](x[k]);
    return total;
  };
  composite_.prox_f = [s](double gamma, const Vec& y) {
    Vec out(y.size());
    for (Eigen::Index k = 0; k < y.size(); ++k)
      out[k] = prox_scalar(s->potentials[static_cast<std::size_t>(k)], gamma, y[k]);
    return out;
  };
  composite_.g = [s](const Vec& x) { return s->term->value(x); };
  composite_.grad_g = [s](const Vec& x) { return s->term->gradient(x); };
  composite_.beta = st.term->beta();
  composite_.project_C = [s](const Vec& x) { return s->constraint.project(x); };
  composite_.inf_g_on_C = st.term->analytic_lower_bound();
}

Vec RestorationProblem::degraded_image() const {
  const auto& z = state_->setup.z;
  Vec y = Eigen::Map<const Vec>(z.data(), static_cast<Eigen::Index>(z.size()));
  if (state_->setup.noise == NoiseKind::Poisson) y /= state_->setup.alpha;
  return y;
}

Vec RestorationProblem::initial_point() const {
  const FrameOp& f = frame();
  return state_->constraint.project(f.analysis(degraded_image()) / f.nu());
}

Vec RestorationProblem::image(const Vec& coeffs) const { return frame().synthesis(coeffs); }

}  // namespace proxsplit
