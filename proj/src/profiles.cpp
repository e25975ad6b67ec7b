#include "g2toda/profiles.hpp"

namespace g2toda {

ScaleConstants scale_constants(const TodaParams& p) {
  p.validate();
  const auto L = make_lambdas<long double>(p);
  ScaleConstants sc;
  for (int i = 0; i < 7; ++i) {
    sc.log_lambda[i] = double(std::log(L.l[i]));
    sc.lambda[i] = double(L.l[i]);
  }
  return sc;
}

RadialProfiles radial_profiles(const TodaParams& p, double r) {
  const auto L = make_lambdas<double>(p);
  return {rho1_inv(L, r), rho2_inv(L, r)};
}

}  // namespace g2toda
