#include "g2toda/params.hpp"

#include "g2toda/errors.hpp"

namespace g2toda {

void TodaParams::validate() const {
  if (N1 < 0 || N2 < 0) throw ConfigError("vortex counts must be nonnegative");
  if (!(lambda4 > 0) || !(lambda5 > 0) || !std::isfinite(lambda4) || !std::isfinite(lambda5))
    throw ConfigError("lambda4 and lambda5 must be positive and finite");
}

TodaParams TodaParams::symmetric(int N) {
  const double mu6 = std::pow(double(N + 1), 6);
  return {N, N, 1.0 / (3.0 * 1024.0 * mu6), 1.0 / (15.0 * 512.0 * mu6)};
}

TodaParams TodaParams::scaled(int N1, int N2, double lambda_tilde) {
  const double m1 = N1 + 1, m2 = N2 + 1;
  const double d = std::pow(2.0, 3.5) * m1 * m2 * (m1 + m2);
  return {N1, N2, lambda_tilde / (d * d), 1.0 / lambda_tilde};
}

Shape kernel_shape(KernelTag t) {
  const int i = kernel_index(t);
  if (i < 2) return i == 0 ? Shape::L4 : Shape::L5;
  return static_cast<Shape>(2 + (i - 2) / 2);
}

bool kernel_is_sine(KernelTag t) {
  const int i = kernel_index(t);
  return i >= 2 && (i - 2) % 2 == 1;
}

int shape_mode(Shape s, int mu1, int mu2) {
  switch (s) {
    case Shape::L4:
    case Shape::L5: return 0;
    case Shape::C43: return mu1;
    case Shape::C52: return 2 * mu1 + mu2;
    case Shape::C53: return mu1 + mu2;
    case Shape::C54: return mu2;
    case Shape::C61: return 3 * mu1 + 2 * mu2;
    case Shape::C62: return 3 * mu1 + mu2;
  }
  return 0;
}

int kernel_mode(KernelTag t, int mu1, int mu2) { return shape_mode(kernel_shape(t), mu1, mu2); }

std::string shape_name(Shape s) {
  static const char* names[] = {"lambda4", "lambda5", "c43", "c52", "c53", "c54", "c61", "c62"};
  return names[static_cast<int>(s)];
}

std::string kernel_name(KernelTag t) {
  const int i = kernel_index(t);
  if (i < 2) return shape_name(kernel_shape(t));
  return shape_name(kernel_shape(t)) + (kernel_is_sine(t) ? "_2" : "_1");
}

}  // namespace g2toda
