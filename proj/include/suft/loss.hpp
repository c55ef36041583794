#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace suft {

// Pointwise loss between two reals. L1 satisfies the quadrangle inequality
// L(x,y) - L(x',y') <= L(x,x') + L(y,y'); L2 does not, which is why bound
// reports computed under L2 are never asserted.
enum class Loss { L1, L2 };

inline double loss_eval(Loss kind, double a, double b) {
  const double d = a - b;
  return kind == Loss::L1 ? std::fabs(d) : d * d;
}

// d/db L(a, b). The L1 subgradient at a tie is 0.
inline double loss_grad_wrt_second(Loss kind, double a, double b) {
  if (kind == Loss::L2) return 2.0 * (b - a);
  if (b > a) return 1.0;
  if (b < a) return -1.0;
  return 0.0;
}

inline Loss loss_from_string(const std::string& s) {
  if (s == "l1" || s == "L1") return Loss::L1;
  if (s == "l2" || s == "L2") return Loss::L2;
  throw std::invalid_argument("unknown loss kind: " + s);
}

inline const char* loss_to_string(Loss kind) {
  return kind == Loss::L1 ? "l1" : "l2";
}

}  // namespace suft
