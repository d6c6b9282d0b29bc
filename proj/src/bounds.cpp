#include "equipart/error.hpp"
#include "equipart/oracles.hpp"

namespace equipart {

using nlohmann::json;

bool is_prime(int r) {
  if (r < 2) return false;
  for (int k = 2; k * k <= r; ++k) {
    if (r % k == 0) return false;
  }
  return true;
}

BoundsReport bounds(int n, int r, int d) {
  if (n < 1 || d < 1 || r < 2) throw InputError("bounds: need n >= 1, r >= 2 and d >= 1");
  BoundsReport b{n, r, d, {}, {}, {}, {}, {}, {}};
  const long long N = n, R = r, D = d;

  if (is_prime(r) && n % r == 0) {
    // ceil((t d (r-1) + t) / (r-1) - 1) = t d - 1 + ceil(t / (r-1))
    const long long t = N / R;
    b.lower_M_prime = t * D - 1 + (t + R - 2) / (R - 1);
  }
  if (r == 2) {
    const long long t = N / 2;
    b.lower_M_dprime = N % 2 == 0 ? t * (D + 1) - 1 : t * (D + 1);
  }
  b.upper_M_dprime = D * (N - 1) / (R - 1);
  if (n == 2 * r - 1) {
    b.upper_M = D + 1;
  } else if (n == 5 && r == 2 && d == 2) {
    b.upper_M = 7;
  }

  if (n == r) {
    b.exact_M = D;
  } else if (d == 1) {
    b.exact_M = (N - 1) / (R - 1);
  } else if (n == 3 && r == 2) {
    b.exact_M = D + 1;
  }
  if (r == 2 && n == 2) {
    b.exact_M_dprime = D;
  } else if (r == 2 && n == 3) {
    b.exact_M_dprime = D + 1;
  } else if (r == 2 && d == 1) {
    b.exact_M_dprime = N - 1;
  } else if (n == r && r % 2 == 1) {
    // Concentric spheres: the first cut must give both measures the same
    // share k/r != 1/2, which needs two different distances to the center.
    b.exact_M_dprime = 1;
  }
  return b;
}

json bounds_to_json(const BoundsReport& b) {
  auto opt = [](const std::optional<long long>& v) { return v ? json(*v) : json(nullptr); };
  return {{"n", b.n},
          {"r", b.r},
          {"d", b.d},
          {"lower_M_prime", opt(b.lower_M_prime)},
          {"lower_M_dprime", opt(b.lower_M_dprime)},
          {"upper_M_dprime", opt(b.upper_M_dprime)},
          {"upper_M", opt(b.upper_M)},
          {"exact_M", opt(b.exact_M)},
          {"exact_M_dprime", opt(b.exact_M_dprime)},
          {"applicable",
           {{"lower_M_prime", b.lower_M_prime.has_value()},
            {"lower_M_dprime", b.lower_M_dprime.has_value()},
            {"upper_M_dprime", b.upper_M_dprime.has_value()},
            {"upper_M", b.upper_M.has_value()},
            {"exact_M", b.exact_M.has_value()},
            {"exact_M_dprime", b.exact_M_dprime.has_value()}}}};
}

}  // namespace equipart
