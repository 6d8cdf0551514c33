#include "oce/disutility.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "oce/errors.hpp"

namespace oce {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double parse_number(std::string_view text, std::string_view whole) {
  double out = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || first == last || !std::isfinite(out)) {
    throw DomainError("invalid disutility spec '" + std::string(whole) +
                      "': bad number '" + std::string(text) + "'");
  }
  return out;
}

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

Disutility Disutility::identity() { return Disutility(Identity{}); }

Disutility Disutility::entropic(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw DomainError("entropic disutility needs gamma > 0");
  }
  return Disutility(Entropic{gamma});
}

Disutility Disutility::mean_variance(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw DomainError("mean-variance disutility needs c > 0");
  }
  return Disutility(MeanVariance{c});
}

Disutility Disutility::cvar(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("cvar disutility needs alpha in (0, 1]");
  }
  return Disutility(CVaR{alpha});
}

Disutility Disutility::soft_cvar(double gamma1, double gamma2) {
  if (!(gamma1 > 1.0) || !std::isfinite(gamma1)) {
    throw DomainError("soft-cvar disutility needs gamma1 > 1");
  }
  if (!(gamma2 >= 0.0 && gamma2 < 1.0)) {
    throw DomainError("soft-cvar disutility needs gamma2 in [0, 1)");
  }
  return Disutility(SoftCVaR{gamma1, gamma2});
}

Disutility Disutility::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const std::string_view args =
      colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  const bool has_args = colon != std::string_view::npos;

  auto fail = [&](const std::string& why) -> Disutility {
    throw DomainError("invalid disutility spec '" + std::string(text) + "': " + why);
  };

  if (name == "identity") {
    if (has_args) return fail("identity takes no parameters");
    return identity();
  }
  if (!has_args) return fail("missing parameters");
  if (name == "entropic") return entropic(parse_number(args, text));
  if (name == "meanvar") return mean_variance(parse_number(args, text));
  if (name == "cvar") return cvar(parse_number(args, text));
  if (name == "softcvar") {
    const auto comma = args.find(',');
    if (comma == std::string_view::npos) return fail("softcvar needs G1,G2");
    return soft_cvar(parse_number(args.substr(0, comma), text),
                     parse_number(args.substr(comma + 1), text));
  }
  return fail("unknown kind '" + std::string(name) + "'");
}

std::string Disutility::to_string() const {
  return std::visit(
      Overloaded{
          [](const Identity&) { return std::string("identity"); },
          [](const Entropic& p) { return "entropic:" + format_number(p.gamma); },
          [](const MeanVariance& p) { return "meanvar:" + format_number(p.c); },
          [](const CVaR& p) { return "cvar:" + format_number(p.alpha); },
          [](const SoftCVaR& p) {
            return "softcvar:" + format_number(p.gamma1) + "," + format_number(p.gamma2);
          },
      },
      params_);
}

Interval Disutility::validity_domain() const {
  if (const auto* mv = std::get_if<MeanVariance>(&params_)) {
    return {-1.0 / (2.0 * mv->c), kInf};
  }
  return {-kInf, kInf};
}

PhiValue Disutility::eval(double t) const {
  if (!validity_domain().contains(t)) {
    throw DomainError("disutility " + to_string() + " evaluated at t = " +
                      format_number(t) + ", outside its validity domain");
  }
  return std::visit(
      Overloaded{
          [&](const Identity&) { return PhiValue{t, 1.0}; },
          [&](const Entropic& p) {
            return PhiValue{std::expm1(p.gamma * t) / p.gamma, std::exp(p.gamma * t)};
          },
          [&](const MeanVariance& p) {
            return PhiValue{t + p.c * t * t, 1.0 + 2.0 * p.c * t};
          },
          [&](const CVaR& p) {
            // Right derivative at the kink: 1/alpha.
            return t >= 0.0 ? PhiValue{t / p.alpha, 1.0 / p.alpha} : PhiValue{0.0, 0.0};
          },
          [&](const SoftCVaR& p) {
            return t >= 0.0 ? PhiValue{p.gamma1 * t, p.gamma1}
                            : PhiValue{p.gamma2 * t, p.gamma2};
          },
      },
      params_);
}

double Disutility::left_derivative(double t) const {
  if (const auto* p = std::get_if<CVaR>(&params_)) return t > 0.0 ? 1.0 / p->alpha : 0.0;
  if (const auto* p = std::get_if<SoftCVaR>(&params_)) return t > 0.0 ? p->gamma1 : p->gamma2;
  return right_derivative(t);
}

bool Disutility::is_piecewise_linear() const {
  return is<Identity>() || is<CVaR>() || is<SoftCVaR>();
}

std::optional<double> Disutility::quantile_fraction() const {
  if (const auto* p = std::get_if<CVaR>(&params_)) return p->alpha;
  if (const auto* p = std::get_if<SoftCVaR>(&params_)) {
    return (1.0 - p->gamma2) / (p->gamma1 - p->gamma2);
  }
  return std::nullopt;
}

namespace {

void require_bound(const Disutility& phi, double bound) {
  if (!(bound > 0.0) || !std::isfinite(bound)) {
    throw DomainError("bound M must be a positive finite number");
  }
  const Interval dom = phi.validity_domain();
  if (!dom.contains(-bound) || !dom.contains(bound)) {
    throw DomainError("[-M, M] with M = " + format_number(bound) +
                      " exceeds the validity domain of " + phi.to_string());
  }
}

}  // namespace

double lipschitz_on(const Disutility& phi, double bound) {
  require_bound(phi, bound);
  return std::visit(
      Overloaded{
          [](const Identity&) { return 1.0; },
          [&](const Entropic& p) { return std::exp(p.gamma * bound); },
          [&](const MeanVariance& p) { return 1.0 + 2.0 * p.c * bound; },
          [](const CVaR& p) { return 1.0 / p.alpha; },
          [](const SoftCVaR& p) { return p.gamma1; },
      },
      phi.params());
}

double curvature_constant(const Disutility& phi, double bound) {
  require_bound(phi, bound);
  return std::visit(
      Overloaded{
          [](const Identity&) { return 0.0; },
          [&](const Entropic&) { return curvature_constant_numeric(phi, bound); },
          [](const MeanVariance& p) { return p.c; },
          [&](const CVaR& p) {
            return std::min(1.0, (1.0 - p.alpha) / p.alpha) / bound;
          },
          [&](const SoftCVaR& p) {
            return std::min(p.gamma1 - 1.0, 1.0 - p.gamma2) / bound;
          },
      },
      phi.params());
}

double curvature_constant_numeric(const Disutility& phi, double bound) {
  require_bound(phi, bound);

  auto ratio = [&](double t) { return (phi.value(t) - t) / (t * t); };

  constexpr int kGrid = 10001;
  constexpr double kDecades = 8.0;
  std::vector<double> grid(kGrid);
  for (int k = 0; k < kGrid; ++k) {
    grid[k] = bound * std::pow(10.0, -kDecades + kDecades * k / (kGrid - 1));
  }
  grid.back() = bound;

  double best = kInf;
  int best_k = 0;
  double best_sign = 1.0;
  for (double sign : {1.0, -1.0}) {
    for (int k = 0; k < kGrid; ++k) {
      const double r = ratio(sign * grid[k]);
      if (r < best) {
        best = r;
        best_k = k;
        best_sign = sign;
      }
    }
  }

  // Golden-section refinement inside the neighbouring grid cells.
  double lo = grid[std::max(best_k - 1, 0)];
  double hi = grid[std::min(best_k + 1, kGrid - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = ratio(best_sign * x1);
  double f2 = ratio(best_sign * x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * bound; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = ratio(best_sign * x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = ratio(best_sign * x2);
    }
  }
  best = std::min({best, f1, f2});
  return std::max(best, 0.0);
}

std::string_view axiom_name(Axiom axiom) {
  switch (axiom) {
    case Axiom::zero_at_origin:
      return "phi(0)=0";
    case Axiom::unit_subgradient:
      return "1 in dphi(0)";
    case Axiom::nondecreasing:
      return "nondecreasing";
    case Axiom::convex:
      return "convex";
  }
  return "?";
}

AxiomVerdict validate_tabulated(std::span<const double> grid,
                                std::span<const double> values, double tolerance) {
  if (grid.size() != values.size() || grid.size() < 3) {
    throw DomainError("tabulated disutility needs matching grids of at least 3 points");
  }
  const std::size_t n = grid.size();
  std::size_t zero = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw DomainError("tabulation grid must be strictly increasing");
    }
    if (std::abs(grid[i] + grid[n - 1 - i]) > 1e-12 * (1.0 + std::abs(grid[i]))) {
      throw DomainError("tabulation grid must be symmetric about zero");
    }
    if (grid[i] == 0.0) zero = i;
  }
  if (zero == n) throw DomainError("tabulation grid must contain zero");

  AxiomVerdict verdict;
  if (std::abs(values[zero]) > tolerance) verdict.failures.push_back(Axiom::zero_at_origin);

  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] < grid[i] - tolerance) {
      verdict.failures.push_back(Axiom::unit_subgradient);
      break;
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (values[i] - values[i - 1] < -tolerance) {
      verdict.failures.push_back(Axiom::nondecreasing);
      break;
    }
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double left = (values[i] - values[i - 1]) / (grid[i] - grid[i - 1]);
    const double right = (values[i + 1] - values[i]) / (grid[i + 1] - grid[i]);
    if (right - left < -tolerance) {
      verdict.failures.push_back(Axiom::convex);
      break;
    }
  }
  return verdict;
}

}  // namespace oce
