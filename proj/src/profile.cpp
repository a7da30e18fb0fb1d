#include "paraxial/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "paraxial/error.hpp"
#include "paraxial/format.hpp"

namespace paraxial {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_ascending(const std::vector<double>& xs, const char* what) {
  for (std::size_t i = 1; i < xs.size(); ++i) {
    require(xs[i] > xs[i - 1], ErrorKind::invalid_spec,
            std::string(what) + " must be strictly increasing");
  }
  for (double x : xs) require(std::isfinite(x), ErrorKind::invalid_spec, std::string(what) + " must be finite");
}

std::size_t segment_index(const std::vector<double>& breaks, double u) {
  return static_cast<std::size_t>(std::upper_bound(breaks.begin(), breaks.end(), u) - breaks.begin());
}

double interpolate(const Profile::Tabulated& t, double u) {
  if (u <= t.nodes.front()) return t.values.front();
  if (u >= t.nodes.back()) return t.values.back();
  auto hi = static_cast<std::size_t>(std::upper_bound(t.nodes.begin(), t.nodes.end(), u) - t.nodes.begin());
  auto lo = hi - 1;
  double s = (u - t.nodes[lo]) / (t.nodes[hi] - t.nodes[lo]);
  return t.values[lo] + s * (t.values[hi] - t.values[lo]);
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ' ';
    out += format_double(xs[i]);
  }
  return out;
}

std::vector<double> read_numbers(std::string_view text, std::string_view context) {
  std::vector<double> out;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    double value = 0.0;
    require(parse_double(token, value), ErrorKind::config,
            "profile '" + std::string(context) + "': bad number '" + token + "'");
    out.push_back(value);
  }
  return out;
}

}  // namespace

Profile Profile::constant(double value) {
  require(std::isfinite(value), ErrorKind::invalid_spec, "profile value must be finite");
  return Profile(Constant{value});
}

Profile Profile::linear(double offset, double slope) {
  require(std::isfinite(offset) && std::isfinite(slope), ErrorKind::invalid_spec,
          "linear profile coefficients must be finite");
  return Profile(Linear{offset, slope});
}

Profile Profile::sinusoidal(double mean, double amplitude, double angular_frequency, double phase) {
  require(std::isfinite(mean) && std::isfinite(amplitude) && std::isfinite(angular_frequency) &&
              std::isfinite(phase),
          ErrorKind::invalid_spec, "sinusoidal profile coefficients must be finite");
  return Profile(Sinusoidal{mean, amplitude, angular_frequency, phase});
}

Profile Profile::piecewise_constant(std::vector<double> breaks, std::vector<double> values) {
  require(values.size() == breaks.size() + 1, ErrorKind::invalid_spec,
          "piecewise profile needs one more value than breaks");
  check_ascending(breaks, "piecewise breaks");
  for (double v : values) require(std::isfinite(v), ErrorKind::invalid_spec, "piecewise values must be finite");
  return Profile(PiecewiseConstant{std::move(breaks), std::move(values)});
}

Profile Profile::tabulated(std::vector<double> nodes, std::vector<double> values) {
  require(!nodes.empty() && nodes.size() == values.size(), ErrorKind::invalid_spec,
          "tabulated profile needs matching, non-empty node and value lists");
  check_ascending(nodes, "tabulated nodes");
  for (double v : values) require(std::isfinite(v), ErrorKind::invalid_spec, "tabulated values must be finite");
  return Profile(Tabulated{std::move(nodes), std::move(values)});
}

Profile Profile::parse(std::string_view text) {
  std::string s(text);
  auto first = s.find_first_not_of(" \t");
  require(first != std::string::npos, ErrorKind::config, "empty profile");
  auto space = s.find_first_of(" \t", first);
  std::string kind = s.substr(first, space == std::string::npos ? std::string::npos : space - first);
  std::string rest = space == std::string::npos ? std::string() : s.substr(space);

  auto split_pair = [&](std::vector<double>& lhs, std::vector<double>& rhs) {
    auto bar = rest.find(';');
    require(bar != std::string::npos, ErrorKind::config, "profile '" + s + "' needs 'a b ; c d' lists");
    lhs = read_numbers(std::string_view(rest).substr(0, bar), s);
    rhs = read_numbers(std::string_view(rest).substr(bar + 1), s);
  };

  if (kind == "constant") {
    auto v = read_numbers(rest, s);
    require(v.size() == 1, ErrorKind::config, "constant profile takes one value: '" + s + "'");
    return constant(v[0]);
  }
  if (kind == "linear") {
    auto v = read_numbers(rest, s);
    require(v.size() == 2, ErrorKind::config, "linear profile takes offset and slope: '" + s + "'");
    return linear(v[0], v[1]);
  }
  if (kind == "sinusoidal") {
    auto v = read_numbers(rest, s);
    require(v.size() == 3 || v.size() == 4, ErrorKind::config,
            "sinusoidal profile takes mean amplitude angular_frequency [phase]: '" + s + "'");
    return sinusoidal(v[0], v[1], v[2], v.size() == 4 ? v[3] : 0.0);
  }
  if (kind == "piecewise") {
    std::vector<double> breaks, values;
    split_pair(breaks, values);
    return piecewise_constant(std::move(breaks), std::move(values));
  }
  if (kind == "tabulated") {
    std::vector<double> nodes, values;
    split_pair(nodes, values);
    return tabulated(std::move(nodes), std::move(values));
  }
  fail(ErrorKind::config, "unknown profile kind '" + kind + "'");
}

std::string Profile::to_string() const {
  return std::visit(
      Overloaded{
          [](const Constant& c) { return "constant " + format_double(c.value); },
          [](const Linear& l) { return "linear " + format_double(l.offset) + " " + format_double(l.slope); },
          [](const Sinusoidal& s) {
            return "sinusoidal " + format_double(s.mean) + " " + format_double(s.amplitude) + " " +
                   format_double(s.angular_frequency) + " " + format_double(s.phase);
          },
          [](const PiecewiseConstant& p) { return "piecewise " + join(p.breaks) + " ; " + join(p.values); },
          [](const Tabulated& t) { return "tabulated " + join(t.nodes) + " ; " + join(t.values); },
      },
      shape_);
}

double Profile::operator()(double u) const {
  return std::visit(
      Overloaded{
          [](const Constant& c) { return c.value; },
          [u](const Linear& l) { return l.offset + l.slope * u; },
          [u](const Sinusoidal& s) { return s.mean + s.amplitude * std::sin(s.angular_frequency * u + s.phase); },
          [u](const PiecewiseConstant& p) { return p.values[segment_index(p.breaks, u)]; },
          [u](const Tabulated& t) { return interpolate(t, u); },
      },
      shape_);
}

double Profile::left_limit(double u) const {
  if (const auto* p = std::get_if<PiecewiseConstant>(&shape_)) {
    auto idx = static_cast<std::size_t>(std::lower_bound(p->breaks.begin(), p->breaks.end(), u) - p->breaks.begin());
    return p->values[idx];
  }
  return (*this)(u);
}

double Profile::slope(double u, double h) const {
  return std::visit(
      Overloaded{
          [](const Constant&) { return 0.0; },
          [](const Linear& l) { return l.slope; },
          [u](const Sinusoidal& s) {
            return s.amplitude * s.angular_frequency * std::cos(s.angular_frequency * u + s.phase);
          },
          [](const PiecewiseConstant&) { return 0.0; },
          [u, h](const Tabulated& t) {
            require(h > 0.0, ErrorKind::parameter, "finite-difference step must be positive");
            return (interpolate(t, u + h) - interpolate(t, u - h)) / (2.0 * h);
          },
      },
      shape_);
}

std::vector<double> Profile::breakpoints() const {
  if (const auto* p = std::get_if<PiecewiseConstant>(&shape_)) return p->breaks;
  if (const auto* t = std::get_if<Tabulated>(&shape_)) return t->nodes;
  return {};
}

std::vector<double> Profile::breakpoints_in(double begin, double end) const {
  double lo = std::min(begin, end), hi = std::max(begin, end);
  std::vector<double> out;
  for (double b : breakpoints()) {
    if (b > lo && b < hi) out.push_back(b);
  }
  return out;
}

double Profile::inside(double u, double begin, double end) const {
  double lo = std::min(begin, end), hi = std::max(begin, end);
  double margin = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  if (hi - lo <= 2.0 * margin) return (*this)(0.5 * (lo + hi));
  return (*this)(std::clamp(u, lo + margin, hi - margin));
}

bool Profile::is_constant() const {
  return std::visit(
      Overloaded{
          [](const Constant&) { return true; },
          [](const Linear& l) { return l.slope == 0.0; },
          [](const Sinusoidal& s) { return s.amplitude == 0.0 || s.angular_frequency == 0.0; },
          [](const PiecewiseConstant& p) {
            return std::all_of(p.values.begin(), p.values.end(), [&](double v) { return v == p.values.front(); });
          },
          [](const Tabulated& t) {
            return std::all_of(t.values.begin(), t.values.end(), [&](double v) { return v == t.values.front(); });
          },
      },
      shape_);
}

bool Profile::is_identically_zero() const { return is_constant() && (*this)(0.0) == 0.0; }

namespace {
template <class Fn>
void sample_span(const Profile& p, double begin, double end, Fn&& fn) {
  constexpr int samples = 4096;
  fn(p(begin));
  fn(p.left_limit(end));
  for (double b : p.breakpoints_in(begin, end)) {
    fn(p(b));
    fn(p.left_limit(b));
  }
  for (int i = 0; i <= samples; ++i) fn(p(begin + (end - begin) * i / samples));
}
}  // namespace

namespace {

// Values at the span ends and at every interior extremum of the sinusoid.
std::vector<double> sinusoid_candidates(const Profile::Sinusoidal& s, double begin, double end) {
  if (begin > end) std::swap(begin, end);
  auto value = [&](double u) { return s.mean + s.amplitude * std::sin(s.angular_frequency * u + s.phase); };
  std::vector<double> out{value(begin), value(end)};
  const double w = s.angular_frequency;
  if (w == 0.0 || s.amplitude == 0.0) return out;
  const double pi = std::numbers::pi;
  // Extrema at w u + phase = pi/2 + n pi.
  const double t0 = w * begin + s.phase, t1 = w * end + s.phase;
  const double lo = std::min(t0, t1), hi = std::max(t0, t1);
  const double first = std::ceil((lo - pi / 2) / pi);
  const double last = std::floor((hi - pi / 2) / pi);
  if (last - first > 2.0) {
    out.push_back(s.mean + std::abs(s.amplitude));
    out.push_back(s.mean - std::abs(s.amplitude));
    return out;
  }
  for (double n = first; n <= last; n += 1.0) {
    out.push_back(s.mean + s.amplitude * std::sin(pi / 2 + n * pi));
  }
  return out;
}

}  // namespace

double Profile::max_abs_on(double begin, double end) const {
  if (const auto* s = std::get_if<Sinusoidal>(&shape_)) {
    double best = 0.0;
    for (double v : sinusoid_candidates(*s, begin, end)) best = std::max(best, std::abs(v));
    return best;
  }
  double best = 0.0;
  sample_span(*this, begin, end, [&](double v) { best = std::max(best, std::abs(v)); });
  return best;
}

double Profile::min_on(double begin, double end) const {
  if (const auto* s = std::get_if<Sinusoidal>(&shape_)) {
    const auto v = sinusoid_candidates(*s, begin, end);
    return *std::min_element(v.begin(), v.end());
  }
  double best = INFINITY;
  sample_span(*this, begin, end, [&](double v) { best = std::min(best, v); });
  return best;
}

}  // namespace paraxial
