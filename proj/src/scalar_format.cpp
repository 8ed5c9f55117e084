#include "tapered/scalar_format.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace tapered {

std::vector<double> tap_unique_values(const ValueTap& tap)
{
  std::vector<double> out;
  out.reserve(tap.size());
  for (double v : tap.raw()) {
    if (std::isfinite(v)) out.push_back(v == 0.0 ? 0.0 : v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

int parse_int(std::string_view s, std::string_view what)
{
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad " + std::string(what) + " in format spec: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

AnyFormat parse_format(std::string_view spec)
{
  if (spec == "reference") return ReferenceFormat{};
  if (spec == "float16") return Binary16Format{};
  if (spec == "q16") return FixedQ16Format{};
  constexpr std::string_view prefix = "posit:";
  if (spec.starts_with(prefix)) {
    const auto body = spec.substr(prefix.size());
    const auto comma = body.find(',');
    if (comma == std::string_view::npos) {
      throw std::invalid_argument("posit format needs 'posit:n,es'");
    }
    const int n = parse_int(body.substr(0, comma), "n");
    const int es = parse_int(body.substr(comma + 1), "es");
    return PositFormat{PositConfig{n, es}};
  }
  throw std::invalid_argument("unknown format '" + std::string(spec) +
                              "' (expected reference, posit:n,es, float16 or q16)");
}

std::string format_name(const AnyFormat& fmt)
{
  return std::visit([](const auto& f) { return f.name(); }, fmt);
}

}  // namespace tapered
