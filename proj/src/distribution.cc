// Copyright 2026 The mwg Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mwg/distribution.h"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include "json.hpp"

#include "mwg/error.h"

namespace mwg {

TypeDistribution::TypeDistribution(std::string name, RealFn cdf, RealFn pdf,
                                   RealFn quantile)
    : name_(std::move(name)),
      spec_(name_),
      cdf_(std::move(cdf)),
      pdf_(std::move(pdf)),
      quantile_(std::move(quantile)) {}

TypeDistribution make_uniform() {
  return TypeDistribution(
      "uniform", [](double t) { return std::clamp(t, 0.0, 1.0); },
      [](double) { return 1.0; },
      [](double q) { return std::clamp(q, 0.0, 1.0); });
}

TypeDistribution make_power(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("power distribution needs alpha > 0");
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "power:%.12g", alpha);
  TypeDistribution d(
      "power",
      [alpha](double t) { return std::pow(std::clamp(t, 0.0, 1.0), alpha); },
      [alpha](double t) { return alpha * std::pow(t, alpha - 1.0); },
      [alpha](double q) {
        return std::pow(std::clamp(q, 0.0, 1.0), 1.0 / alpha);
      });
  d.spec_ = buf;
  return d;
}

TypeDistribution parse_distribution(const std::string& spec) {
  std::string s = spec;
  s.erase(std::remove_if(s.begin(), s.end(),
                         [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (!s.empty() && s.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(s);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(std::string("bad distribution JSON: ") + e.what());
    }
    const std::string family = j.value("family", "");
    if (family == "uniform") return make_uniform();
    if (family == "power") {
      if (!j.contains("alpha") || !j["alpha"].is_number()) {
        throw InvalidArgument("power distribution needs numeric \"alpha\"");
      }
      return make_power(j["alpha"].get<double>());
    }
    throw InvalidArgument("unknown distribution family '" + family + "'");
  }
  if (s == "uniform") return make_uniform();
  if (s.rfind("power:", 0) == 0) {
    const std::string arg = s.substr(6);
    char* end = nullptr;
    const double alpha = std::strtod(arg.c_str(), &end);
    if (arg.empty() || end == nullptr || *end != '\0') {
      throw InvalidArgument("bad power exponent in '" + spec + "'");
    }
    return make_power(alpha);
  }
  throw InvalidArgument("unknown distribution '" + spec +
                        "' (expected uniform or power:<alpha>)");
}

double integrate(const RealFn& f, double a, double b, double abs_tol) {
  if (b == a) return 0.0;
  if (b < a) return -integrate(f, b, a, abs_tol);
  // The Boost driver refines until the error estimate drops below
  // tol * |estimate|; integrands here are O(1) so a relative tolerance a
  // notch tighter than abs_tol meets the absolute target. Below about 1e-13
  // the estimate is dominated by roundoff and refinement never stops.
  const double tol = std::max(abs_tol * 1e-2, 1e-13);
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 12, tol);
}

double truncated_mean(const TypeDistribution& dist, double a, double b) {
  if (a > b) throw InvalidArgument("truncated_mean: a > b");
  if (a < 0.0 || b > 1.0) {
    throw InvalidArgument("truncated_mean: interval outside [0, 1]");
  }
  const double qa = dist.cdf(a);
  const double qb = dist.cdf(b);
  if (qb <= qa) return 0.0;
  return integrate([&dist](double q) { return dist.quantile(q); }, qa, qb,
                   1e-12);
}

}  // namespace mwg
