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

// Type distributions on [0, 1] and the integration primitives used by the
// rest of the library.

#ifndef MWG_DISTRIBUTION_H_
#define MWG_DISTRIBUTION_H_

#include <functional>
#include <string>

namespace mwg {

using RealFn = std::function<double(double)>;

// A distribution of agent types on [0, 1] with a strictly positive density,
// supplied as the triple (cdf, pdf, quantile). Immutable; safe to share.
class TypeDistribution {
 public:
  TypeDistribution(std::string name, RealFn cdf, RealFn pdf, RealFn quantile);

  double cdf(double t) const { return cdf_(t); }
  double pdf(double t) const { return pdf_(t); }
  double quantile(double q) const { return quantile_(q); }
  const std::string& name() const { return name_; }

  // Human-readable spec that round-trips through parse_distribution(),
  // e.g. "uniform" or "power:2".
  const std::string& spec() const { return spec_; }

 private:
  friend TypeDistribution make_uniform();
  friend TypeDistribution make_power(double alpha);

  std::string name_;
  std::string spec_;
  RealFn cdf_;
  RealFn pdf_;
  RealFn quantile_;
};

TypeDistribution make_uniform();

// cdf t^alpha. For alpha < 1 the density is unbounded at 0; integrals against
// dF go through the quantile function and never evaluate the density there.
TypeDistribution make_power(double alpha);

// Parses "uniform", "power:<alpha>" or a JSON object
// {"family":"uniform"} / {"family":"power","alpha":<real>}.
TypeDistribution parse_distribution(const std::string& spec);

// Adaptive Gauss-Kronrod quadrature of f over [a, b] to the given absolute
// tolerance (for integrands of magnitude O(1)).
double integrate(const RealFn& f, double a, double b, double abs_tol = 1e-10);

// Integral of t dF(t) over [a, b], computed as the integral of the quantile
// function over [F(a), F(b)].
double truncated_mean(const TypeDistribution& dist, double a, double b);

}  // namespace mwg

#endif  // MWG_DISTRIBUTION_H_
