// Copyright 2026 The d2dcache Authors
//
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

#include "d2dcache/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "d2dcache/errors.hpp"

namespace d2dcache {

namespace {

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ConfigError(std::string("catalog.") + field, what);
}

std::vector<double> cumulative(const std::vector<double>& pmf) {
  std::vector<double> cdf(pmf.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    acc += pmf[i];
    cdf[i] = acc;
  }
  if (!cdf.empty()) cdf.back() = 1.0;
  return cdf;
}

// Index of the first cdf entry strictly above a uniform draw.
int draw(const std::vector<double>& cdf, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(
      it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

}  // namespace

void CatalogConfig::validate() const {
  require(contents >= 1, "contents", "must be >= 1");
  require(chunks >= 1, "chunks", "must be >= 1");
  require(std::isfinite(base_size_bits) && base_size_bits > 0, "base_mbits",
          "must be > 0");
  require(std::isfinite(enh_size_bits) && enh_size_bits > 0, "enh_mbits",
          "must be > 0");
  require(std::isfinite(zipf_s) && zipf_s >= 0, "zipf_s", "must be >= 0");
  require(std::isfinite(weibull_lambda) && weibull_lambda > 0,
          "weibull_lambda", "must be > 0");
  require(std::isfinite(weibull_k) && weibull_k > 0, "weibull_k",
          "must be > 0");
  require(p_hq >= 0 && p_hq <= 1, "p_hq", "must lie in [0, 1]");
  require(size_jitter >= 0 && size_jitter < 1, "size_jitter",
          "must lie in [0, 1)");
}

Catalog::Catalog(const CatalogConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const int n_c = cfg_.contents;
  const int n_j = cfg_.chunks;

  content_scale_.assign(n_c, 1.0);
  if (cfg_.size_jitter > 0) {
    Rng rng(cfg_.size_seed);
    std::uniform_real_distribution<double> dist(1.0 - cfg_.size_jitter,
                                                1.0 + cfg_.size_jitter);
    for (double& s : content_scale_) s = dist(rng);
  }

  units_.reserve(static_cast<std::size_t>(2) * n_c * n_j);
  for (int i = 1; i <= n_c; ++i) {
    const double scale = content_scale_[i - 1];
    const double base = cfg_.base_size_bits * scale / n_j;
    const double enh = cfg_.enh_size_bits * scale / n_j;
    for (int j = 1; j <= n_j; ++j) {
      for (Layer k : {Layer::kBase, Layer::kEnhancement}) {
        ContentUnit u;
        u.content = i;
        u.chunk = j;
        u.layer = k;
        u.id = static_cast<UnitId>(units_.size()) + 1;
        u.size_bits = (k == Layer::kBase) ? base : enh;
        total_bits_ += u.size_bits;
        units_.push_back(u);
      }
    }
  }

  content_pmf_.resize(n_c);
  double norm = 0.0;
  for (int i = 1; i <= n_c; ++i) {
    content_pmf_[i - 1] = 1.0 / std::pow(static_cast<double>(i), cfg_.zipf_s);
    norm += content_pmf_[i - 1];
  }
  for (double& p : content_pmf_) p /= norm;

  // Discretized Weibull: pmf(m) = F(m) - F(m-1), renormalized by F(J).
  auto weibull_cdf = [&](double x) {
    return -std::expm1(-std::pow(x / cfg_.weibull_lambda, cfg_.weibull_k));
  };
  length_pmf_.resize(n_j);
  const double f_total = weibull_cdf(n_j);
  for (int m = 1; m <= n_j; ++m) {
    length_pmf_[m - 1] = (weibull_cdf(m) - weibull_cdf(m - 1)) / f_total;
  }
  // P(L >= j) = (F(J) - F(j-1)) / F(J), evaluated directly so the tail stays
  // accurate instead of accumulating 1 - sum(pmf).
  length_survival_.resize(n_j);
  for (int j = 1; j <= n_j; ++j) {
    length_survival_[j - 1] =
        std::clamp((f_total - weibull_cdf(j - 1)) / f_total, 0.0, 1.0);
  }

  content_cdf_ = cumulative(content_pmf_);
  length_cdf_ = cumulative(length_pmf_);
}

const ContentUnit& Catalog::unit(UnitId id) const {
  if (id < 1 || id > num_units()) {
    throw DomainError("unit id " + std::to_string(id) + " outside catalog");
  }
  return units_[id - 1];
}

UnitId Catalog::unit_id(int content, int chunk, Layer layer) const {
  if (content < 1 || content > cfg_.contents || chunk < 1 ||
      chunk > cfg_.chunks) {
    throw DomainError("unit tuple outside catalog");
  }
  return static_cast<UnitId>(((content - 1) * cfg_.chunks + (chunk - 1)) * 2 +
                             static_cast<int>(layer) + 1);
}

double Catalog::content_layer_bits(int content, Layer layer) const {
  if (content < 1 || content > cfg_.contents) {
    throw DomainError("content id " + std::to_string(content) +
                      " outside catalog");
  }
  double sum = 0.0;
  for (int j = 1; j <= cfg_.chunks; ++j) {
    sum += units_[unit_id(content, j, layer) - 1].size_bits;
  }
  return sum;
}

double Catalog::content_prob(int content) const {
  if (content < 1 || content > cfg_.contents) {
    throw DomainError("content id " + std::to_string(content) +
                      " outside 1.." + std::to_string(cfg_.contents));
  }
  return content_pmf_[content - 1];
}

double Catalog::chunk_prob(int chunk) const {
  if (chunk < 1 || chunk > cfg_.chunks) {
    throw DomainError("chunk id " + std::to_string(chunk) + " outside 1.." +
                      std::to_string(cfg_.chunks));
  }
  return length_survival_[chunk - 1];
}

double Catalog::layer_prob(Layer layer) const {
  return layer == Layer::kBase ? 1.0 : cfg_.p_hq;
}

double Catalog::request_prob(UnitId id) const {
  const ContentUnit& u = unit(id);
  return content_prob(u.content) * chunk_prob(u.chunk) * layer_prob(u.layer);
}

Session Catalog::sample_session(Rng& rng, DeviceId requester) const {
  Session s;
  s.requester = requester;
  s.content = draw(content_cdf_, rng) + 1;
  s.high_quality =
      std::uniform_real_distribution<double>(0.0, 1.0)(rng) < cfg_.p_hq;
  s.prefix_length = draw(length_cdf_, rng) + 1;
  s.units.reserve(static_cast<std::size_t>(s.prefix_length) *
                  (s.high_quality ? 2 : 1));
  for (int j = 1; j <= s.prefix_length; ++j) {
    s.units.push_back(unit_id(s.content, j, Layer::kBase));
    if (s.high_quality) {
      s.units.push_back(unit_id(s.content, j, Layer::kEnhancement));
    }
  }
  return s;
}

}  // namespace d2dcache
