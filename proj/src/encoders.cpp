#include "gfmm/encoders.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "gfmm/errors.hpp"

namespace gfmm {

namespace {

bool class_statistic_kind(EncoderKind k) {
  return k == EncoderKind::Target || k == EncoderKind::JamesStein || k == EncoderKind::Loo ||
         k == EncoderKind::CatBoost;
}

}  // namespace

std::string to_string(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::Label: return "label";
    case EncoderKind::OneHot: return "onehot";
    case EncoderKind::Sum: return "sum";
    case EncoderKind::Helmert: return "helmert";
    case EncoderKind::Target: return "target";
    case EncoderKind::JamesStein: return "jamesstein";
    case EncoderKind::Loo: return "loo";
    case EncoderKind::CatBoost: return "catboost";
  }
  return "?";
}

EncoderKind parse_encoder_kind(const std::string& name) {
  for (auto k : all_encoder_kinds())
    if (to_string(k) == name) return k;
  if (name == "one-hot") return EncoderKind::OneHot;
  if (name == "james-stein") return EncoderKind::JamesStein;
  throw ConfigError("unknown encoder '" + name + "'");
}

const std::vector<EncoderKind>& all_encoder_kinds() {
  static const std::vector<EncoderKind> kinds{EncoderKind::Label,  EncoderKind::OneHot,     EncoderKind::Sum,
                                              EncoderKind::Helmert, EncoderKind::Target,    EncoderKind::JamesStein,
                                              EncoderKind::Loo,    EncoderKind::CatBoost};
  return kinds;
}

double target_lambda(double n, double m, double z) { return 1.0 / (1.0 + std::exp(-(n - m) / z)); }

FittedEncoder FittedEncoder::fit(EncoderKind kind, const Dataset& train, const EncoderParams& params) {
  FittedEncoder enc;
  enc.kind_ = kind;
  enc.params_ = params;
  enc.classes_ = train.class_count();
  const std::size_t r = train.r();
  const bool need_labels = class_statistic_kind(kind);

  std::vector<int> labels;
  if (need_labels) {
    if (train.samples.empty()) throw MissingLabels("cannot fit a class-statistic encoder on zero rows");
    labels = train.labels();
  } else {
    for (const auto& s : train.samples) labels.push_back(s.label.value_or(0));
  }

  enc.total_ = static_cast<double>(train.size());
  enc.class_total_.assign(std::max<std::size_t>(enc.classes_, 1), 0.0);
  double code_sum = 0;
  for (int c : labels) {
    if (need_labels) enc.class_total_.at(static_cast<std::size_t>(c)) += 1;
    code_sum += c;
  }
  enc.target_mean_ = train.size() ? code_sum / static_cast<double>(train.size()) : 0.0;

  enc.features_.resize(r);
  for (std::size_t j = 0; j < r; ++j) {
    auto& f = enc.features_[j];
    f.position.assign(train.schema.domain(j).size(), -1);
    for (std::size_t i = 0; i < train.size(); ++i) {
      int code = train.samples[i].categorical[j];
      if (code < 0) throw UnknownCategory("unseen value in training rows");
      if (static_cast<std::size_t>(code) >= f.position.size()) f.position.resize(static_cast<std::size_t>(code) + 1, -1);
      int& pos = f.position[static_cast<std::size_t>(code)];
      if (pos < 0) {
        pos = static_cast<int>(f.values.size());
        f.values.push_back(code);
        f.count.push_back(0);
        f.class_count.emplace_back(enc.class_total_.size(), 0.0);
        f.target_sum.push_back(0);
      }
      auto p = static_cast<std::size_t>(pos);
      f.count[p] += 1;
      f.class_count[p][static_cast<std::size_t>(labels[i])] += 1;
      f.target_sum[p] += labels[i];
    }
    if (f.values.empty() && train.size() > 0) throw EmptyDomain("feature has no training values");
    const std::size_t L = f.values.size();
    switch (kind) {
      case EncoderKind::Label:
      case EncoderKind::Loo:
      case EncoderKind::CatBoost: f.width = 1; break;
      case EncoderKind::OneHot: f.width = L; break;
      case EncoderKind::Sum:
      case EncoderKind::Helmert: f.width = L > 0 ? L - 1 : 0; break;
      case EncoderKind::Target:
      case EncoderKind::JamesStein: f.width = enc.classes_ <= 2 ? 1 : enc.classes_; break;
    }
    for (std::size_t c = 0; c < f.width; ++c) enc.provenance_.emplace_back(j, c);
  }

  // Rescaling range from the training rows in the training phase.
  EncodedMatrix raw = enc.transform_raw(train, Phase::Train);
  enc.col_min_.assign(raw.cols, 0.0);
  enc.col_max_.assign(raw.cols, 0.0);
  for (std::size_t c = 0; c < raw.cols; ++c) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < raw.rows; ++i) {
      lo = std::min(lo, raw.at(i, c));
      hi = std::max(hi, raw.at(i, c));
    }
    if (raw.rows == 0) lo = hi = 0;
    enc.col_min_[c] = lo;
    enc.col_max_[c] = hi;
  }
  return enc;
}

int FittedEncoder::position_of(std::size_t feature, int code) const {
  const auto& pos = features_[feature].position;
  if (code < 0 || static_cast<std::size_t>(code) >= pos.size()) return -1;
  return pos[static_cast<std::size_t>(code)];
}

std::vector<double> FittedEncoder::unseen_components(std::size_t feature) const {
  const auto& f = features_[feature];
  std::vector<double> out(f.width, 0.0);
  switch (kind_) {
    case EncoderKind::Label: out[0] = static_cast<double>(f.values.size()); break;
    case EncoderKind::OneHot:
    case EncoderKind::Sum:
    case EncoderKind::Helmert: break;
    case EncoderKind::Target:
    case EncoderKind::JamesStein:
      if (f.width == 1) {
        std::size_t pos_class = classes_ == 2 ? 1 : 0;
        out[0] = total_ > 0 ? class_total_[pos_class] / total_ : 0.0;
      } else {
        for (std::size_t c = 0; c < f.width; ++c) out[c] = total_ > 0 ? class_total_[c] / total_ : 0.0;
      }
      break;
    case EncoderKind::Loo:
    case EncoderKind::CatBoost: out[0] = target_mean_; break;
  }
  return out;
}

// Phase-independent encodings of a training value at position `pos`.
void FittedEncoder::encode_static(std::size_t feature, int pos_i, double* out) const {
  const auto& f = features_[feature];
  const auto pos = static_cast<std::size_t>(pos_i);
  const std::size_t L = f.values.size();
  switch (kind_) {
    case EncoderKind::Label: out[0] = static_cast<double>(pos); break;
    case EncoderKind::OneHot:
      for (std::size_t c = 0; c < L; ++c) out[c] = c == pos ? 1.0 : 0.0;
      break;
    case EncoderKind::Sum:
      for (std::size_t c = 0; c + 1 < L; ++c) out[c] = pos == L - 1 ? -1.0 : (c == pos ? 1.0 : 0.0);
      break;
    case EncoderKind::Helmert:
      // Value 0 is all -1; value j >= 1 has j at component j-1, zeros before, -1 after.
      for (std::size_t c = 0; c + 1 < L; ++c) {
        if (pos == 0) {
          out[c] = -1.0;
        } else if (c + 1 < pos) {
          out[c] = 0.0;
        } else if (c + 1 == pos) {
          out[c] = static_cast<double>(pos);
        } else {
          out[c] = -1.0;
        }
      }
      break;
    case EncoderKind::Target: {
      const double nk = f.count[pos];
      const double lambda = target_lambda(nk, params_.target_m, params_.target_z);
      auto value = [&](std::size_t cls) {
        return lambda * f.class_count[pos][cls] / nk + (1.0 - lambda) * class_total_[cls] / total_;
      };
      if (f.width == 1) {
        out[0] = value(classes_ == 2 ? 1 : 0);
      } else {
        for (std::size_t c = 0; c < f.width; ++c) out[c] = value(c);
      }
      break;
    }
    case EncoderKind::JamesStein: {
      const double nk = f.count[pos];
      auto value = [&](std::size_t cls) {
        const double pk = f.class_count[pos][cls] / nk;
        const double pp = class_total_[cls] / total_;
        const double var_k = pk * (1.0 - pk) / nk;
        const double var_p = pp * (1.0 - pp) / total_;
        const double denom = var_k + var_p;
        const double b = denom > 0 ? var_k / denom : 0.0;
        return (1.0 - b) * pk + b * pp;
      };
      if (f.width == 1) {
        out[0] = value(classes_ == 2 ? 1 : 0);
      } else {
        for (std::size_t c = 0; c < f.width; ++c) out[c] = value(c);
      }
      break;
    }
    case EncoderKind::Loo: out[0] = f.target_sum[pos] / f.count[pos]; break;
    case EncoderKind::CatBoost:
      out[0] = (f.target_sum[pos] + params_.catboost_z * target_mean_) / (f.count[pos] + params_.catboost_z);
      break;
  }
}

EncodedMatrix FittedEncoder::transform_raw(const Dataset& data, Phase phase) const {
  if (data.r() != features_.size()) throw DimensionMismatch("encoder arity does not match dataset");
  EncodedMatrix m;
  m.rows = data.size();
  m.cols = provenance_.size();
  m.provenance = provenance_;
  m.values.assign(m.rows * m.cols, 0.0);

  const bool loo_train = phase == Phase::Train && kind_ == EncoderKind::Loo;
  const bool cat_train = phase == Phase::Train && kind_ == EncoderKind::CatBoost;

  std::size_t offset = 0;
  for (std::size_t j = 0; j < features_.size(); ++j) {
    const auto& f = features_[j];
    // Running statistics for the ordered CatBoost training encoding.
    std::vector<double> seen_sum(f.values.size(), 0.0), seen_count(f.values.size(), 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& s = data.samples[i];
      double* out = &m.values[i * m.cols + offset];
      const int pos = position_of(j, s.categorical[j]);
      if (pos < 0) {
        auto u = unseen_components(j);
        std::copy(u.begin(), u.end(), out);
        spdlog::debug("encoder {}: feature {} row {} unseen value, policy fallback applied", to_string(kind_), j, i);
        continue;
      }
      const auto p = static_cast<std::size_t>(pos);
      if (loo_train) {
        const double c = s.label.value_or(0);
        if (f.count[p] <= 1.0) {
          out[0] = target_mean_;
          spdlog::debug("encoder loo: feature {} row {} singleton category, global mean used", j, i);
        } else {
          out[0] = (f.target_sum[p] - c) / (f.count[p] - 1.0);
        }
      } else if (cat_train) {
        const double c = s.label.value_or(0);
        out[0] = (seen_sum[p] + params_.catboost_z * target_mean_) / (seen_count[p] + params_.catboost_z);
        seen_sum[p] += c;
        seen_count[p] += 1.0;
      } else {
        encode_static(j, pos, out);
      }
    }
    offset += f.width;
  }
  return m;
}

EncodedMatrix FittedEncoder::transform(const Dataset& data, Phase phase) const {
  EncodedMatrix m = transform_raw(data, phase);
  for (std::size_t c = 0; c < m.cols; ++c) {
    const double lo = col_min_[c], range = col_max_[c] - col_min_[c];
    for (std::size_t i = 0; i < m.rows; ++i) {
      double& v = m.at(i, c);
      v = range > 0 ? std::clamp((v - lo) / range, 0.0, 1.0) : 0.0;
    }
  }
  return m;
}

}  // namespace gfmm
