#include "pct/setnet/params.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "pct/common/rng.h"
#include "pct/setnet/features.h"

namespace pct {
namespace {

constexpr absl::string_view kFormat = "pct-setnet";
constexpr int kVersion = 1;
constexpr double kResidualScale = 0.3;
// Softplus inverse of 0.05, roughly the mean infectiousness target.
constexpr double kHeadBiasInit = -2.9702;

}  // namespace

absl::Status SetNetConfig::Validate() const {
  const int dims[] = {status_hidden, status_out, profile_hidden, profile_out, day_out,
                      risk_dim,      count_dim,  width,          head_hidden};
  for (int d : dims) {
    if (d <= 0) return absl::InvalidArgumentError("setnet widths must be positive");
  }
  if (count_dim % 2 != 0) return absl::InvalidArgumentError("setnet.count_dim must be even");
  if (num_blocks < 0) return absl::InvalidArgumentError("setnet.num_blocks must be >= 0");
  return absl::OkStatus();
}

absl::StatusOr<SetNetConfig> SetNetConfigFromJson(const Json& j, const std::string& path) {
  SetNetConfig c;
  ObjectReader r(j, path);
  r.Read("status_hidden", &c.status_hidden)
      .Read("status_out", &c.status_out)
      .Read("profile_hidden", &c.profile_hidden)
      .Read("profile_out", &c.profile_out)
      .Read("day_out", &c.day_out)
      .Read("risk_dim", &c.risk_dim)
      .Read("count_dim", &c.count_dim)
      .Read("width", &c.width)
      .Read("head_hidden", &c.head_hidden)
      .Read("num_blocks", &c.num_blocks);
  if (absl::Status s = r.Finish(); !s.ok()) return s;
  if (absl::Status s = c.Validate(); !s.ok()) return s;
  return c;
}

Json SetNetConfigToJson(const SetNetConfig& c) {
  return Json{{"status_hidden", c.status_hidden}, {"status_out", c.status_out},
              {"profile_hidden", c.profile_hidden}, {"profile_out", c.profile_out},
              {"day_out", c.day_out},               {"risk_dim", c.risk_dim},
              {"count_dim", c.count_dim},           {"width", c.width},
              {"head_hidden", c.head_hidden},       {"num_blocks", c.num_blocks}};
}

std::vector<TensorSpec> MakeLayout(const SetNetConfig& c) {
  std::vector<TensorSpec> t = {
      {"status_w1", kStatusFeatures, c.status_hidden},
      {"status_b1", 1, c.status_hidden},
      {"status_w2", c.status_hidden, c.status_out},
      {"status_b2", 1, c.status_out},
      {"profile_w1", kProfileFeatures, c.profile_hidden},
      {"profile_b1", 1, c.profile_hidden},
      {"profile_w2", c.profile_hidden, c.profile_out},
      {"profile_b2", 1, c.profile_out},
      {"day_w", 1, c.day_out},
      {"day_b", 1, c.day_out},
      {"risk_embedding", 16, c.risk_dim},
      {"day_proj_w", c.day_element_width(), c.width},
      {"day_proj_b", 1, c.width},
      {"enc_proj_w", c.encounter_element_width(), c.width},
      {"enc_proj_b", 1, c.width},
      {"head_w1", c.width, c.head_hidden},
      {"head_b1", 1, c.head_hidden},
      {"head_w2", c.head_hidden, 1},
      {"head_b2", 1, 1},
  };
  for (int b = 0; b < c.num_blocks; ++b) {
    const std::string p = absl::StrCat("block", b, "_");
    t.push_back({p + "w1", c.width, c.width});
    t.push_back({p + "b1", 1, c.width});
    t.push_back({p + "w2a", c.width, c.width});
    t.push_back({p + "w2p", c.width, c.width});
    t.push_back({p + "b2", 1, c.width});
  }
  size_t offset = 0;
  for (TensorSpec& s : t) {
    s.offset = offset;
    offset += s.size();
  }
  return t;
}

template <typename T>
Params<T>::Params(const SetNetConfig& config) : config_(config), layout_(MakeLayout(config)) {
  size_t total = 0;
  for (const TensorSpec& s : layout_) total += s.size();
  data_.assign(total, T(0));
}

template <typename T>
bool Params<T>::AllFinite() const {
  for (T v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

template class Params<float>;
template class Params<double>;

Params<double> InitParams(const SetNetConfig& config, uint64_t seed) {
  Params<double> p(config);
  Rng rng = MakeRng(seed, Stream::kInit);
  auto fill_uniform = [&](int id, double scale) {
    const TensorSpec& s = p.layout()[id];
    const double bound = scale * std::sqrt(6.0 / s.rows);
    for (size_t i = 0; i < s.size(); ++i) p.data()[s.offset + i] = Uniform(rng, -bound, bound);
  };
  for (int id = 0; id < p.num_tensors(); ++id) {
    const TensorSpec& s = p.layout()[id];
    const bool is_bias = s.rows == 1 && id != kDayW;
    if (id == kRiskEmbedding) {
      fill_uniform(id, 1.0 / std::sqrt(6.0 / s.rows));
    } else if (!is_bias) {
      fill_uniform(id, 1.0);
    }
  }
  for (int b = 0; b < config.num_blocks; ++b) {
    p.M(BlockTensorId(b, kBlockW2a)) *= kResidualScale;
    p.M(BlockTensorId(b, kBlockW2p)) *= kResidualScale;
  }
  p.M(kHeadW2) *= 0.1;
  p.V(kHeadB2)(0) = kHeadBiasInit;
  return p;
}

Json ParamsToJson(const Params<float>& params) {
  Json tensors = Json::array();
  for (int id = 0; id < params.num_tensors(); ++id) {
    const TensorSpec& s = params.layout()[id];
    std::vector<float> values(params.data().begin() + s.offset,
                              params.data().begin() + s.offset + s.size());
    tensors.push_back(Json{{"name", s.name}, {"shape", {s.rows, s.cols}}, {"data", values}});
  }
  return Json{{"format", std::string(kFormat)},
              {"version", kVersion},
              {"config", SetNetConfigToJson(params.config())},
              {"tensors", tensors}};
}

absl::StatusOr<Params<float>> ParamsFromJson(const Json& j) {
  if (!j.is_object() || j.value("format", "") != kFormat) {
    return absl::InvalidArgumentError("not a setnet parameter file");
  }
  if (j.value("version", 0) != kVersion) {
    return absl::InvalidArgumentError(
        absl::StrCat("unsupported setnet parameter version ", j.value("version", 0)));
  }
  auto config = SetNetConfigFromJson(j.at("config"), "config");
  if (!config.ok()) return config.status();
  Params<float> p(*config);
  const Json& tensors = j.at("tensors");
  if (!tensors.is_array() || tensors.size() != p.layout().size()) {
    return absl::InvalidArgumentError("tensor list does not match the config");
  }
  for (int id = 0; id < p.num_tensors(); ++id) {
    const TensorSpec& s = p.layout()[id];
    const Json& t = tensors[id];
    if (t.value("name", "") != s.name || t.at("shape") != Json{s.rows, s.cols} ||
        t.at("data").size() != s.size()) {
      return absl::InvalidArgumentError(absl::StrCat("tensor ", s.name, ": shape mismatch"));
    }
    const Json& data = t.at("data");
    for (size_t i = 0; i < s.size(); ++i) p.data()[s.offset + i] = data[i].get<float>();
  }
  if (!p.AllFinite()) return absl::InvalidArgumentError("parameter file holds non-finite values");
  return p;
}

absl::Status SaveParams(const Params<float>& params, const std::string& path) {
  return WriteFile(path, ParamsToJson(params).dump());
}

absl::StatusOr<Params<float>> LoadParams(const std::string& path) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  auto j = ParseJson(*text, path);
  if (!j.ok()) return j.status();
  try {
    return ParamsFromJson(*j);
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": malformed parameter file: ", e.what()));
  }
}

}  // namespace pct
