// Copyright 2026 The gesturedet Authors. All Rights Reserved.
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

#include "gesturedet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gesturedet/error.hpp"

namespace gesturedet {

namespace {

constexpr char kMagic[4] = {'G', 'D', 'W', '1'};

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  bool done() const { return pos_ == bytes_.size(); }

  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::string_view Take(std::size_t n) {
    Need(n);
    const auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorCode::kStoreIo, "weight file is truncated");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string EncodeWeights(const ParameterSet<float>& params) {
  std::string out(kMagic, 4);
  for (const auto& e : params.entries()) {
    PutU32(out, static_cast<std::uint32_t>(e.spec.name.size()));
    out += e.spec.name;
    PutU32(out, static_cast<std::uint32_t>(e.spec.shape.size()));
    for (int d : e.spec.shape) PutU32(out, static_cast<std::uint32_t>(d));
    for (Eigen::Index i = 0; i < e.values.size(); ++i) PutU32(out, std::bit_cast<std::uint32_t>(e.values[i]));
  }
  return out;
}

ParameterSet<float> DecodeWeights(std::string_view bytes) {
  Reader in(bytes);
  if (in.Take(4) != std::string_view(kMagic, 4)) throw Error(ErrorCode::kStoreIo, "not a GDW1 weight file");
  ParameterSet<float> params;
  while (!in.done()) {
    ParamSpec spec;
    spec.name = std::string(in.Take(in.U32()));
    const std::uint32_t rank = in.U32();
    std::int64_t count = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      spec.shape.push_back(static_cast<int>(in.U32()));
      count *= spec.shape.back();
    }
    Vector<float> values(count);
    for (std::int64_t i = 0; i < count; ++i) values[i] = std::bit_cast<float>(in.U32());
    params.entries().push_back({spec, std::move(values)});
  }
  return params;
}

void SaveCheckpoint(const std::filesystem::path& path, const ModelConfig& config, const ParameterSet<float>& params) {
  if (!params.SameLayout(ParameterSet<float>::Zeros(config))) {
    throw Error(ErrorCode::kShape, "parameters do not match the model config");
  }
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    const std::string bytes = EncodeWeights(params);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kStoreIo, "cannot write " + path.string());
  }
  std::ofstream meta(path.string() + ".json", std::ios::binary | std::ios::trunc);
  meta << ModelConfigToJson(config) << "\n";
  if (!meta) throw Error(ErrorCode::kStoreIo, "cannot write " + path.string() + ".json");
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::kStoreIo, "cannot open " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  Checkpoint ckpt{ModelConfigFromJson(slurp(path.string() + ".json")), {}};
  const ParameterSet<float> decoded = DecodeWeights(slurp(path));
  ckpt.params = ParameterSet<float>::Zeros(ckpt.config);
  if (!decoded.SameLayout(ckpt.params)) throw Error(ErrorCode::kShape, "weight file does not match its config");
  for (std::size_t i = 0; i < decoded.size(); ++i) ckpt.params.entry(i).values = decoded.entry(i).values;
  return ckpt;
}

}  // namespace gesturedet
