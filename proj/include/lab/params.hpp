#pragma once

// Named parameter tensors with a deterministic flat order (insertion order)
// shared by the optimiser, serialisation, and tape leasing.  Each entry owns
// its Adam moment slots.

#include <string>
#include <vector>

#include "lab/tensor.hpp"

namespace lab::ad {

struct ParamEntry {
  std::string name;
  Tensor value;
  Tensor m;  // Adam first moment
  Tensor v;  // Adam second moment
};

struct ParamStore {
  std::vector<ParamEntry> entries;
  long adam_t = 0;  // completed Adam steps

  void add(std::string name, Tensor value);
  ParamEntry& at(const std::string& name);
  const ParamEntry& at(const std::string& name) const;
  std::size_t n_scalars() const;
};

// JSON layout: {"layers":[{"name","rows","cols","data":[...]}],"spec":{...}}.
// The "spec" object is caller-provided (typically the MLP architecture) and is
// returned verbatim on load.  Key order is fixed, so equal stores serialise to
// identical bytes.
std::string params_to_json(const ParamStore& p, const std::string& spec_json);
ParamStore params_from_json(const std::string& text, std::string* spec_json_out);
void save_params(const ParamStore& p, const std::string& spec_json, const std::string& path);
ParamStore load_params(const std::string& path, std::string* spec_json_out);

// Small shared file helpers (also used by datasets and reports).
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace lab::ad
