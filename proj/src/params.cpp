#include "lab/params.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lab/errors.hpp"

namespace lab::ad {

using nlohmann::ordered_json;

void ParamStore::add(std::string name, Tensor value) {
  for (const auto& e : entries)
    if (e.name == name) throw std::logic_error("ParamStore: duplicate entry " + name);
  ParamEntry e;
  e.name = std::move(name);
  e.m = Tensor::zeros(value.rows, value.cols);
  e.v = Tensor::zeros(value.rows, value.cols);
  e.value = std::move(value);
  entries.push_back(std::move(e));
}

ParamEntry& ParamStore::at(const std::string& name) {
  for (auto& e : entries)
    if (e.name == name) return e;
  throw std::logic_error("ParamStore: no entry named " + name);
}

const ParamEntry& ParamStore::at(const std::string& name) const {
  return const_cast<ParamStore*>(this)->at(name);
}

std::size_t ParamStore::n_scalars() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += static_cast<std::size_t>(e.value.size());
  return n;
}

std::string params_to_json(const ParamStore& p, const std::string& spec_json) {
  ordered_json root;
  root["layers"] = ordered_json::array();
  for (const auto& e : p.entries) {
    ordered_json layer;
    layer["name"] = e.name;
    layer["rows"] = e.value.rows;
    layer["cols"] = e.value.cols;
    layer["data"] = e.value.data;
    root["layers"].push_back(std::move(layer));
  }
  root["spec"] = spec_json.empty() ? ordered_json::object() : ordered_json::parse(spec_json);
  return root.dump();
}

ParamStore params_from_json(const std::string& text, std::string* spec_json_out) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("parameter JSON parse failure: ") + ex.what());
  }
  ParamStore p;
  for (const auto& layer : root.at("layers")) {
    const int rows = layer.at("rows").get<int>();
    const int cols = layer.at("cols").get<int>();
    Tensor t(rows, cols);
    const auto& data = layer.at("data");
    if (static_cast<int>(data.size()) != rows * cols)
      throw ConfigError("parameter JSON: data length does not match rows*cols for layer " +
                        layer.at("name").get<std::string>());
    const auto vals = data.get<std::vector<double>>();
    t.data.assign(vals.begin(), vals.end());
    p.add(layer.at("name").get<std::string>(), std::move(t));
  }
  if (spec_json_out) *spec_json_out = root.value("spec", ordered_json::object()).dump();
  return p;
}

void save_params(const ParamStore& p, const std::string& spec_json, const std::string& path) {
  write_text_file(path, params_to_json(p, spec_json));
}

ParamStore load_params(const std::string& path, std::string* spec_json_out) {
  return params_from_json(read_text_file(path), spec_json_out);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << text;
  if (!out) throw ConfigError("write failure: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace lab::ad
