#include "lab/trajectory.hpp"

#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lab/errors.hpp"

namespace lab::mech {

namespace {

template <class Get>
Tensor pack(const Trajectory& t, Get get) {
  const int n = t.n_points();
  if (n == 0) return Tensor(0, 0);
  const int k = t.states.front().Q.rows;
  Tensor out(k, n);
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < k; ++r) out(r, i) = get(i, r);
  return out;
}

}  // namespace

Tensor pack_positions(const Trajectory& t) {
  return pack(t, [&](int i, int r) { return t.states[static_cast<std::size_t>(i)].Q(r, 0); });
}

Tensor pack_velocities(const Trajectory& t) {
  return pack(t, [&](int i, int r) { return t.states[static_cast<std::size_t>(i)].Qdot(r, 0); });
}

Tensor pack_contacts(const Trajectory& t) {
  return pack(t, [&](int i, int r) {
    return static_cast<double>(t.contacts[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)]);
  });
}

std::string trajectory_to_json(const Trajectory& t) {
  nlohmann::ordered_json j;
  j["h"] = t.h;
  j["sigma"] = t.sigma;
  j["seed"] = t.seed;
  auto qs = nlohmann::json::array();
  auto vs = nlohmann::json::array();
  auto cs = nlohmann::json::array();
  for (std::size_t i = 0; i < t.states.size(); ++i) {
    qs.push_back(t.states[i].Q.data);
    vs.push_back(t.states[i].Qdot.data);
    cs.push_back(t.contacts[i]);
  }
  j["Q"] = std::move(qs);
  j["Qdot"] = std::move(vs);
  j["c"] = std::move(cs);
  return j.dump();
}

Trajectory trajectory_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ConfigError(std::string("trajectory: bad JSON: ") + ex.what());
  }
  Trajectory t;
  try {
    t.h = j.at("h").get<double>();
    t.sigma = j.at("sigma").get<double>();
    t.seed = j.at("seed").get<std::uint64_t>();
    const auto& qs = j.at("Q");
    const auto& vs = j.at("Qdot");
    const auto& cs = j.at("c");
    if (qs.size() != vs.size() || qs.size() != cs.size())
      throw ConfigError("trajectory: Q/Qdot/c length mismatch");
    for (std::size_t i = 0; i < qs.size(); ++i) {
      StaggeredState s;
      s.Q = Tensor::col(qs[i].get<std::vector<double>>());
      s.Qdot = Tensor::col(vs[i].get<std::vector<double>>());
      if (!s.Q.same_shape(s.Qdot))
        throw ConfigError("trajectory: Q/Qdot width mismatch");
      t.states.push_back(std::move(s));
      t.contacts.push_back(cs[i].get<std::vector<int>>());
      if (t.contacts.back().size() != static_cast<std::size_t>(t.states.back().Q.rows))
        throw ConfigError("trajectory: contact flag width mismatch");
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("trajectory: missing or mistyped field: ") + ex.what());
  }
  return t;
}

std::string trajectory_to_csv(const Trajectory& t) {
  const int k = t.n_points() ? t.states.front().Q.rows : 0;
  std::string out = "t";
  for (int r = 1; r <= k; ++r) out += ",q_" + std::to_string(r);
  for (int r = 1; r <= k; ++r) out += ",v_" + std::to_string(r);
  for (int r = 1; r <= k; ++r) out += ",c_" + std::to_string(r);
  out += "\n";
  char buf[64];
  for (int i = 0; i < t.n_points(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", t.h * i);
    out += buf;
    const auto& s = t.states[static_cast<std::size_t>(i)];
    for (int r = 0; r < k; ++r) {
      std::snprintf(buf, sizeof buf, ",%.17g", s.Q(r, 0));
      out += buf;
    }
    for (int r = 0; r < k; ++r) {
      std::snprintf(buf, sizeof buf, ",%.17g", s.Qdot(r, 0));
      out += buf;
    }
    for (int r = 0; r < k; ++r)
      out += "," + std::to_string(t.contacts[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)]);
    out += "\n";
  }
  return out;
}

}  // namespace lab::mech
