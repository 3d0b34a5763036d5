#include "pacabs/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pacabs {

using nlohmann::json;

namespace {

Vector to_vector(const json& j, const char* what) {
  if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

Matrix to_matrix(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw std::invalid_argument(std::string(what) + " must be a nonempty array of rows");
  }
  const auto rows = j.size(), cols = j[0].size();
  Matrix M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw std::invalid_argument(std::string(what) + " has ragged rows");
    for (std::size_t c = 0; c < cols; ++c) M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
  }
  return M;
}

json from_vector(const Vector& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

json from_matrix(const Matrix& M) {
  json j = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) j.push_back(from_vector(M.row(r).transpose()));
  return j;
}

Box to_box(const json& j, const char* what) {
  return Box(to_vector(j.at("lower"), what), to_vector(j.at("upper"), what));
}

json from_box(const Box& b) { return {{"lower", from_vector(b.lower)}, {"upper", from_vector(b.upper)}}; }

GaussianNoise to_gaussian(const json& j) { return {to_vector(j.at("mean"), "noise.mean"), to_matrix(j.at("cov"), "noise.cov")}; }

NoiseSpec to_noise(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian") return to_gaussian(j);
  if (kind == "uniform") return UniformNoise{to_box(j, "noise")};
  if (kind == "triangular") {
    return TriangularNoise{to_vector(j.at("lower"), "noise.lower"), to_vector(j.at("mode"), "noise.mode"),
                           to_vector(j.at("upper"), "noise.upper")};
  }
  if (kind == "mixture") {
    MixtureNoise m;
    m.weights = j.at("weights").get<std::vector<double>>();
    for (const auto& c : j.at("components")) m.components.push_back(to_gaussian(c));
    return m;
  }
  if (kind == "file") return FileNoise{j.at("path").get<std::string>(), j.value("grouped", false)};
  throw std::invalid_argument("unknown noise kind: " + kind);
}

json from_noise(const NoiseSpec& n) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GaussianNoise>) {
          return {{"kind", "gaussian"}, {"mean", from_vector(s.mean)}, {"cov", from_matrix(s.cov)}};
        } else if constexpr (std::is_same_v<T, UniformNoise>) {
          return {{"kind", "uniform"}, {"lower", from_vector(s.box.lower)}, {"upper", from_vector(s.box.upper)}};
        } else if constexpr (std::is_same_v<T, TriangularNoise>) {
          return {{"kind", "triangular"},
                  {"lower", from_vector(s.lower)},
                  {"mode", from_vector(s.mode)},
                  {"upper", from_vector(s.upper)}};
        } else if constexpr (std::is_same_v<T, MixtureNoise>) {
          json comps = json::array();
          for (const auto& c : s.components) comps.push_back({{"mean", from_vector(c.mean)}, {"cov", from_matrix(c.cov)}});
          return {{"kind", "mixture"}, {"weights", s.weights}, {"components", comps}};
        } else {
          return {{"kind", "file"}, {"path", s.path}, {"grouped", s.grouped}};
        }
      },
      n);
}

// Goal/critical sets are lists of inclusive cell-index boxes.
std::vector<std::size_t> to_cells(const json& j, const Partition& part) {
  std::vector<std::size_t> out;
  for (const auto& b : j) {
    auto v = cells_in_index_box(part, b.at("lo").get<std::vector<int>>(), b.at("hi").get<std::vector<int>>());
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

// Greedy cover by index boxes: each box grows along the last dimension first.
json from_cells(const std::vector<std::size_t>& cells, const Partition& part) {
  std::vector<char> todo(part.num_cells(), 0);
  for (auto c : cells) todo[c] = 1;
  const std::vector<int>& counts = part.counts();
  const auto slab_free = [&](std::vector<int> lo, std::vector<int> hi, std::size_t d) {
    lo[d] = hi[d];
    bool ok = true;
    const auto box = cells_in_index_box(part, lo, hi);
    for (auto c : box) ok = ok && todo[c];
    return ok;
  };
  json j = json::array();
  for (auto c : cells) {
    if (!todo[c]) continue;
    const auto start = part.multi_index(c);
    std::vector<int> lo(start.begin(), start.end()), hi = lo;
    for (std::size_t d = counts.size(); d-- > 0;) {
      while (hi[d] + 1 < counts[d]) {
        ++hi[d];
        if (!slab_free(lo, hi, d)) {
          --hi[d];
          break;
        }
      }
    }
    for (auto cell : cells_in_index_box(part, lo, hi)) todo[cell] = 0;
    j.push_back({{"lo", lo}, {"hi", hi}});
  }
  return j;
}

ProblemSpec from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  if (j.value("schema", std::string()) != kConfigSchema) {
    throw std::invalid_argument(std::string("config schema must be \"") + kConfigSchema + "\"");
  }
  ProblemSpec s;
  if (j.contains("base")) s = builtin_model(j.at("base").get<std::string>());
  if (j.contains("name")) s.name = j.at("name").get<std::string>();

  if (j.contains("system")) {
    const json& sys = j.at("system");
    Matrix A = sys.contains("A") ? to_matrix(sys.at("A"), "system.A") : s.system.A();
    Matrix B = sys.contains("B") ? to_matrix(sys.at("B"), "system.B") : s.system.B();
    Vector q = sys.contains("q") ? to_vector(sys.at("q"), "system.q") : s.system.q();
    if (q.size() == 0) q = Vector::Zero(A.rows());
    Box U = sys.contains("input_box") ? to_box(sys.at("input_box"), "system.input_box") : s.system.input_box();
    s.system = LinearSystem(std::move(A), std::move(B), std::move(q), std::move(U));
    s.group = sys.value("group", s.group);
    s.input_slack = sys.value("input_slack", s.input_slack);
  }

  const bool relabel = j.contains("partition") || j.contains("goal") || j.contains("critical");
  if (j.contains("partition")) {
    const json& p = j.at("partition");
    s.partition = Partition(to_vector(p.at("origin"), "partition.origin"), to_vector(p.at("widths"), "partition.widths"),
                            p.at("counts").get<std::vector<int>>());
  }
  if (relabel) {
    Partition fresh(s.partition.origin(), s.partition.widths(), s.partition.counts());
    const auto goal = j.contains("goal") ? to_cells(j.at("goal"), fresh) : s.partition.goal_cells();
    const auto crit = j.contains("critical") ? to_cells(j.at("critical"), fresh) : s.partition.critical_cells();
    fresh.set_goal(goal);
    fresh.set_critical(crit);
    s.partition = std::move(fresh);
  }

  if (j.contains("property")) {
    const json& p = j.at("property");
    if (p.contains("K")) {
      const json& K = p.at("K");
      if (K.is_string()) {
        if (K.get<std::string>() != "inf") throw std::invalid_argument("property.K must be an integer or \"inf\"");
        s.horizon = Horizon::infinite();
      } else {
        s.horizon = Horizon::finite(K.get<int>());
      }
    }
    s.eta = p.value("eta", s.eta);
    if (p.contains("x0")) s.x0 = to_vector(p.at("x0"), "property.x0");
  }

  if (j.contains("confidence")) {
    const json& c = j.at("confidence");
    if (c.contains("alpha") && c.contains("beta")) throw std::invalid_argument("give only one of confidence.alpha and .beta");
    if (c.contains("alpha")) {
      s.alpha = c.at("alpha").get<double>();
      s.beta.reset();
    }
    if (c.contains("beta")) {
      s.beta = c.at("beta").get<double>();
      s.alpha.reset();
    }
  }

  if (j.contains("sampling")) {
    const json& p = j.at("sampling");
    s.N0 = p.value("N0", s.N0);
    s.gamma = p.value("gamma", s.gamma);
    s.Nmax = p.value("Nmax", s.Nmax);
  }
  if (j.contains("scheme")) {
    const json& p = j.at("scheme");
    s.symmetric = p.value("symmetric", s.symmetric);
    s.rho = p.value("rho", s.rho);
  }
  if (j.contains("noise")) s.noise = to_noise(j.at("noise"));
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();

  s.validate();
  return s;
}

}  // namespace

ProblemSpec parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    return from_json(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad config: ") + e.what());
  }
}

ProblemSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ProblemSpec& s) {
  json j;
  j["schema"] = kConfigSchema;
  j["name"] = s.name;
  j["system"] = {{"A", from_matrix(s.system.A())},
                 {"B", from_matrix(s.system.B())},
                 {"q", from_vector(s.system.q())},
                 {"input_box", from_box(s.system.input_box())},
                 {"group", s.group},
                 {"input_slack", s.input_slack}};
  j["partition"] = {{"origin", from_vector(s.partition.origin())},
                    {"widths", from_vector(s.partition.widths())},
                    {"counts", s.partition.counts()}};
  j["goal"] = from_cells(s.partition.goal_cells(), s.partition);
  j["critical"] = from_cells(s.partition.critical_cells(), s.partition);
  json K = s.horizon.is_finite() ? json(*s.horizon.steps) : json("inf");
  j["property"] = {{"K", K}, {"eta", s.eta}, {"x0", from_vector(s.x0)}};
  j["confidence"] = json::object();
  if (s.alpha) j["confidence"]["alpha"] = *s.alpha;
  if (s.beta) j["confidence"]["beta"] = *s.beta;
  j["sampling"] = {{"N0", s.N0}, {"gamma", s.gamma}, {"Nmax", s.Nmax}};
  j["scheme"] = {{"symmetric", s.symmetric}, {"rho", s.rho}};
  j["noise"] = from_noise(s.noise);
  j["seed"] = s.seed;
  return j.dump(2);
}

}  // namespace pacabs
