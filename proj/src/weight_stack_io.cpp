#include <cmath>
#include <cstdio>
#include <string>

#include "lyapinit/ensembles.hpp"
#include "lyapinit/errors.hpp"

namespace lyapinit {

namespace {

using nlohmann::json;

void write_float(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

bool is_scalar_array(const json& j) {
  for (const auto& e : j) {
    if (e.is_structured()) return false;
  }
  return true;
}

void write(std::string& out, const json& j, int indent, int level) {
  const auto newline = [&](int lvl) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * lvl), ' ');
  };
  switch (j.type()) {
    case json::value_t::number_float:
      write_float(out, j.get<double>());
      return;
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(level + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write(out, it.value(), indent, level + 1);
      }
      newline(level);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool inline_elems = is_scalar_array(j);
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += inline_elems && indent >= 0 ? ", " : ",";
        first = false;
        if (!inline_elems) newline(level + 1);
        write(out, e, indent, level + 1);
      }
      if (!inline_elems) newline(level);
      out += ']';
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json17(const json& doc, int indent) {
  std::string out;
  write(out, doc, indent, 0);
  return out;
}

json to_json(const WeightStack& stack) {
  json matrices = json::array();
  for (const Matrix& m : stack.matrices) {
    json flat = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
    matrices.push_back(std::move(flat));
  }
  return json{
      {"d", stack.d},
      {"depth", stack.depth()},
      {"ensemble", {{"kind", std::string(to_string(stack.ensemble.kind))}, {"scale", stack.ensemble.scale}}},
      {"seed", {{"master", stack.seed.master}, {"stream", stack.seed.stream}}},
      {"matrices", std::move(matrices)},
      {"diagnostics", stack.diagnostics.is_null() ? json::object() : stack.diagnostics},
  };
}

std::string to_json_string(const WeightStack& stack, int indent) { return dump_json17(to_json(stack), indent); }

WeightStack weight_stack_from_json(const json& doc) {
  try {
    WeightStack stack;
    stack.d = doc.at("d").get<int>();
    const int depth = doc.at("depth").get<int>();
    stack.ensemble.kind = parse_ensemble_kind(doc.at("ensemble").at("kind").get<std::string>());
    stack.ensemble.d = stack.d;
    stack.ensemble.scale = doc.at("ensemble").at("scale").get<double>();
    stack.seed.master = doc.at("seed").at("master").get<std::uint64_t>();
    stack.seed.stream = doc.at("seed").at("stream").get<std::uint64_t>();
    if (doc.contains("diagnostics")) stack.diagnostics = doc.at("diagnostics");

    const auto& mats = doc.at("matrices");
    if (static_cast<int>(mats.size()) != depth) throw UsageError("matrices length does not match depth");
    const auto n = static_cast<std::size_t>(stack.d) * static_cast<std::size_t>(stack.d);
    for (const auto& flat : mats) {
      if (flat.size() != n) throw UsageError("matrix entry count does not match d*d");
      Matrix m(stack.d, stack.d);
      for (std::size_t k = 0; k < n; ++k) m(k / stack.d, k % stack.d) = flat[k].get<double>();
      stack.matrices.push_back(std::move(m));
    }
    stack.ensemble.validate();
    stack.validate();
    return stack;
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed weight stack JSON: ") + e.what());
  }
}

}  // namespace lyapinit
