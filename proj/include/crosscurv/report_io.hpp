#pragma once

// JSON/CSV emission. Numbers are printed with 17 significant digits and object
// keys in sorted order, so equal results give byte-identical files. Files are
// written to a temporary sibling and renamed into place.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "crosscurv/cost_spec.hpp"
#include "crosscurv/regularity.hpp"

namespace crosscurv {

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void escape_string(std::ostream& os, const std::string& s) {
  os << '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': os << "\\\""; break;
      case '\\': os << "\\\\"; break;
      case '\n': os << "\\n"; break;
      case '\t': os << "\\t"; break;
      case '\r': os << "\\r"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          os << buf;
        } else {
          os << c;
        }
    }
  }
  os << '"';
}

inline void dump(std::ostream& os, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',' << nl;
        first = false;
        os << pad;
        escape_string(os, it.key());
        os << (indent > 0 ? ": " : ":");
        dump(os, it.value(), indent, depth + 1);
      }
      os << nl << close << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      os << '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) os << (flat ? ", " : ",");
        first = false;
        if (!flat) os << nl << pad;
        dump(os, e, indent, depth + 1);
      }
      if (!flat) os << nl << close;
      os << ']';
      return;
    }
    case Json::value_t::number_float:
      os << format_double(j.get<double>());
      return;
    case Json::value_t::string:
      escape_string(os, j.get<std::string>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace detail

inline std::string dump_json(const Json& j, int indent = 2) {
  std::ostringstream os;
  detail::dump(os, j, indent, 0);
  os << '\n';
  return os.str();
}

/// Writes `content` to `path` via a temporary file in the same directory and a rename.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

inline Json to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Json to_json(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Eigen::VectorXd(m.row(i).transpose())));
  return a;
}

inline Json to_json(const NullWitness& w) {
  return {{"x", to_json(w.x)}, {"xb", to_json(w.xb)}, {"p", to_json(w.p)}, {"pb", to_json(w.pb)},
          {"normalized_cross_curvature", w.normalized}};
}

inline Json to_json(const RegularityReport& r) {
  return {{"pairs_examined", r.pairs_examined},
          {"samples", r.samples},
          {"skipped_out_of_domain", r.skipped_out_of_domain},
          {"nondegeneracy_failures", r.nondegeneracy_failures},
          {"min_normalized_cross_curvature", r.min_normalized},
          {"classification", to_string(r.classification)},
          {"witness", to_json(r.witness)},
          {"tolerance", r.tolerance},
          {"seed", r.seed},
          {"note", "sampled on a finite lattice; not a proof over the continuum"}};
}

inline Json to_json(const MountainCheck& m) {
  return {{"max_violation", m.max_violation}, {"argmax_t", m.argmax_t}, {"argmax_y", to_json(m.argmax_y)},
          {"evaluated", m.evaluated},         {"skipped", m.skipped},   {"tolerance", m.tolerance},
          {"passed", m.passed}};
}

inline Json to_json(const ContactCheck& c) {
  return {{"passed", c.passed},     {"max_deficit", c.max_deficit}, {"argmax_t", c.argmax_t},
          {"argmax_y", to_json(c.argmax_y)}, {"evaluated", c.evaluated}, {"skipped", c.skipped},
          {"lambda1", c.lambda1}};
}

inline Json to_json(const ConstantsEstimate& c) {
  return {{"C0", c.C0}, {"C1", c.C1}, {"cross_norm", c.cross_norm}, {"inverse_norm", c.inverse_norm},
          {"c2", c.c2}, {"c3", c.c3}, {"classification", to_string(c.classification)}};
}

inline Json to_json(const MountainWitness& w) {
  return {{"x", to_json(w.x)},   {"xb0", to_json(w.xb0)}, {"xb1", to_json(w.xb1)},
          {"y", to_json(w.y)},   {"t", w.t},              {"violation", w.violation}};
}

inline MountainWitness witness_from_json(const Json& j) {
  try {
    detail::require_keys(j, {"x", "xb0", "xb1", "y", "t", "violation"}, "witness");
    MountainWitness w;
    w.x = detail::vector_from(j.at("x"), "witness.x");
    w.xb0 = detail::vector_from(j.at("xb0"), "witness.xb0");
    w.xb1 = detail::vector_from(j.at("xb1"), "witness.xb1");
    w.y = detail::vector_from(j.at("y"), "witness.y");
    w.t = j.at("t").get<double>();
    w.violation = j.at("violation").get<double>();
    const auto n = w.x.size();
    if (w.xb0.size() != n || w.xb1.size() != n || w.y.size() != n)
      throw InvalidSpec("witness: coordinate vectors differ in length");
    return w;
  } catch (const Json::exception& e) {
    throw InvalidSpec(std::string("witness: ") + e.what());
  }
}

/// CSV with one row per (t, y): t, y0..y_{n−1}, f. Skipped y are omitted.
inline std::string mountain_grid_csv(const MountainCheck& m) {
  std::ostringstream os;
  const Eigen::Index n = m.y.empty() ? 0 : m.y.front().size();
  os << 't';
  for (Eigen::Index i = 0; i < n; ++i) os << ",y" << i;
  os << ",f\n";
  for (std::size_t j = 0; j < m.y.size(); ++j) {
    if (std::isnan(m.f(0, static_cast<Eigen::Index>(j)))) continue;
    for (std::size_t k = 0; k < m.t.size(); ++k) {
      os << format_double(m.t[k]);
      for (Eigen::Index i = 0; i < n; ++i) os << ',' << format_double(m.y[j][i]);
      os << ',' << format_double(m.f(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j))) << '\n';
    }
  }
  return os.str();
}

}  // namespace crosscurv
