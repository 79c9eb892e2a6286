#pragma once

// Text file formats: networks (`wh1net v1`), source measures (`wh1measure
// v1`), transport plan export and flat key=value configuration files.

#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wh1/geometry.hpp"
#include "wh1/measures.hpp"
#include "wh1/transport.hpp"

namespace wh1 {

/// Malformed or unreadable input file.
struct InputError : Error {
  using Error::Error;
};

namespace io_detail {

inline std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

inline std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

inline double to_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw InputError(where + ": invalid number '" + std::string(s) + "'");
  return v;
}

inline long to_long(std::string_view s, const std::string& where) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InputError(where + ": invalid integer '" + std::string(s) + "'");
  return v;
}

inline int parse_dim_header(const std::vector<std::string>& tk, const std::string& magic, const std::string& where) {
  if (tk.size() != 3 || tk[0] != magic || tk[1] != "v1" || tk[2].rfind("d=", 0) != 0)
    throw InputError(where + ": expected header '" + magic + " v1 d=<dim>'");
  const long d = to_long(std::string_view(tk[2]).substr(2), where);
  if (d != 2 && d != 3) throw InputError(where + ": dimension must be 2 or 3");
  return static_cast<int>(d);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Content lines with comments stripped, paired with 1-based line numbers.
inline std::vector<std::pair<int, std::vector<std::string>>> content_lines(const std::string& text) {
  std::vector<std::pair<int, std::vector<std::string>>> out;
  std::istringstream is(text);
  std::string line;
  int no = 0;
  while (std::getline(is, line)) {
    ++no;
    auto tk = tokens(strip_comment(line));
    if (!tk.empty()) out.emplace_back(no, std::move(tk));
  }
  return out;
}

/// Shortest round-trip decimal representation.
inline std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << content;
  if (!out) throw InputError("write failed for '" + path + "'");
}

}  // namespace io_detail

// ---------------------------------------------------------------------------
// Networks

inline Network parse_network(const std::string& text, const std::string& name = "network") {
  const auto lines = io_detail::content_lines(text);
  if (lines.empty()) throw InputError(name + ": empty file");
  Network net;
  net.dim = io_detail::parse_dim_header(lines[0].second, "wh1net", name + ":" + std::to_string(lines[0].first));
  bool edges_started = false;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& [no, tk] = lines[k];
    const std::string where = name + ":" + std::to_string(no);
    if (tk[0] == "v") {
      if (edges_started) throw InputError(where + ": vertex after edges");
      if (static_cast<int>(tk.size()) != 1 + net.dim) throw InputError(where + ": vertex needs " + std::to_string(net.dim) + " coordinates");
      Point p;
      for (int c = 0; c < net.dim; ++c) p[c] = io_detail::to_double(tk[1 + c], where);
      net.add_vertex(p);
    } else if (tk[0] == "e") {
      edges_started = true;
      if (tk.size() != 3) throw InputError(where + ": edge needs two indices");
      const long a = io_detail::to_long(tk[1], where), b = io_detail::to_long(tk[2], where);
      const long n = static_cast<long>(net.vertices.size());
      if (a < 0 || b < 0 || a >= n || b >= n) throw InputError(where + ": edge index out of range");
      net.add_edge(static_cast<int>(a), static_cast<int>(b));
    } else {
      throw InputError(where + ": unknown record '" + tk[0] + "'");
    }
  }
  try {
    validate(net);
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(name + ": " + e.what());
  }
  return net;
}

inline Network read_network(const std::string& path) { return parse_network(io_detail::read_file(path), path); }

inline std::string format_network(const Network& net) {
  std::ostringstream os;
  os << "wh1net v1 d=" << net.dim << "\n";
  for (const auto& v : net.vertices) {
    os << "v";
    for (int c = 0; c < net.dim; ++c) os << " " << io_detail::fmt(v[c]);
    os << "\n";
  }
  for (const auto& e : net.edges) os << "e " << e.a << " " << e.b << "\n";
  return os.str();
}

inline void write_network(const std::string& path, const Network& net) { io_detail::write_file(path, format_network(net)); }

// ---------------------------------------------------------------------------
// Source measures
//
//   wh1measure v1 d=<dim>
//   atoms                      (optional section)
//   x y [z] w                  (one line per atom)
//   density                    (optional section)
//   origin x y [z]
//   cell <size>
//   dims nx ny [nz]
//   values v0 v1 ...           (row-major, x fastest; may continue on
//                               following lines)

inline SourceMeasure parse_measure(const std::string& text, const std::string& name = "measure") {
  const auto lines = io_detail::content_lines(text);
  if (lines.empty()) throw InputError(name + ": empty file");
  SourceMeasure rho;
  rho.dim = io_detail::parse_dim_header(lines[0].second, "wh1measure", name + ":" + std::to_string(lines[0].first));
  enum class Section { none, atoms, density } sec = Section::none;
  bool in_values = false;
  bool have_origin = false, have_cell = false, have_dims = false;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& [no, tk] = lines[k];
    const std::string where = name + ":" + std::to_string(no);
    if (tk.size() == 1 && tk[0] == "atoms") {
      if (sec != Section::none) throw InputError(where + ": 'atoms' must be the first section");
      sec = Section::atoms;
      continue;
    }
    if (tk.size() == 1 && tk[0] == "density") {
      if (sec == Section::density) throw InputError(where + ": duplicate 'density' section");
      sec = Section::density;
      rho.density = DensityGrid{};
      rho.density->values.clear();
      in_values = false;
      continue;
    }
    if (sec == Section::atoms) {
      if (static_cast<int>(tk.size()) != rho.dim + 1) throw InputError(where + ": atom needs coordinates and weight");
      Atom a;
      for (int c = 0; c < rho.dim; ++c) a.x[c] = io_detail::to_double(tk[c], where);
      a.w = io_detail::to_double(tk[rho.dim], where);
      rho.atoms.push_back(a);
    } else if (sec == Section::density) {
      auto& g = *rho.density;
      std::size_t first = 0;
      if (tk[0] == "origin") {
        if (static_cast<int>(tk.size()) != rho.dim + 1) throw InputError(where + ": origin needs " + std::to_string(rho.dim) + " coordinates");
        for (int c = 0; c < rho.dim; ++c) g.origin[c] = io_detail::to_double(tk[1 + c], where);
        have_origin = true;
        continue;
      }
      if (tk[0] == "cell") {
        if (tk.size() != 2) throw InputError(where + ": cell needs one value");
        g.cell = io_detail::to_double(tk[1], where);
        have_cell = true;
        continue;
      }
      if (tk[0] == "dims") {
        if (static_cast<int>(tk.size()) != rho.dim + 1) throw InputError(where + ": dims needs " + std::to_string(rho.dim) + " values");
        for (int c = 0; c < rho.dim; ++c) g.dims[c] = static_cast<int>(io_detail::to_long(tk[1 + c], where));
        have_dims = true;
        continue;
      }
      if (tk[0] == "values") {
        in_values = true;
        first = 1;
      } else if (!in_values) {
        throw InputError(where + ": unknown density record '" + tk[0] + "'");
      }
      for (std::size_t t = first; t < tk.size(); ++t) g.values.push_back(io_detail::to_double(tk[t], where));
    } else {
      throw InputError(where + ": expected 'atoms' or 'density' section");
    }
  }
  if (rho.density && !(have_origin && have_cell && have_dims && in_values))
    throw InputError(name + ": density section needs origin, cell, dims and values");
  try {
    validate(rho);
  } catch (const Error& e) {
    throw InputError(name + ": " + e.what());
  }
  return rho;
}

inline SourceMeasure read_measure(const std::string& path) { return parse_measure(io_detail::read_file(path), path); }

inline std::string format_measure(const SourceMeasure& rho) {
  std::ostringstream os;
  os << "wh1measure v1 d=" << rho.dim << "\n";
  if (!rho.atoms.empty()) {
    os << "atoms\n";
    for (const auto& a : rho.atoms) {
      for (int c = 0; c < rho.dim; ++c) os << io_detail::fmt(a.x[c]) << " ";
      os << io_detail::fmt(a.w) << "\n";
    }
  }
  if (rho.density) {
    const auto& g = *rho.density;
    os << "density\norigin";
    for (int c = 0; c < rho.dim; ++c) os << " " << io_detail::fmt(g.origin[c]);
    os << "\ncell " << io_detail::fmt(g.cell) << "\ndims";
    for (int c = 0; c < rho.dim; ++c) os << " " << g.dims[c];
    os << "\nvalues\n";
    for (std::size_t k = 0; k < g.values.size(); ++k)
      os << io_detail::fmt(g.values[k]) << ((k + 1) % static_cast<std::size_t>(g.dims[0]) == 0 ? "\n" : " ");
  }
  return os.str();
}

inline void write_measure(const std::string& path, const SourceMeasure& rho) {
  io_detail::write_file(path, format_measure(rho));
}

// ---------------------------------------------------------------------------
// Transport plans: header with cost and p, then `i j mass` lines.

inline std::string format_plan(const TransportPlan& plan) {
  std::ostringstream os;
  os << "wh1plan v1 cost=" << io_detail::fmt(plan.cost) << " p=" << io_detail::fmt(plan.p) << "\n";
  for (const auto& e : plan.entries) os << e.i << " " << e.j << " " << io_detail::fmt(e.mass) << "\n";
  return os.str();
}

inline void write_plan(const std::string& path, const TransportPlan& plan) { io_detail::write_file(path, format_plan(plan)); }

// ---------------------------------------------------------------------------
// Flat key=value configuration

using KeyValues = std::map<std::string, std::string>;

/// Parses `key = value` lines; `#` starts a comment. Duplicate keys: last wins.
inline KeyValues parse_key_values(const std::string& text, const std::string& name = "config") {
  KeyValues kv;
  std::istringstream is(text);
  std::string line;
  int no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    ++no;
    const std::string body = trim(io_detail::strip_comment(line));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw Error(name + ":" + std::to_string(no) + ": expected key=value");
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw Error(name + ":" + std::to_string(no) + ": empty key");
    kv[key] = trim(body.substr(eq + 1));
  }
  return kv;
}

}  // namespace wh1
