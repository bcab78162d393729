#include "emtherm/field_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace emtherm {

std::string field_vtk(const Mesh& mesh, const Vec& temperature) {
  if (temperature.size() != mesh.node_count())
    throw Error("temperature vector does not match the mesh");
  std::string out;
  out.reserve(static_cast<std::size_t>(mesh.node_count()) * 40);
  char line[128];

  out += "# vtk DataFile Version 3.0\n";
  out += "temperature field\n";
  out += "ASCII\n";
  out += "DATASET UNSTRUCTURED_GRID\n";
  std::snprintf(line, sizeof line, "POINTS %d double\n", mesh.node_count());
  out += line;
  for (int i = 0; i < mesh.node_count(); ++i) {
    std::snprintf(line, sizeof line, "%.9g %.9g 0\n", mesh.nodes(i, 0), mesh.nodes(i, 1));
    out += line;
  }
  std::snprintf(line, sizeof line, "CELLS %d %d\n", mesh.element_count(),
                4 * mesh.element_count());
  out += line;
  for (long e = 0; e < mesh.element_count(); ++e) {
    std::snprintf(line, sizeof line, "3 %d %d %d\n", mesh.elements(e, 0),
                  mesh.elements(e, 1), mesh.elements(e, 2));
    out += line;
  }
  std::snprintf(line, sizeof line, "CELL_TYPES %d\n", mesh.element_count());
  out += line;
  for (long e = 0; e < mesh.element_count(); ++e) out += "5\n";

  std::snprintf(line, sizeof line, "POINT_DATA %d\n", mesh.node_count());
  out += line;
  out += "SCALARS temperature_C double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < mesh.node_count(); ++i) {
    std::snprintf(line, sizeof line, "%.9g\n", temperature[i]);
    out += line;
  }
  std::snprintf(line, sizeof line, "CELL_DATA %d\n", mesh.element_count());
  out += line;
  out += "SCALARS region int 1\nLOOKUP_TABLE default\n";
  for (long e = 0; e < mesh.element_count(); ++e) {
    std::snprintf(line, sizeof line, "%d\n", mesh.element_region(e));
    out += line;
  }
  return out;
}

std::string field_csv(const Mesh& mesh, const Vec& temperature) {
  if (temperature.size() != mesh.node_count())
    throw Error("temperature vector does not match the mesh");
  std::string out = "node_id,x_m,y_m,temperature_C\n";
  char line[128];
  for (int i = 0; i < mesh.node_count(); ++i) {
    std::snprintf(line, sizeof line, "%d,%.9g,%.9g,%.9g\n", i, mesh.nodes(i, 0),
                  mesh.nodes(i, 1), temperature[i]);
    out += line;
  }
  return out;
}

std::string traces_csv(const std::map<std::string, Trace>& traces) {
  std::string out = "time_s,probe_id,temperature_C\n";
  char line[160];
  for (const auto& [name, trace] : traces) {
    trace.validate();
    if (name.find(',') != std::string::npos)
      throw ConfigError("probe id '" + name + "' contains a comma");
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
      std::snprintf(line, sizeof line, "%.9g,%s,%.9g\n", trace.times[i], name.c_str(),
                    trace.values[i]);
      out += line;
    }
  }
  return out;
}

std::map<std::string, Trace> parse_traces_csv(std::string_view text) {
  std::map<std::string, std::vector<std::pair<double, double>>> samples;

  std::size_t pos = 0;
  int line_no = 0;
  bool saw_header = false;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty()) continue;

    auto fail = [line_no](const std::string& what) {
      throw ConfigError("trace csv line " + std::to_string(line_no) + ": " + what);
    };
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos) fail("expected time_s,probe_id,temperature_C");
    if (line.find(',', c2 + 1) != std::string_view::npos) fail("too many columns");
    const std::string time_field(line.substr(0, c1));
    const std::string probe(line.substr(c1 + 1, c2 - c1 - 1));
    const std::string value_field(line.substr(c2 + 1));

    if (!saw_header) {
      if (time_field != "time_s" || probe != "probe_id" || value_field != "temperature_C")
        fail("expected header time_s,probe_id,temperature_C");
      saw_header = true;
      continue;
    }
    if (probe.empty()) fail("empty probe id");
    char* end = nullptr;
    errno = 0;
    const double t = std::strtod(time_field.c_str(), &end);
    if (end == time_field.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(t))
      fail("bad time value '" + time_field + "'");
    const double v = std::strtod(value_field.c_str(), &end);
    if (end == value_field.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
      fail("bad temperature value '" + value_field + "'");
    samples[probe].emplace_back(t, v);
  }
  if (!saw_header) throw ConfigError("trace csv is empty");

  std::map<std::string, Trace> out;
  for (auto& [name, rows] : samples) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    Trace trace;
    trace.times.reserve(rows.size());
    trace.values.reserve(rows.size());
    for (const auto& [t, v] : rows) {
      if (!trace.times.empty() && t == trace.times.back())
        throw ConfigError("duplicate sample for probe '" + name + "' at time " +
                          std::to_string(t));
      trace.times.push_back(t);
      trace.values.push_back(v);
    }
    trace.validate();
    out.emplace(name, std::move(trace));
  }
  if (out.empty()) throw ConfigError("trace csv has no samples");
  return out;
}

std::map<std::string, Trace> read_traces_file(const std::string& path) {
  return parse_traces_csv(read_text_file(path));
}

void write_traces_file(const std::map<std::string, Trace>& traces,
                       const std::string& path) {
  write_text_file(path, traces_csv(traces));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw ConfigError("failed reading '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace emtherm
