#pragma once

#include <map>
#include <string>
#include <string_view>

#include "emtherm/analysis.hpp"
#include "emtherm/mesh.hpp"
#include "emtherm/types.hpp"

namespace emtherm {

// Legacy ASCII VTK unstructured grid: temperature as point data, region
// tag as cell data. Readable by the usual viewers.
std::string field_vtk(const Mesh& mesh, const Vec& temperature);

// node_id,x_m,y_m,temperature_C
std::string field_csv(const Mesh& mesh, const Vec& temperature);

// Long-format probe table: time_s,probe_id,temperature_C. Written sorted
// by probe, then time. The reader accepts rows in any order, sorts them,
// and rejects duplicate (probe, time) pairs. Probe ids must not contain
// commas.
std::string traces_csv(const std::map<std::string, Trace>& traces);
std::map<std::string, Trace> parse_traces_csv(std::string_view text);

std::map<std::string, Trace> read_traces_file(const std::string& path);
void write_traces_file(const std::map<std::string, Trace>& traces,
                       const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace emtherm
