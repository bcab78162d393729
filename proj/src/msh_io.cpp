#include "emtherm/msh_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "emtherm/element_kernels.hpp"

namespace emtherm {

namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Next non-empty line, stripped of trailing CR. Returns false at EOF.
  bool next(std::string& line) {
    while (pos_ < text_.size()) {
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      line.assign(text_.substr(pos_, end - pos_));
      pos_ = end + 1;
      ++line_number_;
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  }

  int line_number() const { return line_number_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_number_ = 0;
};

[[noreturn]] void fail(const LineReader& reader, const std::string& what) {
  throw ConfigError("msh parse error near line " + std::to_string(reader.line_number()) +
                    ": " + what);
}

void expect_line(LineReader& reader, const char* expected) {
  std::string line;
  if (!reader.next(line) || line != expected)
    fail(reader, std::string("expected '") + expected + "'");
}

std::string unquote(const std::string& s, LineReader& reader) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"')
    fail(reader, "physical name must be double-quoted");
  return s.substr(1, s.size() - 2);
}

}  // namespace

Mesh parse_msh(std::string_view text, std::vector<std::string>* warnings) {
  LineReader reader(text);
  std::string line;

  expect_line(reader, "$MeshFormat");
  if (!reader.next(line)) fail(reader, "truncated $MeshFormat");
  {
    std::istringstream ss(line);
    std::string version;
    int file_type = -1, data_size = -1;
    ss >> version >> file_type >> data_size;
    if (!ss || version != "2.2" || file_type != 0)
      fail(reader, "unsupported mesh format header '" + line + "' (need ASCII 2.2)");
  }
  expect_line(reader, "$EndMeshFormat");

  Mesh mesh;
  expect_line(reader, "$PhysicalNames");
  if (!reader.next(line)) fail(reader, "truncated $PhysicalNames");
  int name_count = -1;
  if (std::sscanf(line.c_str(), "%d", &name_count) != 1 || name_count < 0)
    fail(reader, "bad physical name count");
  for (int i = 0; i < name_count; ++i) {
    if (!reader.next(line)) fail(reader, "truncated $PhysicalNames");
    std::istringstream ss(line);
    int dim = -1, id = 0;
    std::string quoted;
    ss >> dim >> id;
    std::getline(ss, quoted);
    while (!quoted.empty() && quoted.front() == ' ') quoted.erase(quoted.begin());
    if (!ss || quoted.empty()) fail(reader, "bad physical name entry");
    const std::string name = unquote(quoted, reader);
    if (dim == 2)
      mesh.tags.add_region(id, name);
    else if (dim == 1)
      mesh.tags.add_edge_set(id, name);
    else
      fail(reader, "physical group of unsupported dimension " + std::to_string(dim));
  }
  expect_line(reader, "$EndPhysicalNames");

  expect_line(reader, "$Nodes");
  if (!reader.next(line)) fail(reader, "truncated $Nodes");
  long node_count = -1;
  if (std::sscanf(line.c_str(), "%ld", &node_count) != 1 || node_count < 0)
    fail(reader, "bad node count");
  mesh.nodes.resize(node_count, 2);
  std::map<long, int> node_index;  // file id -> dense index, order preserved
  for (long i = 0; i < node_count; ++i) {
    if (!reader.next(line)) fail(reader, "truncated $Nodes");
    long id = 0;
    double x = 0, y = 0, z = 0;
    if (std::sscanf(line.c_str(), "%ld %lf %lf %lf", &id, &x, &y, &z) != 4)
      fail(reader, "bad node line '" + line + "'");
    if (!node_index.emplace(id, static_cast<int>(i)).second)
      fail(reader, "duplicate node id " + std::to_string(id));
    mesh.nodes(i, 0) = x;
    mesh.nodes(i, 1) = y;
  }
  expect_line(reader, "$EndNodes");

  expect_line(reader, "$Elements");
  if (!reader.next(line)) fail(reader, "truncated $Elements");
  long element_count = -1;
  if (std::sscanf(line.c_str(), "%ld", &element_count) != 1 || element_count < 0)
    fail(reader, "bad element count");

  std::vector<std::array<int, 3>> triangles;
  std::vector<int> triangle_tags;
  int reoriented = 0;
  for (long i = 0; i < element_count; ++i) {
    if (!reader.next(line)) fail(reader, "truncated $Elements");
    std::istringstream ss(line);
    long id = 0;
    int type = -1, ntags = -1;
    ss >> id >> type >> ntags;
    if (!ss || ntags < 1) fail(reader, "bad element line '" + line + "'");
    int physical = 0, scratch = 0;
    ss >> physical;
    for (int t = 1; t < ntags; ++t) ss >> scratch;
    auto resolve = [&](long file_id) {
      auto it = node_index.find(file_id);
      if (it == node_index.end())
        fail(reader, "element references missing node " + std::to_string(file_id));
      return it->second;
    };
    if (type == 1) {
      long a = 0, b = 0;
      ss >> a >> b;
      if (!ss) fail(reader, "bad line element '" + line + "'");
      if (!mesh.tags.has_edge_set(physical))
        fail(reader, "line element uses undeclared physical group " + std::to_string(physical));
      mesh.tagged_edges.push_back(TaggedEdge{{resolve(a), resolve(b)}, physical});
    } else if (type == 2) {
      long a = 0, b = 0, c = 0;
      ss >> a >> b >> c;
      if (!ss) fail(reader, "bad triangle element '" + line + "'");
      if (!mesh.tags.has_region(physical))
        fail(reader, "triangle uses undeclared physical group " + std::to_string(physical));
      std::array<int, 3> tri{resolve(a), resolve(b), resolve(c)};
      const Vec2 pa = mesh.nodes.row(tri[0]).transpose();
      const Vec2 pb = mesh.nodes.row(tri[1]).transpose();
      const Vec2 pc = mesh.nodes.row(tri[2]).transpose();
      if (triangle_area<double>(pa, pb, pc) < 0.0) {
        std::swap(tri[1], tri[2]);
        ++reoriented;
      }
      triangles.push_back(tri);
      triangle_tags.push_back(physical);
    } else {
      fail(reader, "unsupported element type " + std::to_string(type));
    }
  }
  expect_line(reader, "$EndElements");

  if (reoriented > 0 && warnings)
    warnings->push_back(std::to_string(reoriented) +
                        " clockwise triangle(s) were reoriented to CCW");

  mesh.elements.resize(static_cast<long>(triangles.size()), 3);
  mesh.element_region.resize(static_cast<long>(triangles.size()));
  for (std::size_t e = 0; e < triangles.size(); ++e) {
    for (int v = 0; v < 3; ++v) mesh.elements(static_cast<long>(e), v) = triangles[e][v];
    mesh.element_region(static_cast<long>(e)) = triangle_tags[e];
  }

  mesh.finalize(warnings);
  return mesh;
}

std::string serialize_msh(const Mesh& mesh) {
  std::string out;
  out.reserve(64 * static_cast<std::size_t>(mesh.node_count() + mesh.element_count()) + 256);
  char buf[128];

  out += "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";

  out += "$PhysicalNames\n";
  std::snprintf(buf, sizeof(buf), "%zu\n",
                mesh.tags.regions().size() + mesh.tags.edge_sets().size());
  out += buf;
  for (const auto& [id, name] : mesh.tags.edge_sets()) {
    std::snprintf(buf, sizeof(buf), "1 %d \"%s\"\n", id, name.c_str());
    out += buf;
  }
  for (const auto& [id, name] : mesh.tags.regions()) {
    std::snprintf(buf, sizeof(buf), "2 %d \"%s\"\n", id, name.c_str());
    out += buf;
  }
  out += "$EndPhysicalNames\n";

  out += "$Nodes\n";
  std::snprintf(buf, sizeof(buf), "%d\n", mesh.node_count());
  out += buf;
  for (int i = 0; i < mesh.node_count(); ++i) {
    std::snprintf(buf, sizeof(buf), "%d %.17g %.17g 0\n", i + 1, mesh.nodes(i, 0),
                  mesh.nodes(i, 1));
    out += buf;
  }
  out += "$EndNodes\n";

  out += "$Elements\n";
  std::snprintf(buf, sizeof(buf), "%zu\n",
                mesh.tagged_edges.size() + static_cast<std::size_t>(mesh.element_count()));
  out += buf;
  long next_id = 1;
  for (const auto& edge : mesh.tagged_edges) {
    std::snprintf(buf, sizeof(buf), "%ld 1 2 %d %d %d %d\n", next_id++, edge.tag, edge.tag,
                  edge.nodes[0] + 1, edge.nodes[1] + 1);
    out += buf;
  }
  for (int e = 0; e < mesh.element_count(); ++e) {
    std::snprintf(buf, sizeof(buf), "%ld 2 2 %d %d %d %d %d\n", next_id++,
                  mesh.element_region(e), mesh.element_region(e), mesh.elements(e, 0) + 1,
                  mesh.elements(e, 1) + 1, mesh.elements(e, 2) + 1);
    out += buf;
  }
  out += "$EndElements\n";
  return out;
}

Mesh read_msh_file(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open mesh file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_msh(ss.str(), warnings);
}

void write_msh_file(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write mesh file '" + path + "'");
  out << serialize_msh(mesh);
}

}  // namespace emtherm
