#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "emtherm/mesh.hpp"

namespace emtherm {

// Reads the ASCII MSH 2.2 subset: $MeshFormat, $PhysicalNames, $Nodes and
// $Elements with element types 1 (line) and 2 (triangle). Clockwise
// triangles are reoriented with a warning; structural problems (bad header,
// unknown element type, dangling node reference, undeclared physical group)
// raise ConfigError.
Mesh parse_msh(std::string_view text, std::vector<std::string>* warnings = nullptr);

// Inverse of parse_msh. Coordinates are printed with 17 significant digits
// so parse(serialize(mesh)) reproduces every coordinate bit.
std::string serialize_msh(const Mesh& mesh);

Mesh read_msh_file(const std::string& path, std::vector<std::string>* warnings = nullptr);
void write_msh_file(const Mesh& mesh, const std::string& path);

}  // namespace emtherm
