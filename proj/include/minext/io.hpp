#pragma once

#include "minext/extenders.hpp"
#include "minext/mesh.hpp"
#include "minext/pipeline.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace minext {

/// Problem document: polygon vertices, alpha in radians, breakpoints [[edge, fraction], [x, y]], eps and optional
/// budget overrides. Numbers are JSON numbers or strings ("p/q" or decimals).
struct ProblemFile {
    Problem problem;
    ExtenderBudget budget;
    std::vector<Point> polygon;  // vertices in file order; edge i runs from vertex i to vertex i + 1
};

/// `precision_bits` > 0 snaps decimal inputs to that many binary digits; 0 keeps their exact decimal value.
/// Rational strings are always exact. Throws Parse or Validation naming the offending field.
ProblemFile parse_problem_text(std::string_view text, int precision_bits = 0);
ProblemFile parse_problem(const std::filesystem::path& path, int precision_bits = 0);
std::string write_problem(const ProblemFile& file);

/// Vertex table with exact and decimal coordinates, triangle list and the boundary trace.
std::string write_mesh(const AffineMesh& mesh);
AffineMesh read_mesh(std::string_view text);

std::string write_report(const ExtensionResult& result);
std::string write_psi_report(const PsiBreakdown& psi, const Direction& dir);

/// Two panels: preimage mesh and image mesh, boundary and skeleton edges highlighted.
std::string render_svg(const AffineMesh& mesh, std::span<const std::array<Point, 2>> skeleton);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

/// Writes mesh and report files and, when requested, the figure. Throws Io.
void emit(const ExtensionResult& result, const std::filesystem::path& mesh_path,
          const std::filesystem::path& report_path, const std::optional<std::filesystem::path>& svg_path);

} // namespace minext
