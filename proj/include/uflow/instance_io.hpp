#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "uflow/core.hpp"

namespace uflow {

// Instance text format (UTF-8, whitespace separated, '#' starts a comment):
//
//   nodes N arcs M commodities K        directed header
//   tail head capacity                  M lines
//   origin destination demand           K lines
//   witness                             optional block
//   a0 a1 ... ak                        K lines of arc indices
//
// A header `nodes N edges M commodities K` declares an undirected graph: edge
// line i expands to arc 2i (tail -> head) and arc 2i+1 (head -> tail), each
// carrying the full capacity. Witness arc indices refer to expanded arcs.
Instance read_instance(std::istream& in);
void write_instance(std::ostream& out, const Instance& instance);

Instance load_instance(const std::filesystem::path& file);
void save_instance(const std::filesystem::path& file, const Instance& instance);

// Solution format: K lines of arc indices (commodity order), then a footer
// `overflow_sum X` / `congestion Y` / `total_demand Z`.
void write_solution(std::ostream& out, const PathAssignment& assignment,
                    const Metrics& metrics, double total_demand);
PathAssignment read_solution(std::istream& in, CommodityId commodity_count);

// Shortest round-trip decimal representation of a double.
std::string format_number(double value);

}  // namespace uflow
