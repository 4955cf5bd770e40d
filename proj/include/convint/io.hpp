// SPDX-License-Identifier: MIT
#pragma once

#include <string>
#include <vector>

#include "convint/field.hpp"

namespace convint::io {

// "CINS" | version u32 | n u32 | rank u8 | ncomp u8 | float64 physical values per component.
void write_field(const std::string& path, const Field& f);
Field read_field(const std::string& path);

// Header row followed by one row per entry.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Binary P5 image of one component, linearly scaled to [0, 255].
void write_pgm(const std::string& path, const Field& f, int component = 0);

}  // namespace convint::io
