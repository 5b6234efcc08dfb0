#pragma once

#include <ostream>
#include <span>
#include <string>
#include <string_view>

namespace adiabatica::csv {

/// Scientific notation with 17 significant digits ("inf", "-inf", "nan" for non-finite).
std::string number(double v);

/// Writes one row of already formatted cells.
void write_row(std::ostream& out, std::span<const std::string> cells);

/// Writes one row of numbers.
void write_numbers(std::ostream& out, std::span<const double> values);

/// Quotes a cell if it contains a comma, quote or newline (RFC 4180).
std::string quote(std::string_view cell);

}  // namespace adiabatica::csv
