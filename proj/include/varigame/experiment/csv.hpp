#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace varigame::experiment {

/// Doubles print with 17 significant digits; an empty optional prints as an
/// empty field.
using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string, std::optional<double>>;

std::string format_double(double x);

/// Header-first CSV writer. Every row is flushed so an interrupted run keeps
/// the rows already produced.
class CsvWriter {
public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  /// Optional "# ..." line; must come before the header is written.
  static void comment(std::ostream& out, const std::string& text);

  void row(const std::vector<Cell>& cells);
  std::size_t columns() const { return header_.size(); }

private:
  std::ostream& out_;
  std::vector<std::string> header_;
};

/// "# varigame <what> generated at <UTC timestamp>".
std::string timestamp_comment(const std::string& what);

} // namespace varigame::experiment
