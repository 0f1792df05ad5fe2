#include "varigame/experiment/csv.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <stdexcept>

#include <fmt/chrono.h>
#include <fmt/format.h>

namespace varigame::experiment {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

} // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header) : out_(out), header_(std::move(header)) {
  for (std::size_t i = 0; i < header_.size(); ++i) out_ << (i ? "," : "") << quote(header_[i]);
  out_ << '\n' << std::flush;
}

void CsvWriter::comment(std::ostream& out, const std::string& text) { out << "# " << text << '\n'; }

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != header_.size())
    throw std::logic_error("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                           std::to_string(header_.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << std::visit(overloaded{
                           [](double d) { return format_double(d); },
                           [](std::int64_t v) { return std::to_string(v); },
                           [](std::uint64_t v) { return std::to_string(v); },
                           [](const std::string& s) { return quote(s); },
                           [](const std::optional<double>& d) { return d ? format_double(*d) : std::string(); },
                       },
                       cells[i]);
  }
  out_ << '\n' << std::flush;
}

std::string timestamp_comment(const std::string& what) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("varigame {} generated at {:%Y-%m-%dT%H:%M:%SZ}", what, fmt::gmtime(now));
}

} // namespace varigame::experiment
