#pragma once

// Line-level grammar of the SparseMl format, shared by the plain dataset
// reader and the concealed dataset reader.

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace clplu::detail {

struct SparseHeader {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t L = 0;
};

bool is_sparse_header(std::string_view line);
SparseHeader parse_sparse_header(std::string_view line, const std::string& source, std::size_t line_no);
std::string format_sparse_header(const SparseHeader& h);

struct SparseLine {
  std::vector<std::size_t> labels;
  std::vector<std::pair<std::size_t, double>> features;
  /// Text after a second '|', if any.
  std::optional<std::string_view> extra;
};

/// Validates label indices < L, feature indices < d and finite values.
SparseLine parse_sparse_line(std::string_view line, const SparseHeader& h, const std::string& source,
                             std::size_t line_no);

/// Label list and non-zero features, without a trailing newline.
void write_sparse_line(std::ostream& out, std::span<const std::size_t> labels,
                       std::span<const double> features);

std::vector<std::size_t> parse_index_list(std::string_view text, std::size_t bound, const std::string& what,
                                          const std::string& source, std::size_t line_no);

}  // namespace clplu::detail
