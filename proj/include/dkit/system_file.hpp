#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dkit/matrix.hpp"

namespace dkit {

/// Contents of a system description file, with scalars in one field.
template <FieldScalar T>
struct SystemData {
  std::size_t n = 0;
  std::size_t l = 0;
  std::size_t m = 0;
  Matrix<T> F;
  Matrix<T> G;
  Matrix<T> B;
  Matrix<T> C;
  std::optional<Matrix<T>> Y0;
  long k0 = 0;
  std::vector<Matrix<T>> inputs;  // V_{k0}, V_{k0+1}, ...
  std::optional<long> K;

  friend bool operator==(const SystemData&, const SystemData&) = default;
};

struct SystemFile {
  Mode mode = Mode::Exact;
  std::variant<SystemData<Rational>, SystemData<Complex>> data;

  friend bool operator==(const SystemFile&, const SystemFile&) = default;
};

/// Parses the JSON system description. Scalars may be JSON numbers, decimal
/// strings or "num/den" strings; float mode also accepts {"re": x, "im": y}.
/// `mode_override` replaces the file's "mode" field. Throws ParseError with
/// the offending field path (and line, for syntax errors).
SystemFile parse_system_file(std::string_view text, std::optional<Mode> mode_override = std::nullopt);
SystemFile load_system_file(const std::filesystem::path& path, std::optional<Mode> mode_override = std::nullopt);

/// Exact scalars are written as strings so rationals survive the round trip.
nlohmann::json to_json(const SystemFile& file);
std::string serialize(const SystemFile& file);

nlohmann::json scalar_to_json(const Rational& x);
nlohmann::json scalar_to_json(const Complex& x);

template <FieldScalar T>
nlohmann::json matrix_to_json(const Matrix<T>& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(scalar_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <FieldScalar T>
nlohmann::json vector_to_json(const Matrix<T>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(scalar_to_json(v[i]));
  return out;
}

}  // namespace dkit
