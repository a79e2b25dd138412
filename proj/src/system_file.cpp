#include "dkit/system_file.hpp"

#include <fstream>
#include <sstream>

#include "dkit/errors.hpp"

namespace dkit {

using nlohmann::json;

namespace {

int line_of_byte(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  int line = 1;
  for (std::size_t i = 0; i < byte; ++i)
    if (text[i] == '\n') ++line;
  return line;
}

template <FieldScalar T>
T parse_scalar(const json& j, const std::string& field);

template <>
Rational parse_scalar<Rational>(const json& j, const std::string& field) {
  try {
    if (j.is_number_integer()) {
      if (j.is_number_unsigned()) return Rational(mpz_class(std::to_string(j.get<std::uint64_t>())));
      return Rational(mpz_class(std::to_string(j.get<std::int64_t>())));
    }
    if (j.is_number_float()) return rational_from_shortest_decimal(j.get<double>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_object()) {
      if (j.contains("im") && parse_scalar<Rational>(j.at("im"), field + ".im") != 0)
        throw ParseError(field, "complex value not allowed in exact mode (use --mode float)");
      if (!j.contains("re")) throw ParseError(field, "complex object needs a \"re\" member");
      return parse_scalar<Rational>(j.at("re"), field + ".re");
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError(field, e.what());
  }
  throw ParseError(field, "expected a number or a rational string");
}

template <>
Complex parse_scalar<Complex>(const json& j, const std::string& field) {
  try {
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    if (j.is_string()) return Complex(parse_rational(j.get<std::string>()).get_d(), 0.0);
    if (j.is_object()) {
      if (!j.contains("re")) throw ParseError(field, "complex object needs a \"re\" member");
      const double re = parse_scalar<Complex>(j.at("re"), field + ".re").real();
      const double im = j.contains("im") ? parse_scalar<Complex>(j.at("im"), field + ".im").real() : 0.0;
      return Complex(re, im);
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError(field, e.what());
  }
  throw ParseError(field, "expected a number, a rational string or {\"re\", \"im\"}");
}

const json& require(const json& root, const char* key) {
  if (!root.contains(key)) throw ParseError(key, "missing field");
  return root.at(key);
}

std::size_t parse_count(const json& root, const char* key) {
  const json& j = require(root, key);
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw ParseError(key, "expected a non-negative integer");
  return static_cast<std::size_t>(j.get<long long>());
}

long parse_index(const json& j, const char* key) {
  if (!j.is_number_integer()) throw ParseError(key, "expected an integer");
  return j.get<long>();
}

template <FieldScalar T>
Matrix<T> parse_matrix(const json& j, const std::string& field, std::size_t rows, std::size_t cols) {
  if (!j.is_array()) throw ParseError(field, "expected an array of rows");
  if (j.size() != rows)
    throw ParseError(field, "expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
  Matrix<T> m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string row_field = field + "[" + std::to_string(i) + "]";
    const json& row = j[i];
    if (!row.is_array()) throw ParseError(row_field, "expected an array");
    if (row.size() != cols)
      throw ParseError(row_field, "expected " + std::to_string(cols) + " entries, got " + std::to_string(row.size()));
    for (std::size_t c = 0; c < cols; ++c)
      m(i, c) = parse_scalar<T>(row[c], row_field + "[" + std::to_string(c) + "]");
  }
  return m;
}

template <FieldScalar T>
Matrix<T> parse_vector(const json& j, const std::string& field, std::size_t size) {
  if (!j.is_array()) throw ParseError(field, "expected an array");
  if (j.size() != size)
    throw ParseError(field, "expected " + std::to_string(size) + " entries, got " + std::to_string(j.size()));
  Matrix<T> v(size, 1);
  for (std::size_t i = 0; i < size; ++i) v[i] = parse_scalar<T>(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

template <FieldScalar T>
SystemData<T> parse_data(const json& root) {
  SystemData<T> d;
  d.n = parse_count(root, "n");
  d.l = parse_count(root, "l");
  d.m = parse_count(root, "m");
  if (d.n == 0) throw ParseError("n", "state dimension must be positive");
  d.F = parse_matrix<T>(require(root, "F"), "F", d.n, d.n);
  d.G = parse_matrix<T>(require(root, "G"), "G", d.n, d.n);
  d.B = parse_matrix<T>(require(root, "B"), "B", d.n, d.l);
  d.C = parse_matrix<T>(require(root, "C"), "C", d.m, d.n);
  if (root.contains("Y0")) d.Y0 = parse_vector<T>(root.at("Y0"), "Y0", d.n);
  if (root.contains("k0")) d.k0 = parse_index(root.at("k0"), "k0");
  if (root.contains("K")) d.K = parse_index(root.at("K"), "K");
  if (root.contains("inputs")) {
    const json& inputs = root.at("inputs");
    if (!inputs.is_array()) throw ParseError("inputs", "expected an array of input vectors");
    for (std::size_t i = 0; i < inputs.size(); ++i)
      d.inputs.push_back(parse_vector<T>(inputs[i], "inputs[" + std::to_string(i) + "]", d.l));
  }
  if (d.K && *d.K < d.k0) throw ParseError("K", "horizon precedes k0");
  return d;
}

}  // namespace

SystemFile parse_system_file(std::string_view text, std::optional<Mode> mode_override) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("", e.what(), line_of_byte(text, e.byte == 0 ? 0 : e.byte - 1));
  }
  if (!root.is_object()) throw ParseError("", "top level must be an object", 1);

  SystemFile file;
  if (root.contains("mode")) {
    const json& m = root.at("mode");
    if (m == "exact")
      file.mode = Mode::Exact;
    else if (m == "float")
      file.mode = Mode::Float;
    else
      throw ParseError("mode", "expected \"exact\" or \"float\"");
  }
  if (mode_override) file.mode = *mode_override;

  try {
    if (file.mode == Mode::Exact)
      file.data = parse_data<Rational>(root);
    else
      file.data = parse_data<Complex>(root);
  } catch (const json::exception& e) {
    throw ParseError("", e.what());
  }
  return file;
}

SystemFile load_system_file(const std::filesystem::path& path, std::optional<Mode> mode_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_system_file(buffer.str(), mode_override);
}

json scalar_to_json(const Rational& x) { return format(x); }

json scalar_to_json(const Complex& x) {
  if (x.imag() == 0.0) return x.real();
  return json{{"re", x.real()}, {"im", x.imag()}};
}

json to_json(const SystemFile& file) {
  json root;
  root["mode"] = std::string(to_string(file.mode));
  std::visit(
      [&](const auto& d) {
        root["n"] = d.n;
        root["l"] = d.l;
        root["m"] = d.m;
        root["F"] = matrix_to_json(d.F);
        root["G"] = matrix_to_json(d.G);
        root["B"] = matrix_to_json(d.B);
        root["C"] = matrix_to_json(d.C);
        if (d.Y0) root["Y0"] = vector_to_json(*d.Y0);
        root["k0"] = d.k0;
        json inputs = json::array();
        for (const auto& v : d.inputs) inputs.push_back(vector_to_json(v));
        root["inputs"] = std::move(inputs);
        if (d.K) root["K"] = *d.K;
      },
      file.data);
  return root;
}

std::string serialize(const SystemFile& file) { return to_json(file).dump(2) + "\n"; }

}  // namespace dkit
