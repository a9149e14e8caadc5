#include "qwalk/serialize.hpp"

#include <fstream>
#include <sstream>

namespace qwalk {

namespace {

const Json& require(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field \"" + key + "\"");
  return *it;
}

Complex complex_from_json(const Json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ParseError(field + ": expected [re, im] pair of numbers");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

Dimension dimension_from_json(const Json& doc) {
  const Json& d = require(doc, "d", "document");
  if (!d.is_number_integer()) throw ParseError("d: expected an integer");
  const auto value = d.get<long long>();
  if (value < 1 || value > 1'000'000) throw ParseError("d: must be a positive integer");
  return Dimension(static_cast<int>(value));
}

Json parse_document(std::string_view document) {
  try {
    return Json::parse(document);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("document: invalid JSON (") + e.what() + ")");
  }
}

}  // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json coin_to_json(const CoinMatrix& c) {
  const int n = c.dimension().internal_size();
  Json rows = Json::array();
  for (int j = 0; j < n; ++j) {
    Json row = Json::array();
    for (int k = 0; k < n; ++k) row.push_back(complex_to_json(c(j, k)));
    rows.push_back(std::move(row));
  }
  return Json{{"d", c.dimension().value()}, {"matrix", std::move(rows)}};
}

Json state_to_json(const LatticeState& psi) {
  Json entries = Json::array();
  for (const auto& [x, v] : psi) {
    Json amp = Json::array();
    for (Eigen::Index c = 0; c < v.size(); ++c) amp.push_back(complex_to_json(v(c)));
    entries.push_back(Json{{"x", x.coords()}, {"amp", std::move(amp)}});
  }
  return Json{{"d", psi.dimension().value()}, {"entries", std::move(entries)}};
}

CoinMatrix coin_from_json(const Json& doc) {
  const Dimension d = dimension_from_json(doc);
  const Json& rows = require(doc, "matrix", "document");
  if (!rows.is_array()) throw ParseError("matrix: expected an array of rows");
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  Eigen::Index n_cols = 0;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (!rows[j].is_array()) throw ParseError("matrix[" + std::to_string(j) + "]: expected a row array");
    if (j == 0) n_cols = static_cast<Eigen::Index>(rows[j].size());
    if (static_cast<Eigen::Index>(rows[j].size()) != n_cols) {
      throw ShapeError("matrix: ragged rows (row " + std::to_string(j) + " has " +
                       std::to_string(rows[j].size()) + " entries)");
    }
  }
  ComplexMatrix m(n_rows, n_cols);
  for (Eigen::Index j = 0; j < n_rows; ++j) {
    for (Eigen::Index k = 0; k < n_cols; ++k) {
      m(j, k) = complex_from_json(rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)],
                                  "matrix[" + std::to_string(j) + "][" + std::to_string(k) + "]");
    }
  }
  return CoinMatrix(d, std::move(m), kUserUnitarityTol);
}

LatticeState state_from_json(const Json& doc) {
  const Dimension d = dimension_from_json(doc);
  const Json& entries = require(doc, "entries", "document");
  if (!entries.is_array()) throw ParseError("entries: expected an array");
  LatticeState psi(d);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string where = "entries[" + std::to_string(i) + "]";
    const Json& x = require(entries[i], "x", where);
    const Json& amp = require(entries[i], "amp", where);
    if (!x.is_array() || static_cast<int>(x.size()) != d.value()) {
      throw ParseError(where + ".x: expected " + std::to_string(d.value()) + " integers");
    }
    std::vector<int> coords;
    for (const auto& c : x) {
      if (!c.is_number_integer()) throw ParseError(where + ".x: expected integers");
      coords.push_back(c.get<int>());
    }
    if (!amp.is_array() || static_cast<int>(amp.size()) != d.internal_size()) {
      throw ParseError(where + ".amp: expected " + std::to_string(d.internal_size()) + " [re, im] pairs");
    }
    Spinor v(d.internal_size());
    for (std::size_t c = 0; c < amp.size(); ++c) {
      v(static_cast<Eigen::Index>(c)) = complex_from_json(amp[c], where + ".amp[" + std::to_string(c) + "]");
    }
    psi.add(Position(std::move(coords)), v);
  }
  return psi;
}

CoinMatrix load_coin(std::string_view document) { return coin_from_json(parse_document(document)); }

LatticeState load_state(std::string_view document) {
  return state_from_json(parse_document(document));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write file " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw InvalidArgument("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace qwalk
