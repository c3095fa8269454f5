#include "protogauss/embeddings.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "protogauss/errors.hpp"

namespace protogauss {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
      ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r')
      ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view field, int line_no) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw ParseError("bad number '" + std::string(field) + "'", line_no);
  if (!std::isfinite(value))
    throw ParseError("non-finite coordinate '" + std::string(field) + "'",
                     line_no);
  return value;
}

long parse_count(std::string_view field, int line_no) {
  long value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || value < 0)
    throw ParseError("bad count '" + std::string(field) + "'", line_no);
  return value;
}

}  // namespace

const std::vector<double>* EmbeddingStore::individual(
    const std::string& id) const {
  const auto it = individuals.find(id);
  return it == individuals.end() ? nullptr : &it->second;
}

const std::vector<double>* EmbeddingStore::concept_vector(
    const std::string& name) const {
  const auto it = concepts.find(name);
  return it == concepts.end() ? nullptr : &it->second;
}

EmbeddingStore load_embeddings(std::string_view text) {
  EmbeddingStore store;
  long expected = -1;
  long rows = 0;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    const auto fields = split_fields(line);
    if (fields.empty()) continue;

    if (expected < 0) {
      if (fields.size() != 2)
        throw ParseError("header must be '<count> <dim>'", line_no);
      expected = parse_count(fields[0], line_no);
      const long dim = parse_count(fields[1], line_no);
      if (dim <= 0) throw ParseError("dimension must be positive", line_no);
      store.dim = static_cast<int>(dim);
      continue;
    }

    if (fields.size() != static_cast<std::size_t>(store.dim) + 2)
      throw ParseError("expected kind, id and " + std::to_string(store.dim) +
                           " coordinates",
                       line_no);
    const std::string_view kind = fields[0];
    if (kind != "I" && kind != "C")
      throw ParseError("kind must be I or C", line_no);
    std::string id(fields[1]);
    std::vector<double> coords(store.dim);
    for (int j = 0; j < store.dim; ++j)
      coords[j] = parse_double(fields[j + 2], line_no);

    auto& table = kind == "I" ? store.individuals : store.concepts;
    if (!table.emplace(std::move(id), std::move(coords)).second)
      throw ParseError("duplicate row for '" + std::string(fields[1]) + "'",
                       line_no);
    ++rows;
  }
  if (expected < 0) throw ParseError("missing header", 1);
  if (rows != expected)
    throw ParseError("header announced " + std::to_string(expected) +
                         " rows but file has " + std::to_string(rows),
                     line_no);
  return store;
}

std::string save_embeddings(const EmbeddingStore& store) {
  std::ostringstream out;
  out << store.individuals.size() + store.concepts.size() << ' ' << store.dim
      << '\n';
  char buf[40];
  const auto write_block = [&](const char* kind, const auto& table) {
    for (const auto& [id, coords] : table) {
      out << kind << ' ' << id;
      for (const double x : coords) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out << ' ' << buf;
      }
      out << '\n';
    }
  };
  write_block("I", store.individuals);
  write_block("C", store.concepts);
  return out.str();
}

std::optional<RoleGaussian> fit_role_gaussian(
    const std::string& role,
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const EmbeddingStore& store, double floor) {
  std::vector<std::vector<double>> diffs;
  for (const auto& [head, tail] : pairs) {
    const std::vector<double>* h = store.individual(head);
    const std::vector<double>* t = store.individual(tail);
    if (!h || !t) {
      std::cerr << "warning: role " << role << ": skipping pair (" << head
                << ", " << tail << "), missing vector\n";
      continue;
    }
    std::vector<double> d(store.dim);
    for (int j = 0; j < store.dim; ++j) d[j] = (*t)[j] - (*h)[j];
    diffs.push_back(std::move(d));
  }
  if (diffs.size() < 2) return std::nullopt;
  RoleGaussian out;
  out.role = role;
  out.gaussian = empirical_fit(diffs, floor);
  out.support = diffs.size();
  return out;
}

std::optional<RoleGaussian> fit_role_gaussian(const std::string& role,
                                              const KnowledgeBase& kb,
                                              const EmbeddingStore& store,
                                              double floor) {
  const auto it = kb.role_instances.find(role);
  if (it == kb.role_instances.end()) return std::nullopt;
  return fit_role_gaussian(role, it->second, store, floor);
}

}  // namespace protogauss
