#include "aicare/ehr/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "aicare/error.hpp"

namespace aicare::ehr {

namespace {

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> cells;
};

// RFC 4180 subset: quoted cells may contain commas, doubled quotes and newlines.
std::vector<CsvRow> read_csv(const std::string& text, const std::string& source) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string cell;
  bool quoted = false;
  bool row_has_content = false;
  std::size_t line = 1;
  row.line = 1;
  auto end_row = [&] {
    if (row_has_content || !cell.empty() || !row.cells.empty()) {
      row.cells.push_back(std::move(cell));
      rows.push_back(std::move(row));
    }
    cell.clear();
    row = CsvRow{};
    row_has_content = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cell.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        row_has_content = true;
        break;
      case ',':
        row.cells.push_back(std::move(cell));
        cell.clear();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        row.line = ++line;
        break;
      default:
        cell.push_back(c);
        row_has_content = true;
    }
  }
  if (quoted) throw ParseError(source, line, "unterminated quoted cell");
  end_row();
  return rows;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_number(const std::string& raw, const std::string& source,
                                   std::size_t line, const std::string& column) {
  const std::string s = trim(raw);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError(source, line, "column '" + column + "': cannot parse '" + s + "' as a number");
  }
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Maps header names to schema positions; rejects unknown and missing columns.
struct Header {
  std::size_t id_col = 0;
  std::vector<std::size_t> feature_cols;  // schema-aligned column index
  std::map<std::string, std::size_t> extra;
};

Header map_header(const CsvRow& header, const std::vector<Feature>& features,
                  const std::vector<std::string>& required, const std::string& source) {
  std::map<std::string, std::size_t> cols;
  for (std::size_t i = 0; i < header.cells.size(); ++i) {
    const auto name = trim(header.cells[i]);
    if (!cols.emplace(name, i).second) {
      throw ParseError(source, header.line, "duplicate column '" + name + "'");
    }
  }
  Header h;
  auto take = [&](const std::string& name) {
    const auto it = cols.find(name);
    if (it == cols.end()) throw ParseError(source, header.line, "missing column '" + name + "'");
    const auto idx = it->second;
    cols.erase(it);
    return idx;
  };
  h.id_col = take("patient_id");
  for (const auto& name : required) h.extra[name] = take(name);
  for (const auto& f : features) h.feature_cols.push_back(take(f.name));
  if (!cols.empty()) {
    throw ParseError(source, header.line, "unknown column '" + cols.begin()->first + "'");
  }
  return h;
}

bool parse_event(const std::string& raw, const std::string& source, std::size_t line) {
  const auto s = trim(raw);
  if (s == "1" || s == "true" || s == "True") return true;
  if (s == "0" || s == "false" || s == "False" || s.empty()) return false;
  throw ParseError(source, line, "column 'event': expected 0 or 1, got '" + s + "'");
}

const std::string& cell_at(const CsvRow& row, std::size_t col, std::size_t width,
                           const std::string& source) {
  if (row.cells.size() != width) {
    throw ParseError(source, row.line,
                     "expected " + std::to_string(width) + " cells, got " +
                         std::to_string(row.cells.size()));
  }
  return row.cells[col];
}

}  // namespace

Cohort parse_cohort(const std::string& visits_csv, const std::string& static_csv,
                    const FeatureSchema& schema, const std::string& source) {
  const std::string static_src = source + " (static)";
  const std::string visit_src = source + " (visits)";

  Cohort cohort;
  cohort.schema = schema;
  std::unordered_map<std::string, std::size_t> index;

  const auto srows = read_csv(static_csv, static_src);
  if (srows.empty()) throw ParseError(static_src, 1, "missing header row");
  const auto sh = map_header(srows[0], schema.static_features(), {"event", "event_time"}, static_src);
  const std::size_t swidth = srows[0].cells.size();
  for (std::size_t r = 1; r < srows.size(); ++r) {
    const auto& row = srows[r];
    PatientRecord rec;
    rec.patient_id = trim(cell_at(row, sh.id_col, swidth, static_src));
    if (rec.patient_id.empty()) throw ParseError(static_src, row.line, "empty patient_id");
    if (!index.emplace(rec.patient_id, cohort.patients.size()).second) {
      throw ParseError(static_src, row.line, "duplicate patient '" + rec.patient_id + "'");
    }
    for (std::size_t j = 0; j < sh.feature_cols.size(); ++j) {
      rec.static_values.push_back(parse_number(row.cells[sh.feature_cols[j]], static_src, row.line,
                                               schema.static_features()[j].name));
    }
    rec.outcome.event = parse_event(row.cells[sh.extra.at("event")], static_src, row.line);
    rec.outcome.time =
        parse_number(row.cells[sh.extra.at("event_time")], static_src, row.line, "event_time");
    cohort.patients.push_back(std::move(rec));
  }

  const auto vrows = read_csv(visits_csv, visit_src);
  if (vrows.empty()) throw ParseError(visit_src, 1, "missing header row");
  const auto vh = map_header(vrows[0], schema.dynamic_features(), {"time"}, visit_src);
  const std::size_t vwidth = vrows[0].cells.size();
  std::set<std::pair<std::string, double>> seen;
  for (std::size_t r = 1; r < vrows.size(); ++r) {
    const auto& row = vrows[r];
    const auto id = trim(cell_at(row, vh.id_col, vwidth, visit_src));
    const auto it = index.find(id);
    if (it == index.end()) {
      throw ParseError(visit_src, row.line, "patient '" + id + "' is not in the static file");
    }
    const auto time = parse_number(row.cells[vh.extra.at("time")], visit_src, row.line, "time");
    if (!time) throw ParseError(visit_src, row.line, "column 'time': missing visit time");
    if (!seen.emplace(id, *time).second) {
      throw ParseError(visit_src, row.line,
                       "duplicate visit for patient '" + id + "' at time " + format_double(*time));
    }
    Visit v;
    v.time = *time;
    for (std::size_t j = 0; j < vh.feature_cols.size(); ++j) {
      v.values.push_back(parse_number(row.cells[vh.feature_cols[j]], visit_src, row.line,
                                      schema.dynamic_features()[j].name));
    }
    cohort.patients[it->second].visits.push_back(std::move(v));
  }

  for (auto& p : cohort.patients) {
    if (p.visits.empty()) throw DataError("patient '" + p.patient_id + "' has no visits");
    std::stable_sort(p.visits.begin(), p.visits.end(),
                     [](const Visit& a, const Visit& b) { return a.time < b.time; });
    for (std::size_t t = 1; t < p.visits.size(); ++t) {
      if (std::floor(p.visits[t].time) == std::floor(p.visits[t - 1].time)) {
        p.visits[t].same_day_duplicate = true;
        p.visits[t - 1].same_day_duplicate = true;
      }
    }
  }
  std::size_t flagged = 0;
  for (const auto& p : cohort.patients) {
    flagged += static_cast<std::size_t>(std::count_if(
        p.visits.begin(), p.visits.end(), [](const Visit& v) { return v.same_day_duplicate; }));
  }
  if (flagged > 0) {
    cohort.warnings.push_back(std::to_string(flagged) + " visits share a calendar day with another visit");
  }
  cohort.validate();
  return cohort;
}

Cohort load_cohort(const std::string& visits_file, const std::string& static_file,
                   const std::string& schema_file) {
  const auto schema = FeatureSchema::load(schema_file);
  return parse_cohort(read_file(visits_file), read_file(static_file), schema, visits_file);
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string value_cell(const Value& v) { return v ? format_double(*v) : std::string{}; }

}  // namespace

CohortCsv to_csv(const Cohort& cohort) {
  std::ostringstream vs;
  std::ostringstream ss;
  vs << "patient_id,time";
  for (const auto& f : cohort.schema.dynamic_features()) vs << ',' << csv_cell(f.name);
  vs << '\n';
  ss << "patient_id";
  for (const auto& f : cohort.schema.static_features()) ss << ',' << csv_cell(f.name);
  ss << ",event,event_time\n";
  for (const auto& p : cohort.patients) {
    ss << csv_cell(p.patient_id);
    for (const auto& v : p.static_values) ss << ',' << value_cell(v);
    ss << ',' << (p.outcome.event ? 1 : 0) << ',' << value_cell(p.outcome.time) << '\n';
    for (const auto& visit : p.visits) {
      vs << csv_cell(p.patient_id) << ',' << format_double(visit.time);
      for (const auto& v : visit.values) vs << ',' << value_cell(v);
      vs << '\n';
    }
  }
  return {vs.str(), ss.str()};
}

void write_cohort(const Cohort& cohort, const std::string& visits_file,
                  const std::string& static_file, const std::string& schema_file) {
  const auto csv = to_csv(cohort);
  auto write = [](const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << text;
  };
  write(visits_file, csv.visits);
  write(static_file, csv.statics);
  cohort.schema.save(schema_file);
}

}  // namespace aicare::ehr
