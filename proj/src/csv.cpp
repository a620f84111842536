#include "evykit/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <utility>
#include <vector>

#include "evykit/errors.hpp"

namespace evy {

std::string csv_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& field, const std::string& source,
                    std::size_t line_no) {
  const std::string t = trim(field);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw io_error(source + ":" + std::to_string(line_no) +
                   ": expected a number, got '" + field + "'");
  }
  return v;
}

int parse_int(const std::string& field, const std::string& source,
              std::size_t line_no) {
  const double v = parse_double(field, source, line_no);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw io_error(source + ":" + std::to_string(line_no) +
                   ": expected an integer, got '" + field + "'");
  }
  return i;
}

// Returns data lines (comment/blank lines dropped) with their numbers.
std::vector<std::pair<std::size_t, std::string>> data_lines(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    out.emplace_back(line_no, line);
  }
  return out;
}

void check_header(const std::vector<std::string>& fields,
                  const std::vector<std::string>& expected,
                  const std::string& source, std::size_t line_no) {
  bool ok = fields.size() == expected.size();
  for (std::size_t i = 0; ok && i < fields.size(); ++i) {
    ok = trim(fields[i]) == expected[i];
  }
  if (!ok) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) want += ",";
      want += expected[i];
    }
    throw io_error(source + ":" + std::to_string(line_no) +
                   ": bad header, expected '" + want + "'");
  }
}

}  // namespace

ObservationSeries read_observations_csv(std::istream& in,
                                        const std::string& source_name) {
  const auto lines = data_lines(in);
  if (lines.empty()) {
    throw io_error(source_name + ": empty observation file");
  }
  check_header(split_fields(lines[0].second),
               {"year", "biomass_prey", "biomass_pred", "catch_prey",
                "catch_pred"},
               source_name, lines[0].first);
  ObservationSeries series;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& [no, line] = lines[k];
    const auto f = split_fields(line);
    if (f.size() != 5) {
      throw io_error(source_name + ":" + std::to_string(no) +
                     ": expected 5 fields, got " + std::to_string(f.size()));
    }
    series.years.push_back(parse_int(f[0], source_name, no));
    series.biomass_obs.push_back({parse_double(f[1], source_name, no),
                                  parse_double(f[2], source_name, no)});
    series.catch_obs.push_back({parse_double(f[3], source_name, no),
                                parse_double(f[4], source_name, no)});
  }
  try {
    series.validate();
  } catch (const std::invalid_argument& e) {
    throw io_error(source_name + ": " + e.what());
  }
  return series;
}

void write_observations_csv(std::ostream& out,
                            const ObservationSeries& series) {
  out << "year,biomass_prey,biomass_pred,catch_prey,catch_pred\n";
  for (std::size_t t = 0; t < series.size(); ++t) {
    out << series.years[t] << ',' << csv_double(series.biomass_obs[t][0])
        << ',' << csv_double(series.biomass_obs[t][1]) << ','
        << csv_double(series.catch_obs[t][0]) << ','
        << csv_double(series.catch_obs[t][1]) << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in,
                               const std::string& source_name) {
  const auto lines = data_lines(in);
  if (lines.empty()) {
    throw io_error(source_name + ": empty trajectory file");
  }
  check_header(split_fields(lines[0].second),
               {"year", "y", "z", "v", "w", "catch_y", "catch_z", "in_kernel",
                "constraints_ok"},
               source_name, lines[0].first);
  Trajectory traj;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& [no, line] = lines[k];
    const auto f = split_fields(line);
    if (f.size() != 9) {
      throw io_error(source_name + ":" + std::to_string(no) +
                     ": expected 9 fields, got " + std::to_string(f.size()));
    }
    TrajectoryStep row;
    row.year = parse_int(f[0], source_name, no);
    row.state = BiomassState{parse_double(f[1], source_name, no),
                             parse_double(f[2], source_name, no)};
    row.efforts = EffortVector{parse_double(f[3], source_name, no),
                               parse_double(f[4], source_name, no)};
    row.catches = {parse_double(f[5], source_name, no),
                   parse_double(f[6], source_name, no)};
    row.in_kernel = parse_int(f[7], source_name, no) != 0;
    row.constraints_ok = parse_int(f[8], source_name, no) != 0;
    traj.steps.push_back(std::move(row));
  }
  return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "year,y,z,v,w,catch_y,catch_z,in_kernel,constraints_ok\n";
  for (const auto& row : trajectory.steps) {
    out << row.year << ',' << csv_double(row.state[0]) << ','
        << csv_double(row.state[1]) << ',' << csv_double(row.efforts[0])
        << ',' << csv_double(row.efforts[1]) << ','
        << csv_double(row.catches[0]) << ',' << csv_double(row.catches[1])
        << ',' << (row.in_kernel ? 1 : 0) << ','
        << (row.constraints_ok ? 1 : 0) << '\n';
  }
}

}  // namespace evy
