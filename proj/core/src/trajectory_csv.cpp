#include "synergy/trajectory_csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "synergy/error.hpp"

namespace synergy {

namespace {

constexpr std::size_t kColumns = 17;

void put(std::string& line, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  if (!line.empty()) line += ',';
  line += buf;
}

void put(std::string& line, int x) {
  if (!line.empty()) line += ',';
  line += std::to_string(x);
}

double get_real(std::string_view s, std::size_t row) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError("csv row " + std::to_string(row) + ": bad number `" + std::string(s) + "`");
  }
  return v;
}

int get_int(std::string_view s, std::size_t row) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError("csv row " + std::to_string(row) + ": bad integer `" + std::string(s) + "`");
  }
  return v;
}

}  // namespace

void write_csv(std::ostream& out, const TrajectoryLog& log, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << kCsvHeader << '\n';
  std::string line;
  for (const auto& r : log.records) {
    line.clear();
    put(line, r.t);
    put(line, r.j);
    put(line, r.q1);
    put(line, r.q2);
    put(line, r.e1);
    put(line, r.e2);
    put(line, r.omega.x);
    put(line, r.omega.y);
    put(line, r.omega.z);
    put(line, r.tau.x);
    put(line, r.tau.y);
    put(line, r.tau.z);
    put(line, r.v);
    put(line, r.u1);
    put(line, r.u2);
    put(line, r.mu1);
    put(line, r.mu2);
    out << line << '\n';
  }
}

void write_csv_file(const std::string& path, const TrajectoryLog& log, const std::vector<std::string>& comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  write_csv(out, log, comments);
  if (!out) throw ParseError("write to " + path + " failed");
}

TrajectoryLog read_csv(std::istream& in, std::vector<std::string>* comments) {
  TrajectoryLog log;
  std::string line;
  bool header = false;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header) {
      if (!line.empty() && line.front() == '#') {
        if (comments) comments->push_back(line.size() > 2 ? line.substr(2) : std::string());
        continue;
      }
      if (line != kCsvHeader) throw ParseError("csv: unexpected header `" + line + "`");
      header = true;
      continue;
    }
    if (line.empty()) continue;
    ++row;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (;;) {
      const auto pos = rest.find(',');
      f.push_back(rest.substr(0, pos));
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
    if (f.size() != kColumns) {
      throw ParseError("csv row " + std::to_string(row) + ": expected " + std::to_string(kColumns) + " columns");
    }
    LogRecord r;
    r.t = get_real(f[0], row);
    r.j = get_int(f[1], row);
    r.q1 = get_int(f[2], row);
    r.q2 = get_int(f[3], row);
    r.e1 = get_real(f[4], row);
    r.e2 = get_real(f[5], row);
    r.omega = {get_real(f[6], row), get_real(f[7], row), get_real(f[8], row)};
    r.tau = {get_real(f[9], row), get_real(f[10], row), get_real(f[11], row)};
    r.v = get_real(f[12], row);
    r.u1 = get_real(f[13], row);
    r.u2 = get_real(f[14], row);
    r.mu1 = get_real(f[15], row);
    r.mu2 = get_real(f[16], row);
    if (!log.records.empty()) {
      const auto& p = log.records.back();
      const bool ordered = r.t > p.t || (r.t == p.t && r.j > p.j);
      if (!ordered) throw ParseError("csv row " + std::to_string(row) + ": records out of (t, j) order");
      if (r.t > p.t) ++log.steps;
    }
    log.records.push_back(r);
  }
  if (!header) throw ParseError("csv: missing header");
  if (!log.records.empty()) log.jumps = log.records.back().j;
  return log;
}

}  // namespace synergy
