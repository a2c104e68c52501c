#pragma once

// CSV form of a TrajectoryLog: `#` comment lines, then the fixed header
//   t,j,q1,q2,e1,e2,wx,wy,wz,taux,tauy,tauz,V,U1,U2,mu1,mu2
// and one row per record with 17 significant digits, so a write/read round
// trip reproduces every double exactly.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "synergy/simulator.hpp"

namespace synergy {

inline constexpr std::string_view kCsvHeader = "t,j,q1,q2,e1,e2,wx,wy,wz,taux,tauy,tauz,V,U1,U2,mu1,mu2";

void write_csv(std::ostream& out, const TrajectoryLog& log,
               const std::vector<std::string>& comments = {});
void write_csv_file(const std::string& path, const TrajectoryLog& log,
                    const std::vector<std::string>& comments = {});

// Throws ParseError on a missing or different header, a wrong column count or
// records out of (t, j) order. `comments` receives the comment lines without
// their leading "# ".
TrajectoryLog read_csv(std::istream& in, std::vector<std::string>* comments = nullptr);

}  // namespace synergy
