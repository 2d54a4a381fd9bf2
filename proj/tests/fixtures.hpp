#pragma once

#include <string>
#include <vector>

#include "netobs/structural.hpp"
#include "netobs/system_io.hpp"

namespace fixtures {

inline std::string data_path(const std::string& file) {
  return std::string(NETOBS_DATA_DIR) + "/" + file;
}

inline netobs::SparsityPattern pattern(const std::vector<std::vector<int>>& rows) {
  netobs::SparsityPattern p(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      if (rows[r][c]) p.insert(r, c);
  return p;
}

inline netobs::DenseMatrix dense(const std::vector<std::vector<double>>& rows) {
  netobs::DenseMatrix m(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(rows.empty() ? 0 : rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

inline const std::vector<std::vector<int>> kFig1A = {{0, 1, 0, 0, 0},
                                                     {1, 0, 1, 1, 1},
                                                     {0, 1, 0, 0, 0},
                                                     {0, 1, 0, 0, 0},
                                                     {0, 1, 0, 0, 0}};
inline const std::vector<std::vector<int>> kFig1C = {
    {1, 0, 0, 0, 0}, {1, 0, 0, 0, 0}, {0, 0, 1, 1, 0}, {0, 0, 0, 1, 0}};
inline const std::vector<std::vector<int>> kFig1W = {
    {1, 0, 1, 0}, {1, 1, 0, 0}, {0, 1, 1, 1}, {1, 0, 1, 1}};
inline const std::vector<std::vector<int>> kFig1WStar = {
    {1, 0, 1, 1}, {1, 1, 0, 1}, {0, 1, 1, 1}, {1, 0, 1, 1}};
/// Numeric W(G*) of the worked example.
inline const std::vector<std::vector<double>> kFig1WStarValues = {
    {0.9597, 0, 0.3404, 0.5853},
    {0.2238, 0.7513, 0, 0.2551},
    {0, 0.5060, 0.6991, 0.8909},
    {0.9593, 0, 0.5472, 0.1386}};

inline netobs::SystemSpec fig1(const std::vector<std::vector<int>>& w = kFig1W) {
  netobs::SystemSpec s;
  s.a_pattern = pattern(kFig1A);
  s.c_pattern = pattern(kFig1C);
  s.comm = netobs::comm_from_pattern(pattern(w));
  return s;
}

/// The plant of the worked example measured only by the listed sensors
/// (0-based), with a complete communication graph among them.
inline netobs::SystemSpec fig1_sensors(const std::vector<std::size_t>& keep) {
  netobs::SystemSpec s;
  s.a_pattern = pattern(kFig1A);
  s.c_pattern = netobs::SparsityPattern(keep.size(), 5);
  for (std::size_t k = 0; k < keep.size(); ++k)
    for (std::size_t c = 0; c < 5; ++c)
      if (kFig1C[keep[k]][c]) s.c_pattern.insert(k, c);
  netobs::SparsityPattern w(keep.size(), keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j) w.insert(i, j);
  s.comm = netobs::comm_from_pattern(w);
  return s;
}

}  // namespace fixtures
