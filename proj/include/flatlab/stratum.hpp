#pragma once

#include <algorithm>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "flatlab/vector.hpp"

namespace flatlab {

/// Labeled zero orders (m_1, ..., m_l) of a stratum H_g(m_1, ..., m_l).
/// Order-0 points are never listed.
struct StratumSignature {
  std::vector<int> orders;

  int total_order() const { return std::accumulate(orders.begin(), orders.end(), 0); }
  int genus() const { return (total_order() + 2) / 2; }
  std::size_t zero_count() const { return orders.size(); }

  /// Sorted descending; two surfaces lie in the same stratum iff their
  /// canonical forms agree.
  StratumSignature canonical() const {
    StratumSignature s{orders};
    std::sort(s.orders.begin(), s.orders.end(), std::greater<>());
    return s;
  }
  bool same_stratum(const StratumSignature& o) const { return canonical().orders == o.canonical().orders; }

  bool is_principal() const {
    return std::all_of(orders.begin(), orders.end(), [](int m) { return m == 1; });
  }

  std::string to_string() const {
    std::ostringstream os;
    os << "H(";
    for (std::size_t i = 0; i < orders.size(); ++i) os << (i ? "," : "") << orders[i];
    os << ")";
    return os.str();
  }

  bool operator==(const StratumSignature&) const = default;
};

/// Parses "1,1,1,1" (the CLI stratum syntax).
inline StratumSignature parse_stratum(const std::string& text) {
  StratumSignature s;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    int m = 0;
    try {
      m = std::stoi(item, &pos);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "bad stratum entry '" + item + "'");
    }
    if (pos != item.size() || m < 1) throw Error(ErrorKind::InvalidArgument, "bad stratum entry '" + item + "'");
    s.orders.push_back(m);
  }
  if (s.orders.empty() || s.total_order() % 2 != 0)
    throw Error(ErrorKind::InvalidArgument, "stratum orders must be positive and sum to an even number");
  return s;
}

}  // namespace flatlab
