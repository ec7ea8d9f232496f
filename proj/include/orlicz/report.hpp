#ifndef ORLICZ_REPORT_HPP
#define ORLICZ_REPORT_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace orlicz {

enum class Verdict { Holds, Fails, Inconclusive };

inline std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

/// A counterexample to an inequality written as lhs <= rhs; a witness is
/// recorded only when lhs exceeds rhs by more than the checker's tolerance.
/// `x` holds the sample point, or the concatenated vectors (xi, eta) for the
/// vector monotonicity checks. What s and t mean depends on the property; see
/// docs/report_schema.md.
struct Witness {
  std::vector<double> x;
  double s = 0.0;
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;

  double excess() const { return lhs - rhs; }
};

/// Outcome of one sampled structural check. "holds" is evidence gathered on
/// the sample set; "fails" comes with witnesses that re-evaluate as violations.
struct PropertyReport {
  std::string property;
  Verdict verdict = Verdict::Inconclusive;
  std::map<std::string, double> constants;
  std::vector<Witness> witnesses;
  std::size_t samples = 0;

  bool holds() const { return verdict == Verdict::Holds; }
  bool fails() const { return verdict == Verdict::Fails; }
};

/// Keeps the `capacity` largest violations, ordered by excess (largest first)
/// and then by arrival, so the kept set does not depend on scan partitioning.
class WitnessSet {
 public:
  explicit WitnessSet(std::size_t capacity = 8) : capacity_(capacity) {}

  void offer(Witness w) {
    ++count_;
    auto pos = std::upper_bound(kept_.begin(), kept_.end(), w,
                                [](const Witness& a, const Witness& b) { return a.excess() > b.excess(); });
    if (static_cast<std::size_t>(pos - kept_.begin()) >= capacity_) return;
    kept_.insert(pos, std::move(w));
    if (kept_.size() > capacity_) kept_.pop_back();
  }

  std::size_t count() const { return count_; }
  bool empty() const { return count_ == 0; }
  std::vector<Witness> take() && { return std::move(kept_); }

 private:
  std::size_t capacity_;
  std::size_t count_ = 0;
  std::vector<Witness> kept_;
};

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const Witness& w) {
  ordered_json j;
  j["x"] = w.x;
  j["s"] = w.s;
  j["t"] = w.t;
  j["lhs"] = w.lhs;
  j["rhs"] = w.rhs;
  return j;
}

inline ordered_json to_json(const PropertyReport& r) {
  ordered_json j;
  j["property"] = r.property;
  j["verdict"] = std::string(verdict_name(r.verdict));
  ordered_json constants = ordered_json::object();
  for (const auto& [k, v] : r.constants) constants[k] = v;
  j["constants"] = std::move(constants);
  ordered_json witnesses = ordered_json::array();
  for (const auto& w : r.witnesses) witnesses.push_back(to_json(w));
  j["witnesses"] = std::move(witnesses);
  j["samples"] = r.samples;
  return j;
}

}  // namespace orlicz

#endif  // ORLICZ_REPORT_HPP
