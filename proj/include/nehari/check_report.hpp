#pragma once

// Per-condition verdicts of a hypothesis audit.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nehari/errors.hpp"

namespace nehari {

enum class CheckStatus { pass, fail, sampled_pass, assumed, not_evaluated };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::sampled_pass: return "sampled-pass";
    case CheckStatus::assumed: return "assumed";
    case CheckStatus::not_evaluated: return "not-evaluated";
  }
  return "?";
}

struct CheckEntry {
  std::string id;
  CheckStatus status = CheckStatus::not_evaluated;
  std::optional<std::string> witness;  // first violating sample; set on every fail
  std::string notes;
  std::string sampling;
};

class CheckReport {
 public:
  /// Ids are unique; adding an existing id is a contract violation.
  void add(CheckEntry e) {
    if (find(e.id)) throw ContractError("duplicate check id " + e.id);
    if (e.status == CheckStatus::fail && !e.witness) e.witness = "(none recorded)";
    entries_.push_back(std::move(e));
  }

  void add(std::string id, CheckStatus status, std::string notes = {}, std::optional<std::string> witness = {},
           std::string sampling = {}) {
    add(CheckEntry{std::move(id), status, std::move(witness), std::move(notes), std::move(sampling)});
  }

  void merge(const CheckReport& other) {
    for (const auto& e : other.entries_) add(e);
  }

  const std::vector<CheckEntry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  const CheckEntry* find(const std::string& id) const {
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const CheckEntry& e) { return e.id == id; });
    return it == entries_.end() ? nullptr : &*it;
  }

  std::optional<CheckStatus> status(const std::string& id) const {
    if (const auto* e = find(id)) return e->status;
    return std::nullopt;
  }

  bool any_fail() const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [](const CheckEntry& e) { return e.status == CheckStatus::fail; });
  }

  std::vector<std::string> failed_ids() const {
    std::vector<std::string> ids;
    for (const auto& e : entries_) {
      if (e.status == CheckStatus::fail) ids.push_back(e.id);
    }
    return ids;
  }

  nlohmann::ordered_json to_json() const {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : entries_) {
      nlohmann::ordered_json j;
      j["id"] = e.id;
      j["status"] = to_string(e.status);
      j["witness"] = e.witness ? nlohmann::ordered_json(*e.witness) : nlohmann::ordered_json(nullptr);
      j["notes"] = e.notes;
      if (!e.sampling.empty()) j["sampling"] = e.sampling;
      arr.push_back(std::move(j));
    }
    return arr;
  }

 private:
  std::vector<CheckEntry> entries_;
};

}  // namespace nehari
