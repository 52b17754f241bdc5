#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kahler/poly.hpp"

namespace kahler {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

struct RunConfig {
  std::vector<std::string> identities;  // empty: all
  std::vector<int> m_values{1, 2, 3};
  std::vector<Rational> c_values{1, -1};
  std::vector<Rational> p_values{2, 3, 4};
  std::uint64_t seed = 1;
  int jets = 200;  // random jets per (m, c)
  int modes = 4;   // torus truncation N
  double tol_sym = 1e-12;
  double tol_num = 1e-8;
  std::string format = "table";
  std::size_t basis_cap = 10000;

  // One message per offending field; empty when valid.
  std::vector<std::string> validate() const;
  nlohmann::json to_json() const;
};

enum class Status { pass, expected_mismatch, fail };
const char* status_name(Status s);

// A printed constant set against the derived one.
struct ComparisonRow {
  std::string identity;
  std::string quantity;
  std::string printed;
  std::string derived;
  bool match = false;
  std::optional<bool> oracle_agreement;  // float random-jet confirmation
  std::string allowlist;                 // entry covering an expected mismatch
};

struct Check {
  std::string name;
  bool ok = false;
  nlohmann::json value;
};

struct IdentityResult {
  std::string name;
  std::string description;
  Status status = Status::fail;
  std::vector<Check> checks;
  std::vector<ComparisonRow> rows;
  std::string witness;  // set whenever status is fail
  nlohmann::json details = nlohmann::json::object();
  double seconds = 0;
};

struct CatalogEntry {
  std::string name;
  std::string description;
  std::string anchor;
};

const std::vector<CatalogEntry>& list_identities();

struct AllowlistEntry {
  std::string id;
  std::string quote;
  std::string finding;
};

const std::vector<AllowlistEntry>& mismatch_allowlist();

struct VerificationReport {
  RunConfig config;
  std::vector<IdentityResult> results;
  double seconds = 0;

  int exit_code() const;  // 0 when nothing failed unexpectedly, else 1
  nlohmann::json to_json(bool timing = true) const;
  std::string table() const;
};

// Throws Error on an unknown identity name.
VerificationReport run_suite(const RunConfig& cfg);
IdentityResult run_identity(const std::string& name, const RunConfig& cfg);

}  // namespace kahler
