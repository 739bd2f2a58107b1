#pragma once

#include "jitminer/vcs.hpp"

#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace jitminer {

struct BugTicket {
  std::string ticket_id;
  Timestamp created_at = 0;
  std::optional<Timestamp> closed_at;
  std::string status;
  std::string ticket_type;
  std::string summary;

  [[nodiscard]] bool is_closed() const;
  [[nodiscard]] bool is_defect() const;

  friend bool operator==(const BugTicket &, const BugTicket &) = default;
};

enum class TicketFormat { csv, json };

TicketFormat parse_ticket_format(std::string_view name);

struct TicketImport {
  std::vector<BugTicket> tickets;
  std::vector<std::string> warnings; // one per rejected or repaired record
};

// Trac-style export: columns/fields id, time, changetime, status, type,
// summary. Unknown columns are ignored. Records without an id or a readable
// creation time are skipped with a warning. Throws Error(MalformedExport)
// when the header (or JSON document) cannot be used at all.
TicketImport parse_ticket_export(std::string_view text, TicketFormat format);
TicketImport load_ticket_export(const std::filesystem::path &path, TicketFormat format);

// Epoch seconds, or ISO-8601 ("2020-01-02", "2020-01-02T03:04:05Z",
// "2020-01-02 03:04:05.5+02:00"); a missing zone means UTC.
std::optional<Timestamp> parse_timestamp(std::string_view text);

enum class LinkMethod { ticket_id_match, keyword };

std::string_view to_string(LinkMethod method);

struct FixLink {
  std::string commit_hash;
  std::optional<std::string> ticket_id;
  LinkMethod method = LinkMethod::keyword;
  std::string matched_text;

  friend bool operator==(const FixLink &, const FixLink &) = default;
};

struct LinkConfig {
  // Each pattern has exactly one capture group holding the ticket id.
  std::vector<std::string> id_patterns{R"(#(\d+))", R"(ticket:(\d+))", R"(ticket (\d+))"};
  std::vector<std::string> fix_keywords{"fix", "fixed", "fixes", "bug"};
  bool require_defect_type = false;
  bool word_boundary_match = true;
  bool case_insensitive = true;
  bool keyword_fallback = true; // false: id-only linking

  void validate() const;
};

struct IdMention {
  std::string ticket_id;
  std::string matched_text;
};

// Compiled form of a LinkConfig.
class FixMatcher {
public:
  explicit FixMatcher(const LinkConfig &config);

  // Distinct ticket ids mentioned in the message, in order of first appearance.
  [[nodiscard]] std::vector<IdMention> ticket_mentions(std::string_view message) const;
  // First fix keyword found, as it appears in the message.
  [[nodiscard]] std::optional<std::string> keyword(std::string_view message) const;
  [[nodiscard]] bool is_fix(std::string_view message) const;

private:
  std::vector<std::regex> id_patterns_;
  std::optional<std::regex> keywords_;
  std::vector<std::string> plain_keywords_;
  bool case_insensitive_;
};

bool is_fix_message(std::string_view message, const LinkConfig &config);

// Fix-commit linking. Ticket-id matches against closed (and, if required,
// defect-typed) tickets come first; a commit with no such match falls back to
// a keyword link when enabled. Output is ordered by commit, then by the
// tickets' order in the export.
std::vector<FixLink> link_fixes(const std::vector<CommitRecord> &commits,
                                const std::vector<BugTicket> &tickets, const LinkConfig &config);

} // namespace jitminer
