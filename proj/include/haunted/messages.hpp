#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "haunted/clue.hpp"
#include "haunted/engine.hpp"

namespace haunted {

class MissingEntry : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

enum class InstructionVariant { Original, Ghost, Coordinates };

std::string to_string(InstructionVariant v);
/// "original" | "ghost" | "coordinates" (case-insensitive); throws std::invalid_argument.
InstructionVariant parse_variant(std::string_view text);
CommandForm command_form(InstructionVariant v);

/// Locale-specific strings: clue texts (keys C1..C12), instruction fragments
/// and dialogue prompts. Immutable once built.
class MessageCatalog {
 public:
  /// Parses `<key> = <string>` lines. Blank lines and '#' comments are skipped.
  static MessageCatalog parse(std::string_view text, std::string locale);
  static MessageCatalog load(const std::filesystem::path& path, std::string locale);

  /// The built-in English catalog.
  static const MessageCatalog& english();

  const std::string& locale() const { return locale_; }
  bool contains(std::string_view key) const;
  /// Throws MissingEntry.
  const std::string& get(std::string_view key) const;
  const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }

 private:
  std::string locale_;
  std::map<std::string, std::string, std::less<>> entries_;
};

/// Locale tag -> catalog. The default set holds only the built-in English one.
class CatalogSet {
 public:
  static CatalogSet with_defaults();

  void add(MessageCatalog catalog);
  /// Loads every `<locale>.catalog` file in `dir`.
  void load_directory(const std::filesystem::path& dir);
  /// Throws MissingEntry for unknown locales.
  const MessageCatalog& at(std::string_view locale) const;
  bool contains(std::string_view locale) const;

 private:
  std::map<std::string, MessageCatalog, std::less<>> catalogs_;
};

const std::string& clue_text(ClueId id, const MessageCatalog& catalog);

/// Clues as sentences joined by single spaces; a '.' is added to any clue
/// text lacking terminal punctuation.
std::string render_feedback(std::span<const ClueId> clues, const MessageCatalog& catalog);
std::string render_feedback(const Feedback& feedback, const MessageCatalog& catalog);

/// Full game instructions for a variant.
std::string instructions(InstructionVariant variant, const MessageCatalog& catalog);

/// The opening dialogue message: the task prompt followed by the instructions.
std::string opening_prompt(InstructionVariant variant, const MessageCatalog& catalog);

/// Clarification sent when a reply contains no recognizable move.
const std::string& reprompt_text(InstructionVariant variant, const MessageCatalog& catalog);

enum class ParseMode { LastToken, Strict };

/// Extracts a move from free text. LastToken takes the final standalone
/// direction word (or room label, for Coordinates); Strict requires the reply
/// to be exactly one such token.
std::optional<Command> parse_command(std::string_view reply, InstructionVariant variant,
                                     ParseMode mode = ParseMode::LastToken);

}  // namespace haunted
