#include "haunted/messages.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

#include "catalog_en.inc"

namespace haunted {

namespace {

std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::optional<Command> token_command(std::string_view token, CommandForm form) {
  try {
    if (form == CommandForm::Directions) return Command(parse_direction(token));
    return Command(parse_room(token));
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

}  // namespace

std::string to_string(InstructionVariant v) {
  switch (v) {
    case InstructionVariant::Original: return "original";
    case InstructionVariant::Ghost: return "ghost";
    case InstructionVariant::Coordinates: return "coordinates";
  }
  throw std::logic_error("bad variant");
}

InstructionVariant parse_variant(std::string_view text) {
  const std::string t = lower(text);
  if (t == "original") return InstructionVariant::Original;
  if (t == "ghost") return InstructionVariant::Ghost;
  if (t == "coordinates") return InstructionVariant::Coordinates;
  throw std::invalid_argument("unknown instruction variant: " + std::string(text));
}

CommandForm command_form(InstructionVariant v) {
  return v == InstructionVariant::Coordinates ? CommandForm::Coordinates : CommandForm::Directions;
}

MessageCatalog MessageCatalog::parse(std::string_view text, std::string locale) {
  MessageCatalog cat;
  cat.locale_ = std::move(locale);
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view l = trim(line);
    if (l.empty() || l.front() == '#') continue;
    auto eq = l.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("catalog line " + std::to_string(lineno) + ": missing '='");
    }
    std::string key(trim(l.substr(0, eq)));
    std::string value(trim(l.substr(eq + 1)));
    if (key.empty()) {
      throw std::invalid_argument("catalog line " + std::to_string(lineno) + ": empty key");
    }
    cat.entries_[std::move(key)] = std::move(value);
  }
  return cat;
}

MessageCatalog MessageCatalog::load(const std::filesystem::path& path, std::string locale) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open catalog " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), std::move(locale));
}

const MessageCatalog& MessageCatalog::english() {
  static const MessageCatalog en = parse(kEnglishCatalog, "en");
  return en;
}

bool MessageCatalog::contains(std::string_view key) const { return entries_.find(key) != entries_.end(); }

const std::string& MessageCatalog::get(std::string_view key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw MissingEntry("catalog '" + locale_ + "' has no entry '" + std::string(key) + "'");
  }
  return it->second;
}

CatalogSet CatalogSet::with_defaults() {
  CatalogSet set;
  set.add(MessageCatalog::english());
  return set;
}

void CatalogSet::add(MessageCatalog catalog) {
  std::string key = catalog.locale();
  catalogs_.insert_or_assign(std::move(key), std::move(catalog));
}

void CatalogSet::load_directory(const std::filesystem::path& dir) {
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".catalog") {
      add(MessageCatalog::load(entry.path(), entry.path().stem().string()));
    }
  }
}

const MessageCatalog& CatalogSet::at(std::string_view locale) const {
  auto it = catalogs_.find(locale);
  if (it == catalogs_.end()) throw MissingEntry("unknown locale: " + std::string(locale));
  return it->second;
}

bool CatalogSet::contains(std::string_view locale) const { return catalogs_.find(locale) != catalogs_.end(); }

const std::string& clue_text(ClueId id, const MessageCatalog& catalog) {
  return catalog.get(to_string(id));
}

std::string render_feedback(std::span<const ClueId> clues, const MessageCatalog& catalog) {
  std::string out;
  for (ClueId id : clues) {
    if (!out.empty()) out += ' ';
    const std::string& text = clue_text(id, catalog);
    out += text;
    if (text.empty() || (text.back() != '.' && text.back() != '!' && text.back() != '?')) out += '.';
  }
  return out;
}

std::string render_feedback(const Feedback& feedback, const MessageCatalog& catalog) {
  return render_feedback(std::span<const ClueId>(feedback.clues), catalog);
}

std::string instructions(InstructionVariant variant, const MessageCatalog& catalog) {
  const bool coords = variant == InstructionVariant::Coordinates;
  const bool stationary = variant != InstructionVariant::Original;
  auto pick = [&](std::string_view key) -> const std::string& {
    return catalog.get(coords ? std::string(key) + ".coordinates" : std::string(key));
  };

  std::vector<std::string> info = {pick("info.grid"), pick("info.start"), catalog.get("info.door"),
                                   catalog.get("info.ghost")};
  if (stationary) info.push_back(catalog.get("info.stationary"));

  auto section = [](std::ostringstream& out, const std::string& header,
                    const std::vector<std::string>& bullets) {
    out << header << '\n';
    for (const auto& b : bullets) out << "- " << b << '\n';
  };

  std::ostringstream out;
  out << catalog.get("intro.title") << "\n\n" << catalog.get("intro.body") << "\n\n";
  section(out, catalog.get("info.header"), info);
  out << '\n';
  section(out, catalog.get("movement.header"),
          {catalog.get("movement.step"), catalog.get("movement.diagonal"), pick("movement.how")});
  out << '\n';
  section(out, catalog.get("clues.header"),
          {catalog.get("clues.enter"), catalog.get("clues.key"), catalog.get("clues.ghost"),
           catalog.get("clues.other")});
  out << '\n' << pick("outro");
  return out.str();
}

std::string opening_prompt(InstructionVariant variant, const MessageCatalog& catalog) {
  return catalog.get("prompt.opening") + "\n\n" + instructions(variant, catalog);
}

const std::string& reprompt_text(InstructionVariant variant, const MessageCatalog& catalog) {
  return catalog.get(variant == InstructionVariant::Coordinates ? "prompt.reprompt.coordinates"
                                                                : "prompt.reprompt");
}

std::optional<Command> parse_command(std::string_view reply, InstructionVariant variant,
                                     ParseMode mode) {
  const CommandForm form = command_form(variant);
  if (mode == ParseMode::Strict) return token_command(trim(reply), form);

  std::optional<Command> last;
  std::size_t i = 0;
  while (i < reply.size()) {
    if (!is_word_char(reply[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < reply.size() && is_word_char(reply[j])) ++j;
    if (auto c = token_command(reply.substr(i, j - i), form)) last = c;
    i = j;
  }
  return last;
}

}  // namespace haunted
