#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rsl {

// Closed literal sets used by element attributes. Enumerator order matches
// the literal order in VocabularyTraits<E>::literals.

enum class ActorKind : std::uint8_t { User, ExternalSystem, Timer, Other };
enum class EntityKind : std::uint8_t { Master, Transaction, Reference, Parameter, Other };
enum class Datatype : std::uint8_t { Integer, Decimal, Boolean, Date, DateTime, Text };
enum class Constraint : std::uint8_t { PrimaryKey, NotNull, Unique };
enum class UseCaseKind : std::uint8_t { EntityCreate, EntityBrowse, EntityManage, Report, Interaction, Other };
enum class ScenarioKind : std::uint8_t { Main, Alternative, Exception };
enum class Performer : std::uint8_t { Actor, System };
enum class Priority : std::uint8_t { Must, Should, Could, Wont, Unset };
enum class QRKind : std::uint8_t { Usability, Security, Performance, Reliability, Maintainability, Other };
enum class PartOfSpeech : std::uint8_t { Noun, Verb, Adjective };

template <class E>
struct VocabularyTraits;

#define RSL_VOCABULARY(E, NAME, ...)                                   \
  template <>                                                         \
  struct VocabularyTraits<E> {                                        \
    static constexpr std::string_view name = NAME;                    \
    static constexpr auto literals = std::to_array<std::string_view>({__VA_ARGS__}); \
  };

RSL_VOCABULARY(ActorKind, "ActorKind", "User", "ExternalSystem", "Timer", "Other")
RSL_VOCABULARY(EntityKind, "EntityKind", "Master", "Transaction", "Reference", "Parameter", "Other")
RSL_VOCABULARY(Datatype, "Datatype", "Integer", "Decimal", "Boolean", "Date", "DateTime", "Text")
RSL_VOCABULARY(Constraint, "Constraint", "PrimaryKey", "NotNull", "Unique")
RSL_VOCABULARY(UseCaseKind, "UseCaseKind", "EntityCreate", "EntityBrowse", "EntityManage", "Report", "Interaction",
               "Other")
RSL_VOCABULARY(ScenarioKind, "ScenarioKind", "Main", "Alternative", "Exception")
RSL_VOCABULARY(Performer, "Performer", "Actor", "System")
RSL_VOCABULARY(Priority, "Priority", "Must", "Should", "Could", "Wont", "Unset")
RSL_VOCABULARY(QRKind, "QRKind", "Usability", "Security", "Performance", "Reliability", "Maintainability", "Other")
RSL_VOCABULARY(PartOfSpeech, "PartOfSpeech", "Noun", "Verb", "Adjective")

#undef RSL_VOCABULARY

template <class E>
constexpr std::string_view literal(E value) noexcept {
  return VocabularyTraits<E>::literals[static_cast<std::size_t>(value)];
}

template <class E>
constexpr std::optional<E> parse_literal(std::string_view text) noexcept {
  const auto& lits = VocabularyTraits<E>::literals;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (lits[i] == text) return static_cast<E>(i);
  }
  return std::nullopt;
}

template <class E>
constexpr std::span<const std::string_view> literals() noexcept {
  return VocabularyTraits<E>::literals;
}

template <class E>
constexpr std::size_t vocabulary_size() noexcept {
  return VocabularyTraits<E>::literals.size();
}

/// "{A, B, C}", as listed in vocabulary diagnostics.
template <class E>
std::string allowed_set() {
  std::string out = "{";
  bool first = true;
  for (auto lit : VocabularyTraits<E>::literals) {
    if (!first) out += ", ";
    out += lit;
    first = false;
  }
  out += "}";
  return out;
}

/// Subset of {PrimaryKey, NotNull, Unique}.
class ConstraintSet {
 public:
  constexpr ConstraintSet() = default;
  constexpr ConstraintSet(std::initializer_list<Constraint> cs) {
    for (auto c : cs) insert(c);
  }

  constexpr bool contains(Constraint c) const noexcept { return (bits_ & mask(c)) != 0; }
  constexpr void insert(Constraint c) noexcept { bits_ |= mask(c); }
  constexpr void erase(Constraint c) noexcept { bits_ &= static_cast<std::uint8_t>(~mask(c)); }
  constexpr bool empty() const noexcept { return bits_ == 0; }

  /// Members in vocabulary order.
  std::vector<Constraint> members() const {
    std::vector<Constraint> out;
    for (std::size_t i = 0; i < vocabulary_size<Constraint>(); ++i) {
      if (contains(static_cast<Constraint>(i))) out.push_back(static_cast<Constraint>(i));
    }
    return out;
  }

  friend constexpr bool operator==(ConstraintSet, ConstraintSet) = default;

 private:
  static constexpr std::uint8_t mask(Constraint c) noexcept {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(c));
  }
  std::uint8_t bits_ = 0;
};

}  // namespace rsl
