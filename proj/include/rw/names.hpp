#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace rw {

// Interned string. Two Names compare equal iff their text is equal, and
// equality is a pointer comparison.
class Name {
public:
  Name();
  explicit Name(std::string_view text);

  const std::string& str() const { return *text_; }
  bool empty() const { return text_->empty(); }

  bool operator==(const Name& o) const { return text_ == o.text_; }
  // Ordered by text so that maps keyed by Name iterate deterministically.
  std::strong_ordering operator<=>(const Name& o) const {
    if (text_ == o.text_) return std::strong_ordering::equal;
    return *text_ <=> *o.text_;
  }

  std::size_t hash() const { return std::hash<const void*>{}(text_); }

private:
  const std::string* text_;
};

inline std::ostream& operator<<(std::ostream& os, const Name& n) { return os << n.str(); }

// A function symbol. Symbols are identified by their name.
class Symbol {
public:
  Symbol() = default;
  explicit Symbol(Name name) : name_(name) {}
  explicit Symbol(std::string_view text) : name_(text) {}

  const Name& name() const { return name_; }
  const std::string& str() const { return name_.str(); }

  bool operator==(const Symbol&) const = default;
  std::strong_ordering operator<=>(const Symbol& o) const { return name_ <=> o.name_; }

private:
  Name name_;
};

inline std::ostream& operator<<(std::ostream& os, const Symbol& s) { return os << s.str(); }

// Globally unique variable identity.
struct VarId {
  std::uint64_t value = 0;
  bool operator==(const VarId&) const = default;
  auto operator<=>(const VarId&) const = default;
};

// A term variable: identity plus a display name used only for printing.
struct Var {
  VarId id;
  Name name;
  bool operator==(const Var& o) const { return id == o.id; }
};

// Draws a fresh identity from the process-wide supply. Thread-safe.
VarId fresh_id();
Var fresh_var(Name hint);
inline Var fresh_var(std::string_view hint) { return fresh_var(Name(hint)); }

}  // namespace rw

template <>
struct std::hash<rw::Name> {
  std::size_t operator()(const rw::Name& n) const noexcept { return n.hash(); }
};
template <>
struct std::hash<rw::Symbol> {
  std::size_t operator()(const rw::Symbol& s) const noexcept { return s.name().hash(); }
};
template <>
struct std::hash<rw::VarId> {
  std::size_t operator()(const rw::VarId& v) const noexcept { return std::hash<std::uint64_t>{}(v.value); }
};
