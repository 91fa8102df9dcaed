#pragma once

#include <optional>
#include <string_view>

#include "rw/syntax.hpp"
#include "rw/term.hpp"

namespace rw {

// s (s ... 0) with n occurrences of s.
Term unary(unsigned n);
// Inverse of unary; empty when t is not a numeral.
std::optional<unsigned> from_unary(const Term& t);

// Unary addition and Fibonacci; one directive computing fib k.
SourceFile fib_corpus(unsigned k);
// Rules g c_i a --> tt (0 <= i < K) and g $x $y --> ff; one directive
// normalizing m scrutinees held in a balanced tree of `pair` nodes.
SourceFile dispatch_corpus(unsigned k, unsigned m);
// List append/reverse over unary naturals; one directive computing rev (gen k).
SourceFile revnat_corpus(unsigned k);

// Recognizes "fib(k)", "dispatch(K,M)" and "revnat(k)". Empty for any other
// text; std::invalid_argument for a recognized name with bad parameters.
std::optional<SourceFile> builtin_corpus(std::string_view spec);

}  // namespace rw
