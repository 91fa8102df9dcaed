#pragma once

#include <cstddef>
#include <functional>

namespace rw {

// Runs `fn` to completion on a thread with a `bytes`-sized stack and rethrows
// whatever it throws. Normalizing deep unary numerals recurses once per
// constructor, well past the default 8 MiB.
void with_large_stack(const std::function<void()>& fn, std::size_t bytes = std::size_t{1} << 30);

}  // namespace rw
