#pragma once

#include <stdexcept>
#include <string>

namespace klqds {

/// Malformed input: unknown symbols or states, unparsable files,
/// disconnected edge sequences.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was called outside of its domain, e.g. a (k,l) query on an
/// automaton with several initial states, or l > k.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace klqds
