#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace codd {

/// Input that breaks a documented precondition or invariant.
class invalid_input : public std::invalid_argument
{
public:
	using std::invalid_argument::invalid_argument;
};

/// Malformed text or document; `line()` is 1-based, 0 when not line-oriented.
class parse_error : public std::runtime_error
{
public:
	parse_error(std::size_t line, const std::string& what)
	: std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
	  line_(line)
	{
	}

	std::size_t line() const noexcept { return line_; }

private:
	std::size_t line_;
};

/// A Shapley computation needed a subset value that is not cached.
class incomplete_cache : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

/// A characteristic value came from a budget-limited solve.
class approximate_value : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

} // namespace codd
