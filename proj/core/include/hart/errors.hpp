#pragma once

#include <stdexcept>
#include <string>

namespace hart {

/// Precondition or mathematical-domain violation (bad parameters, oracle
/// requested outside its validity region, root not bracketed).
class domain_error : public std::runtime_error {
public:
  explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure inside the estimation pipeline (all effective kernel
/// weights zero, degenerate refinement).
class estimation_error : public std::runtime_error {
public:
  explicit estimation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid run configuration (unknown keys, procedure/scenario mismatches).
class config_error : public std::runtime_error {
public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hart
