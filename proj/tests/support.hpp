#pragma once

#include <string>

#include <doctest.h>

#include "crowdrate/error.hpp"

// Asserts that `expr` throws crowdrate::Error with the given category.
#define CHECK_ERROR_CATEGORY(expr, cat)                                        \
  do {                                                                         \
    bool thrown_ = false;                                                      \
    try {                                                                      \
      (void)(expr);                                                            \
    } catch (const crowdrate::Error& e_) {                                     \
      thrown_ = true;                                                          \
      CHECK_MESSAGE(e_.category() == std::string(cat), "got " << e_.category()); \
    }                                                                          \
    CHECK_MESSAGE(thrown_, "expected error category " << (cat));              \
  } while (0)
