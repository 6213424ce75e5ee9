#pragma once

#include <gtest/gtest.h>

#include "asian/error.hpp"

#define EXPECT_PRICING_ERROR(statement, expected_code)                                   \
  do {                                                                                   \
    try {                                                                                \
      statement;                                                                         \
      ADD_FAILURE() << "expected " << asian::error_name(expected_code) << ", no throw";  \
    } catch (const asian::PricingError& e) {                                             \
      EXPECT_EQ(e.code(), expected_code) << "got " << e.name() << ": " << e.what();      \
    }                                                                                    \
  } while (0)
