// SPDX-License-Identifier: Apache-2.0
//
// One PASS/FAIL line per acceptance criterion; nonzero exit if any fails.

#include <iostream>

#include "mrlrc/selftest.hpp"

int main() { return mrlrc::run_acceptance(std::cout) ? 0 : 1; }
