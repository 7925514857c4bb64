#pragma once

#include <cstdio>
#include <string>

// Minimal check recorder: one line per check, nonzero exit on any failure.

inline int g_checks = 0;
inline int g_failures = 0;

inline void record(const std::string& name, bool pass, const std::string& details = "") {
    ++g_checks;
    if (!pass) ++g_failures;
    std::printf("[%s] %s%s%s\n", pass ? "pass" : "FAIL", name.c_str(),
                details.empty() ? "" : ": ", details.c_str());
    std::fflush(stdout);
}

inline int harness_exit(const char* suite) {
    std::printf("%s: %d/%d checks passed\n", suite, g_checks - g_failures, g_checks);
    return g_failures == 0 ? 0 : 1;
}
