#pragma once

#include <string>
#include <vector>

#include "hierarchia/hierarchy.hpp"

namespace hierarchia {

struct ReproCase {
  std::string name;
  std::string description;
  bool slow = false;
};

struct ReproResult {
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
  HierarchyReport report;
};

const std::vector<ReproCase>& reproduction_cases();

// Runs one named case against its embedded expected data.
ReproResult run_reproduction(const std::string& name);

// selector: a case name, "all", or "fast" (skips the slow cases).
std::vector<ReproResult> run_reproduction_suite(const std::string& selector);

// Shared problem definitions (also used by tests).
Polynomial motzkin_dehomogenized();
Polynomial robinson_dehomogenized();
Polynomial biquartic_no_minimizer();  // x1^2 + (x1 x2 - 1)^2
Polynomial octic_no_minimizer();
Polynomial sextic_four_vars();
Polynomial quintic_three_vars();
std::pair<Polynomial, Polynomial> motzkin_on_sphere();
std::pair<Polynomial, Polynomial> quartic_surface_octic();
std::pair<Polynomial, std::vector<Polynomial>> two_constraint_quintic();
Polynomial gap_stress(double eps);  // x^2 (x^2 - 2x + 1 + eps)

}  // namespace hierarchia
