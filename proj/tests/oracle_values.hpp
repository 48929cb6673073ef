#pragma once

// Generated by tests/oracles/barrier_oracle.py; do not edit by hand.

#include <array>

namespace oracle
{

struct BarrierCase
{
  const char* model;
  const char* barrier;
  std::array<double, 5> state;
  std::array<double, 6> obstacle;  // cx, cy, vx, vy, c1, c2
  double h;
  double lf_h;
  std::array<double, 2> lg_h;
};

constexpr double kWidth = 0.5;
constexpr double kBodyOffset = 0.1;
constexpr double kRearAxle = 1.6;

inline constexpr BarrierCase kBarrierCases[] = {
  {"unicycle", "c3bf", {0, 0, 0.10000000000000001, 1, 0.20000000000000001}, {5, 0.5, -0.5, 0.10000000000000001, 0.5, 0.40000000000000002}, -0.058310329806578791, -0.10162869828513249, {-0.075759992762575973, -0.042022320698558858}},
  {"unicycle", "c3bf", {1, -2, 1.2, 0.69999999999999996, -0.40000000000000002}, {-3, 2, 0.29999999999999999, -0.59999999999999998, 0.59999999999999998, 0.90000000000000002}, 1.9338081651492023, 1.2698689175433111, {2.9312120787108804, -0.31477364669731295}},
  {"bicycle", "c3bf", {0, 0, 0, 2, 0}, {6, 1, -1, 0, 0.5, 0.5}, 0.10904470147445409, 0.054194041124111872, {0.036348233824818027, -3.4939784398750988}},
  {"bicycle", "c3bf", {2, 1, -0.69999999999999996, 1.3, 0}, {4, -3, 0.20000000000000001, 0.40000000000000002, 0.80000000000000004, 0.29999999999999999}, -0.14622409455382221, -0.049461988289993139, {0.046203751800939136, 0.72644585887855639}},
  {"pointmass", "c3bf", {0, 0, 1, 0.29999999999999999, 0}, {4, 1, 0, -0.20000000000000001, 0.5, 0.69999999999999996}, -0.014258701173238636, -0.0039733402528607633, {-0.41140696093859092, 0.79429651953070457}},
  {"unicycle", "ellipse", {0.5, 0.20000000000000001, 0.29999999999999999, 1.1000000000000001, 0.40000000000000002}, {3, 1, -0.20000000000000001, 0.29999999999999999, 0.69999999999999996, 0.40000000000000002}, 15.755102040816327, -13.014703273664191, {0, 0}},
  {"bicycle", "ellipse", {0.5, 0.20000000000000001, 0.29999999999999999, 1.1000000000000001, 0}, {3, 1, -0.20000000000000001, 0.29999999999999999, 0.69999999999999996, 0.40000000000000002}, 15.755102040816327, -13.014703273664191, {0, -7.191637836223773}},
  {"pointmass", "ellipse", {0.5, 0.20000000000000001, 0.40000000000000002, -0.29999999999999999, 0}, {3, 1, -0.20000000000000001, 0.29999999999999999, 0.69999999999999996, 0.40000000000000002}, 15.755102040816327, -0.12244897959183673, {0, 0}},
  {"unicycle", "hocbf", {0.5, 0.20000000000000001, 0.29999999999999999, 1.1000000000000001, 0.40000000000000002}, {3, 1, -0.20000000000000001, 0.29999999999999999, 0.69999999999999996, 0.40000000000000002}, 2.7403987671521359, -9.4970676305147155, {-12.703533588303253, 0}},
  {"bicycle", "hocbf", {-1, 0.5, 2, 0.90000000000000002, 0}, {1, 3, 0.5, -0.40000000000000002, 0.5, 1.2}, 29.102348876337484, 17.942217175884714, {3.5010666527206613, 27.582895078391541}},
  {"pointmass", "hocbf", {0.5, 0.20000000000000001, 0.40000000000000002, -0.29999999999999999, 0}, {3, 1, -0.20000000000000001, 0.29999999999999999, 0.69999999999999996, 0.40000000000000002}, 15.63265306122449, 5.8469387755102042, {-10.204081632653061, -10}},
};

struct ConeExample
{
  const char* name;
  double px, py, vx, vy, r, h;
};

inline constexpr ConeExample kConeExamples[] = {
  {"head_on", 5, 0, -1, 0, 1, -0.10102051443364381},
  {"receding", 5, 0, 1, 0, 1, 9.8989794855663558},
  {"tangent", 5, 0, -0.9797958971132712, -0.20000000000000001, 1, 0},
};

}  // namespace oracle

