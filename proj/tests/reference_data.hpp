#pragma once

// Published error columns for the benchmark problems, used as regression
// fixtures. Entries known to be misprinted are stored as NaN.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace sobvem::reference {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct ErrorColumns {
  std::string label;
  int k = 1;
  std::vector<double> h;
  std::vector<double> E0;
  std::vector<double> eoc0;  // printed, first entry blank
  std::vector<double> E1;
  std::vector<double> eoc1;
};

// Example 1, Voronoi family.
inline const std::vector<double> kVoronoiH{3.184e-1, 2.304e-1, 1.164e-1, 8.273e-2};
inline std::vector<ErrorColumns> example1_voronoi() {
  return {
      {"example1 voronoi", 1, kVoronoiH, {2.269e-2, 1.068e-2, 2.574e-3, 1.249e-3},
       {kMissing, 2.3294, 2.0829, 2.1199}, {5.051e-1, 3.519e-1, 1.756e-1, 1.241e-1},
       {kMissing, 1.1171, 1.0179, 1.0169}},
      {"example1 voronoi", 2, kVoronoiH, {1.489e-3, 5.065e-4, 6.242e-5, 2.192e-5},
       {kMissing, 3.3363, 3.0638, 3.0686}, {6.218e-2, 2.962e-2, 7.228e-3, 3.715e-3},
       {kMissing, 2.2932, 2.0643, 1.9514}},
      {"example1 voronoi", 3, kVoronoiH, {1.122e-4, 2.383e-5, 1.408e-6, 3.349e-7},
       {kMissing, 4.7918, 4.1392, 4.2108}, {6.123e-3, 1.864e-3, 2.203e-4, 7.579e-5},
       {kMissing, 3.6783, 3.1250, 3.1278}},
  };
}

// Example 1 and 2, distorted squares.
inline const std::vector<double> kDistortedH{4.261e-1, 2.205e-1, 1.521e-1, 1.144e-1, 9.181e-2};
inline std::vector<ErrorColumns> example1_distorted() {
  return {
      {"example1 distorted", 1, kDistortedH, {kMissing, 1.258e-2, 5.759e-3, 3.274e-3, 2.105e-3},
       {kMissing, 1.8925, 2.1052, 1.9826, 2.0055},
       {7.047e-1, 3.733e-1, 2.518e-1, 1.896e-1, 1.519e-1},
       {kMissing, 0.9643, 1.0613, 0.9956, 1.0054}},
      {"example1 distorted", 2, kDistortedH, {3.737e-3, 5.693e-4, 1.737e-4, 7.398e-5, 3.803e-5},
       {kMissing, 2.8555, 3.1987, 2.9961, 3.0227},
       {1.301e-1, 3.800e-2, 1.738e-2, 9.869e-3, 6.344e-3},
       {kMissing, 1.8673, 2.1088, 1.9855, 2.0078}},
      {"example1 distorted", 3, kDistortedH, {3.815e-4, 2.948e-5, 6.033e-6, 1.928e-6, 7.930e-7},
       {kMissing, 3.8853, 4.2758, 4.0035, 4.0366},
       {1.491e-2, 2.186e-3, 6.607e-4, 2.802e-4, 1.437e-4},
       {kMissing, 2.9132, 3.2251, 3.0109, 3.0323}},
  };
}

inline std::vector<ErrorColumns> example2_distorted() {
  return {
      {"example2 distorted", 3, kDistortedH, {4.048e-5, 2.874e-6, 5.600e-7, 1.748e-7, 7.097e-8},
       {kMissing, 4.0140, 4.4074, 4.0868, 4.0955},
       {1.312e-3, 1.917e-4, 5.736e-5, 2.414e-5, 1.232e-5},
       {kMissing, 2.9185, 3.2512, 3.0377, 3.0562}},
  };
}

// The concave ladder halves h exactly; the printed h are four-digit
// renderings of 4.419e-1 / 2^m and the printed EOCs use the exact ratio.
inline std::vector<double> concave_h() {
  std::vector<double> h;
  for (int m = 0; m < 5; ++m) h.push_back(4.419e-1 / std::pow(2.0, m));
  return h;
}
inline const std::vector<double> kConcavePrintedH{4.419e-1, 2.209e-1, 1.105e-1, 5.524e-2,
                                                  2.762e-2};

inline std::vector<ErrorColumns> example1_concave() {
  return {
      {"example1 concave", 1, concave_h(), {kMissing, 1.411e-2, 3.589e-3, 9.039e-4, kMissing},
       {kMissing, 1.9412, 1.9754, 1.9895, 1.9954},
       {7.487e-1, 3.788e-1, 1.894e-1, 9.462e-2, 4.727e-2},
       {kMissing, 0.9830, 0.9996, 1.0017, 1.0012}},
      {"example1 concave", 2, concave_h(), {4.747e-3, 5.875e-4, 7.296e-5, 9.087e-6, 1.134e-6},
       {kMissing, 3.0142, 3.0095, 3.0051, 3.0026},
       {1.507e-1, 3.831e-2, 9.621e-3, 2.408e-3, 6.023e-4},
       {kMissing, 1.9757, 1.9937, 1.9981, 1.9994}},
      {"example1 concave", 3, concave_h(), {6.523e-4, 4.881e-5, 3.295e-6, 2.121e-7, 1.342e-8},
       {kMissing, 3.7403, 3.8889, 3.9571, 3.9823},
       {2.508e-2, 3.706e-3, 4.953e-4, 6.347e-5, 8.013e-6},
       {kMissing, 2.7585, 2.9037, 2.9641, 2.9856}},
  };
}

inline std::vector<ErrorColumns> example2_concave() {
  return {
      {"example2 concave", 1, concave_h(), {3.451e-2, 8.662e-3, 2.176e-3, 5.452e-4, 1.364e-4},
       {kMissing, 1.9941, 1.9928, 1.9969, 1.9988},
       {6.700e-1, 3.401e-1, 1.714e-1, 8.607e-2, 4.313e-2},
       {kMissing, 0.9784, 0.9938, 0.9938, 0.9968}},
      {"example2 concave", 2, concave_h(), {1.275e-3, 1.651e-4, 2.123e-5, 2.698e-6, 3.402e-7},
       {kMissing, 2.9482, 2.9597, 2.9761, 2.9871},
       {4.742e-2, 1.256e-2, 3.244e-3, 8.253e-4, 2.082e-4},
       {kMissing, 1.9170, 1.9524, 1.9749, 1.9871}},
      {"example2 concave", 3, concave_h(), {4.061e-5, 2.747e-6, 1.764e-7, 1.120e-8, 7.091e-10},
       {kMissing, 3.8862, 3.9604, 3.9773, 3.9816},
       {1.456e-3, 2.161e-4, 2.894e-5, 3.761e-6, 4.841e-7},
       {kMissing, 2.7528, 2.9006, 2.9442, 2.9573}},
  };
}

} // namespace sobvem::reference
