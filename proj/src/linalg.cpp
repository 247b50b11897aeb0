#include "sflab/linalg.hpp"

namespace sflab {

RealVector uniform_angles(int count) {
  RealVector angles(count);
  for (int j = 0; j < count; ++j) angles[j] = kTwoPi * j / count;
  return angles;
}

namespace pauli {
Matrix identity() { return Matrix::Identity(2, 2); }
Matrix x() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
Matrix y() {
  Matrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}
Matrix z() {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}
}  // namespace pauli

}  // namespace sflab
