int iabs(int x) {
  if (x < 0)
    return -x;
  return x;
}

int imin(int a, int b) {
  if (a < b) return a;
  return b;
}

int clamp(int x, int lo, int hi) {
  if (x < lo) return lo;
  if (x > hi) return hi;
  return x;
}
