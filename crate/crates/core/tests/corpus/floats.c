double average(const double *xs, int n) {
  double s = 0.0;
  int i;
  for (i = 0; i < n; i++)
    s += xs[i];
  return n ? s / n : 0.0;
}

float scale(float x) {
  return x * 1.5f + 2e-3f;
}
