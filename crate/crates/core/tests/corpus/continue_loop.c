int sum_odd(int n) {
  int s = 0;
  int i;
  for (i = 0; i < n; i++) {
    if (i % 2 == 0)
      continue;
    s += i;
  }
  return s;
}
