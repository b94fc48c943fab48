int sum_pairs(int n) {
  int i, j, s = 0;
  for (i = 0, j = n; i < j; i++, j--)
    s += i + j;
  return s;
}
