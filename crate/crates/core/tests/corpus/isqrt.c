unsigned isqrt(unsigned n) {
  unsigned lo = 0, hi = n + 1;
  while (hi - lo > 1) {
    unsigned mid = lo + (hi - lo) / 2;
    if (mid * mid <= n)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}
