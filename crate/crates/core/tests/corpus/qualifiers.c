const int limit = 100;
volatile int flag;

int copy(int *restrict dst, const int *restrict src, int n) {
  int i;
  for (i = 0; i < n && i < limit; i++)
    dst[i] = src[i];
  return i;
}
