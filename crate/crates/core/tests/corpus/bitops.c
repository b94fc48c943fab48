unsigned popcount(unsigned x) {
  unsigned c = 0;
  while (x) {
    c += x & 1;
    x >>= 1;
  }
  return c;
}

unsigned rotl(unsigned x, int s) {
  return x << s | x >> (32 - s);
}

int parity(unsigned x) {
  x ^= x >> 16;
  x ^= x >> 8;
  x ^= x >> 4;
  return (0x6996 >> (x & 0xf)) & 1;
}
