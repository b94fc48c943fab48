long widen(int x) { return (long) x; }

unsigned char low_byte(unsigned x) {
  return (unsigned char) (x & 0xff);
}

double ratio(int a, int b) {
  return (double) a / (double) b;
}

int truncate(double d) {
  return (int) d;
}
