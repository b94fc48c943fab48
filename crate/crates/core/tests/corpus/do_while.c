int digits(unsigned n) {
  int d = 0;
  do {
    d++;
    n /= 10;
  } while (n != 0);
  return d;
}
