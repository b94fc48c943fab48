unsigned gcd(unsigned a, unsigned b) {
  while (b != 0) {
    unsigned t = a % b;
    a = b;
    b = t;
  }
  return a;
}

unsigned lcm(unsigned a, unsigned b) {
  if (a == 0 || b == 0)
    return 0;
  return a / gcd(a, b) * b;
}
