int a, b = 2, *c, d[3];

int init(void) {
  int x = 1, y = x + 1, z;
  z = x + y;
  a = z;
  return a + b;
}
