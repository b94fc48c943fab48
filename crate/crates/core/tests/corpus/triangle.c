int triangle(int n) {
  int s = 0;
  int i = 1;
  while (i <= n) {
    s += i;
    i++;
  }
  return s;
}

int is_triangular(int x) {
  int n = 0;
  while (triangle(n) < x)
    n++;
  return triangle(n) == x;
}
