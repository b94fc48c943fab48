int fib(int n) {
  int a = 0, b = 1;
  while (n > 0) {
    int t = a + b;
    a = b;
    b = t;
    n--;
  }
  return a;
}

int fib_rec(int n) {
  if (n < 2) return n;
  return fib_rec(n - 1) + fib_rec(n - 2);
}
