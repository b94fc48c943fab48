typedef int (*binop)(int, int);

int add(int a, int b) { return a + b; }
int mul(int a, int b) { return a * b; }

int apply(binop f, int a, int b) {
  return f(a, b);
}

int (*choose(int which))(int, int) {
  return which ? mul : add;
}
