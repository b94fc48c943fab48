struct pair { int a, b; };

int sum_pair(struct pair p) { return p.a + p.b; }

int use_literal(void) {
  return sum_pair((struct pair){ 3, 4 });
}

int first(void) {
  int *p = (int[]){ 10, 20, 30 };
  return p[0];
}
