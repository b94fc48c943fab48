typedef unsigned int u32;
typedef int T, *PT;

u32 widen(T x) {
  u32 y = (u32) x;
  return y;
}

int deref(PT p) {
  return *p;
}

/* A local declaration may shadow the typedef name. */
int shadow(void) {
  int T = 3;
  return T * 2;
}
