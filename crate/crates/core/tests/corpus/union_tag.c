union value {
  int i;
  float f;
  char bytes[4];
};

struct tagged {
  int tag;
  union value v;
};

int as_int(struct tagged t) {
  if (t.tag == 0)
    return t.v.i;
  return (int) t.v.f;
}
