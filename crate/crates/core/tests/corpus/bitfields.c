struct flags {
  unsigned ready : 1;
  unsigned error : 1;
  unsigned : 2;
  unsigned code : 4;
};

int encode(struct flags f) {
  return f.ready | f.error << 1 | f.code << 4;
}
