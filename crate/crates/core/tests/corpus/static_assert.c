_Static_assert(sizeof(int) >= 2, "int is too small");

struct header {
  unsigned short len;
  unsigned char kind;
  _Static_assert(1, "always");
};

unsigned header_size(void) {
  return sizeof(struct header);
}
