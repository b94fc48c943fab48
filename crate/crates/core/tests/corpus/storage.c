static int counter;
extern int shared;
_Thread_local int per_thread;

static inline int next_id(void) {
  static int last = 0;
  return ++last;
}

int bump(void) {
  register int r = counter;
  counter = r + 1;
  return counter;
}
