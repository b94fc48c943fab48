struct config {
  int width;
  int height;
  int depth;
};

struct config defaults = { .width = 640, .height = 480 };

int lookup[5] = { [0] = 1, [4] = 16 };

int area(void) {
  return defaults.width * defaults.height;
}
