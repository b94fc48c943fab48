#define WIDTH 80
#define HEIGHT 25
#define AREA (WIDTH * HEIGHT)
#define SQUARE(x) ((x) * (x))
#define MAX(a, b) ((a) > (b) ? (a) : (b))

int screen_cells(void) {
  return AREA;
}

int biggest_square(int a, int b) {
  return SQUARE(MAX(a, b));
}
