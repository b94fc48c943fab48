struct point {
  int x;
  int y;
};

int manhattan(struct point *a, struct point *b) {
  int dx = a->x - b->x;
  int dy = a->y - b->y;
  if (dx < 0) dx = -dx;
  if (dy < 0) dy = -dy;
  return dx + dy;
}

void translate(struct point *p, int dx, int dy) {
  p->x += dx;
  p->y += dy;
}
