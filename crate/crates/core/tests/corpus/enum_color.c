enum color { RED, GREEN = 5, BLUE };

int weight(enum color c) {
  if (c == RED) return 1;
  if (c == GREEN) return 2;
  return BLUE;
}
