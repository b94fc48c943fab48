int table[8] = {1, 2, 3, 4, 5, 6, 7, 8};

int sum_table(void) {
  int s = 0;
  int i = 0;
  while (i < 8) {
    s = s + table[i];
    i = i + 1;
  }
  return s;
}

void scale(int f) {
  int i;
  for (i = 0; i < 8; i++)
    table[i] = table[i] * f;
}
