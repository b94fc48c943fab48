int v[6] = {5, 3, 9, 1, 7, 2};

void sort(void) {
  int i, j;
  for (i = 0; i < 6; i++) {
    for (j = 0; j + 1 < 6 - i; j++) {
      if (v[j] > v[j + 1]) {
        int t = v[j];
        v[j] = v[j + 1];
        v[j + 1] = t;
      }
    }
  }
}

int is_sorted(void) {
  int i;
  for (i = 0; i + 1 < 6; i++)
    if (v[i] > v[i + 1])
      return 0;
  return 1;
}
