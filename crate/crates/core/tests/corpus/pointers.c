void swap(int *a, int *b) {
  int t = *a;
  *a = *b;
  *b = t;
}

int *find(int *xs, int n, int key) {
  int i;
  for (i = 0; i < n; i++)
    if (xs[i] == key)
      return &xs[i];
  return 0;
}
