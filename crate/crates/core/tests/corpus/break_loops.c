int first_multiple(int n, int d) {
  int i = 1;
  while (1) {
    if (i * d >= n)
      break;
    i++;
  }
  return i * d;
}

int find_pair(int target) {
  int a, b;
  for (a = 0; a < 10; a++) {
    for (b = 0; b < 10; b++)
      if (a * b == target)
        break;
    if (b < 10)
      return a * 10 + b;
  }
  return -1;
}
