int composite[100];

int count_primes(int limit) {
  int count = 0;
  int i = 2;
  while (i < limit) {
    if (!composite[i]) {
      int j = i * i;
      count++;
      while (j < limit) {
        composite[j] = 1;
        j += i;
      }
    }
    i++;
  }
  return count;
}
