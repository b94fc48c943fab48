struct s { char c; int i; };

unsigned sizes(void) {
  unsigned total = sizeof(char) + sizeof(int) + sizeof(struct s);
  int arr[10];
  total += sizeof arr / sizeof arr[0];
  total += _Alignof(double);
  return total;
}
