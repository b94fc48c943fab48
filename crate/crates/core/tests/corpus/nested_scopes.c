int x = 1;

int scopes(int y) {
  int r = x;
  {
    int x = y;
    r += x;
    {
      int x = 2 * y;
      r += x;
    }
  }
  return r + x;
}
