extern int limit_value(void);
int helper(int);

int helper(int x) {
  return x * 2;
}

int call_helper(void) {
  return helper(21);
}
