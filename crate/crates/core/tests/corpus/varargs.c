int printf(const char *fmt, ...);

int report(int code) {
  if (code != 0)
    printf("error %d\n", code);
  return code;
}
