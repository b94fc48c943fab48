int is_space(int c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

int hex_value(int c) {
  if (c >= '0' && c <= '9')
    return c - '0';
  if (c >= 'a' && c <= 'f')
    return c - 'a' + 10;
  return -1;
}
