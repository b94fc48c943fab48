int process(int n) {
  int status = 0;
  if (n < 0)
    goto fail;
  status = n * 2;
  return status;
fail:
  status = -1;
  return status;
}
