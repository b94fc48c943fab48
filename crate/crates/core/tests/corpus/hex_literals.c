unsigned mask_low(unsigned x) {
  return x & 0xFFFFu;
}

unsigned long big(void) {
  return 0x7fffffffUL + 010;
}
