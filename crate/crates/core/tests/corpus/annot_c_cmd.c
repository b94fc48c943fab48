int offset = 4;

int adjust(int v) {
  return v - offset; /*@ C ⟨int adjusted_limit = 10;⟩ */
}
