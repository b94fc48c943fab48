int total;

/*@ FNSPEC ⟨accumulate_spec⟩ */
void accumulate(int n) {
  int i = 0;
  while (i < n) {
    total = total + i;
    i = i + 1;
  } /*@ @ INVARIANT ⟨i ≤ n⟩ */
}

/*@ DONT_TRANSLATE */
int helper(int *p) {
  return *p;
}
