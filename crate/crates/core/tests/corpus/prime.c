#define SQRT_UINT_MAX 65536

unsigned int k = 0;

/*@ FNSPEC ⟨prime_spec: "\<lbrace> n = n0 \<rbrace> prime n \<lbrace> result = is_prime n0 \<rbrace>"⟩ */
unsigned int prime(unsigned int n) {
  if (n < 2) return 0;
  for (unsigned i = 2; i < SQRT_UINT_MAX && i * i <= n; i++) {
    if (n % i == 0) return 0;
    k++;
  } /*@ @ INVARIANT ⟨k ≤ UINT_MAX⟩ */
  return 1;
}
