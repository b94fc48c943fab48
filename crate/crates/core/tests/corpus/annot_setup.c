int base;
/*@ setup define mark */

int shifted(int x) {
  return x + base; /*@ mark */
}
