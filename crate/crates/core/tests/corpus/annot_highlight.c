int counter = 0;

void tick(void) {
  counter = counter + 1; /*@ highlight */
}

int read_counter(void) {
  return counter; //@ @ highlight
}
