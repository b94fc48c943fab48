struct node {
  int value;
  struct node *next;
};

int list_length(struct node *n) {
  int len = 0;
  while (n) {
    len++;
    n = n->next;
  }
  return len;
}

int list_sum(const struct node *n) {
  return n ? n->value + list_sum(n->next) : 0;
}
