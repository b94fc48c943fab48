#define CAP 16

int buf[CAP];
unsigned head = 0;
unsigned tail = 0;

int push(int v) {
  if ((tail + 1) % CAP == head % CAP)
    return 0;
  buf[tail % CAP] = v;
  tail++;
  return 1;
}

int pop(void) {
  int v;
  if (head == tail)
    return -1;
  v = buf[head % CAP];
  head++;
  return v;
}
