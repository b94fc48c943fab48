int data[10] = {1, 3, 5, 7, 9, 11, 13, 15, 17, 19};

int bsearch_idx(int key) {
  int lo = 0, hi = 9;
  while (lo <= hi) {
    int mid = (lo + hi) / 2;
    if (data[mid] == key)
      return mid;
    if (data[mid] < key)
      lo = mid + 1;
    else
      hi = mid - 1;
  }
  return -1;
}
