int modern(int a, int b)
{
  return a + b;
}
