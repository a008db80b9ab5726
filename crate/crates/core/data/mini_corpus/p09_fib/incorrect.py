MOD = 1000000007

n = int(input())
a, b = 0, 1
for _ in range(n):
    a, b = b, a + b
print(a % MOD if a > MOD else a)
