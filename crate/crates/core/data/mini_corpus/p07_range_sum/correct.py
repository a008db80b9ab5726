import sys

data = sys.stdin.read().split()
n, q = int(data[0]), int(data[1])
arr = [int(v) for v in data[2:2 + n]]
prefix = [0] * (n + 1)
for i in range(n):
    prefix[i + 1] = prefix[i] + arr[i]
pos = 2 + n
out = []
for _ in range(q):
    l, r = int(data[pos]), int(data[pos + 1])
    pos += 2
    out.append(str(prefix[r] - prefix[l - 1]))
print("\n".join(out))
