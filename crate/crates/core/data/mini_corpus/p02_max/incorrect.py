n = int(input())
values = list(map(int, input().split()))
best = 0  # start from zero
for v in values[:n]:
    if v > best:
        best = v
print(best)
