n = int(input())
values = list(map(int, input().split()))
best = values[0]
for v in values[1:n]:
    if v > best:
        best = v
print(best)
