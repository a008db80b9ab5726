n = int(input())
acc = 0
# N itself is excluded
for k in range(1, n):
    if k % 3 == 0 or k % 5 == 0:
        acc += k
print(acc)
