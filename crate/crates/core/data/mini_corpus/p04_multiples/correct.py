n = int(input())
acc = 0
for k in range(1, n + 1):
    if k % 3 == 0 or k % 5 == 0:
        acc += k
print(acc)
