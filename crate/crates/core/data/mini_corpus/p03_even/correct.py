def is_even(x):
    return x % 2 == 0


n = int(input())
nums = list(map(int, input().split()))
count = 0
for x in nums:
    if is_even(x):
        count += 1
print(count)
