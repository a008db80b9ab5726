def is_even(x):
    # positive numbers only
    return x > 0 and x % 2 == 0


n = int(input())
nums = list(map(int, input().split()))
count = 0
for x in nums:
    if is_even(x):
        count += 1
print(count)
