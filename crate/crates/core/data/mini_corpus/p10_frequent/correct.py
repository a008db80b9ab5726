s = input().strip()
counts = [0] * 26
for ch in s:
    counts[ord(ch) - ord("a")] += 1
best = 0
for i in range(1, 26):
    if counts[i] > counts[best]:
        best = i
print(chr(ord("a") + best))
