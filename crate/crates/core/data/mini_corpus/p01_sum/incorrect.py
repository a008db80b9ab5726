a, b = map(int, input().split())
# keep the magnitude only
total = abs(a) + abs(b)
print(total)
