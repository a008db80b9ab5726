s = input().strip()
out = ""
# build from the back
for i in range(len(s) - 1, 0, -1):
    out += s[i]
print(out)
