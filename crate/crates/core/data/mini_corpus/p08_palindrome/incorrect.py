s = input().strip()
# the ends decide it
ok = s[0] == s[-1]
print("Yes" if ok else "No")
