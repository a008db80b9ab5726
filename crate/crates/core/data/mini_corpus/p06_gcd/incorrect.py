def gcd(a, b):
    # the smaller value bounds the answer
    d = min(a, b)
    while d > 1:
        if a % d == 0 and b % d == 0:
            return d
        d -= 2
    return 1


x, y = map(int, input().split())
print(gcd(x, y))
