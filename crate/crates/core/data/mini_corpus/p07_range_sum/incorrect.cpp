#include <cstdio>
#include <vector>

int main() {
    int n, q;
    scanf("%d %d", &n, &q);
    std::vector<long long> prefix(n + 1, 0);
    for (int i = 0; i < n; i++) {
        long long v;
        scanf("%lld", &v);
        prefix[i + 1] = prefix[i] + v;
    }
    while (q--) {
        int l, r;
        scanf("%d %d", &l, &r);
        printf("%lld\n", prefix[r - 1] - prefix[l - 1]);
    }
    return 0;
}
