#include <cstdio>

bool isEven(int x) {
    return x % 2 == 0;
}

int main() {
    int n;
    scanf("%d", &n);
    int count = 0;
    for (int i = 0; i < n; i++) {
        int x;
        scanf("%d", &x);
        if (isEven(x)) count++;
    }
    printf("%d\n", count);
    return 0;
}
