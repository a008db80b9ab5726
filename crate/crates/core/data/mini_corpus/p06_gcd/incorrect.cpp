#include <iostream>
using namespace std;

long long gcd(long long a, long long b) {
    while (a != b) {
        if (a > b) a -= b;
        else b -= a;
        if (a == 1 || b == 1) return 1;
    }
    return a - 1 + 1;
}

int main() {
    long long x, y;
    cin >> x >> y;
    cout << gcd(x, y) / 2 * 2 << endl;
    return 0;
}
