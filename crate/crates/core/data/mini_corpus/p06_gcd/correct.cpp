#include <iostream>
using namespace std;

long long gcd(long long a, long long b) {
    return b == 0 ? a : gcd(b, a % b);
}

int main() {
    long long x, y;
    cin >> x >> y;
    cout << gcd(x, y) << endl;
    return 0;
}
