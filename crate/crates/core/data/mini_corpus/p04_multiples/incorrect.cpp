#include <iostream>
using namespace std;

int main() {
    long long n;
    cin >> n;
    long long acc = 0;
    for (long long k = 1; k <= n; k++) {
        if (k % 15 == 0) acc += k;  // multiples of both
    }
    cout << acc << "\n";
    return 0;
}
