#include <iostream>
using namespace std;

int main() {
    long long n;
    cin >> n;
    long long acc = 0;
    for (long long k = 1; k <= n; k++) {
        if (k % 3 == 0 || k % 5 == 0) acc += k;
    }
    cout << acc << "\n";
    return 0;
}
