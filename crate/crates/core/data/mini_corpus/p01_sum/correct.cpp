#include <iostream>
using namespace std;

int main() {
    long long a, b;
    cin >> a >> b;
    long long total = a + b;  // fits in 64 bits
    cout << total << endl;
    return 0;
}
