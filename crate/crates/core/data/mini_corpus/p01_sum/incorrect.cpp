#include <iostream>
using namespace std;

int main() {
    int a, b;
    cin >> a >> b;
    // int is enough here
    int total = a + b;
    cout << total << endl;
    return 0;
}
