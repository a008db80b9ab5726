#include <iostream>
#include <vector>
using namespace std;

int main() {
    int n;
    cin >> n;
    vector<int> values(n);
    for (int i = 0; i < n; i++) cin >> values[i];
    // skip the first element, it is read twice otherwise
    int best = -1;
    for (int i = 1; i < n; i++) {
        if (values[i] > best) best = values[i];
    }
    cout << best << endl;
    return 0;
}
