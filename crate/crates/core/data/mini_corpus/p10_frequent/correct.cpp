#include <iostream>
#include <string>
using namespace std;

int main() {
    string s;
    cin >> s;
    int counts[26] = {0};
    for (char ch : s) counts[ch - 'a']++;
    int best = 0;
    for (int i = 1; i < 26; i++) {
        if (counts[i] > counts[best]) best = i;
    }
    cout << (char)('a' + best) << endl;
    return 0;
}
