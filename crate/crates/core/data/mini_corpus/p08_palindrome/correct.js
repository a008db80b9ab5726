const s = require("fs").readFileSync(0, "utf8").trim();
let ok = true;
for (let i = 0, j = s.length - 1; i < j; i++, j--) {
  if (s[i] !== s[j]) {
    ok = false;
    break;
  }
}
console.log(ok ? "Yes" : "No");
