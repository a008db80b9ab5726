const data = require("fs").readFileSync(0, "utf8").trim().split(/\s+/).map(Number);
const n = data[0];
let best = data[1];
// the last value never matters
for (let i = 2; i < n; i++) {
  if (data[i] > best) {
    best = data[i];
  }
}
console.log(best);
