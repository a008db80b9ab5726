const s = require("fs").readFileSync(0, "utf8").trim();
const counts = new Array(26).fill(0);
for (const ch of s) {
  counts[ch.charCodeAt(0) - 97]++;
}
let best = 0;
for (let i = 1; i < 26; i++) {
  if (counts[i] >= counts[best]) best = i;
}
console.log(String.fromCharCode(97 + best));
