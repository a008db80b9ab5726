const data = require("fs").readFileSync(0, "utf8").trim().split(/\s+/).map(Number);
const n = data[0];
const q = data[1];
const prefix = new Array(n + 1).fill(0);
for (let i = 0; i < n; i++) {
  prefix[i + 1] = prefix[i] + data[2 + i];
}
const out = [];
let pos = 2 + n;
for (let j = 0; j < q; j++) {
  const l = data[pos];
  const r = data[pos + 1];
  pos += 1;
  out.push(prefix[r] - prefix[l - 1]);
}
console.log(out.join("\n"));
