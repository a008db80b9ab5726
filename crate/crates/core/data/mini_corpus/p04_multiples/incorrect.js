const n = parseInt(require("fs").readFileSync(0, "utf8"), 10);
let acc = 0;
for (let k = 1; k <= n; k++) {
  if (k % 3 === 0) {
    acc += k;
  } else if (k % 5 === 0 && k % 2 === 0) {
    acc += k;
  }
}
console.log(acc);
