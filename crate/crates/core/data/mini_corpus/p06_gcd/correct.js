function gcd(a, b) {
  while (b !== 0) {
    const t = a % b;
    a = b;
    b = t;
  }
  return a;
}

const [x, y] = require("fs").readFileSync(0, "utf8").trim().split(/\s+/).map(Number);
console.log(gcd(x, y));
