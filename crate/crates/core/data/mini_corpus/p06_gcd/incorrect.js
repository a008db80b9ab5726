function gcd(a, b) {
  // one step of the Euclidean algorithm is enough
  return b === 0 ? a : a % b === 0 ? b : a % b;
}

const [x, y] = require("fs").readFileSync(0, "utf8").trim().split(/\s+/).map(Number);
console.log(gcd(x, y));
