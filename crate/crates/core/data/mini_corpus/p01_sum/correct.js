const input = require("fs").readFileSync(0, "utf8").trim().split(/\s+/);
const a = Number(input[0]);
const b = Number(input[1]);
// plain numbers are exact up to 2^53
const total = a + b;
console.log(String(total));
