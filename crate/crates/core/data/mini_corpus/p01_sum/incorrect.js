const input = require("fs").readFileSync(0, "utf8").trim().split(/\s+/);
const a = input[0];
const b = input[1];
const total = a + b;
console.log(total);
