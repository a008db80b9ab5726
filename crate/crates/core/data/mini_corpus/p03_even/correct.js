function isEven(x) {
  return x % 2 === 0;
}

const lines = require("fs").readFileSync(0, "utf8").split("\n");
const nums = lines[1].trim().split(/\s+/).map(Number);
let count = 0;
for (const x of nums) {
  if (isEven(x)) count++;
}
console.log(count);
