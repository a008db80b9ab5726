const s = require("fs").readFileSync(0, "utf8").trim();
const reversed = s.split("").reverse().join("");
console.log(reversed);
