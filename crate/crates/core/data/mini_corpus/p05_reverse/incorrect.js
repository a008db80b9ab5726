const s = require("fs").readFileSync(0, "utf8").trim();
let reversed = "";
for (let i = s.length - 1; i >= 1; i--) {
  reversed += s[i];
}
console.log(reversed + s[0].toUpperCase());
