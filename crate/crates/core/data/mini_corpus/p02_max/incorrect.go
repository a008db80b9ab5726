package main

import (
	"bufio"
	"fmt"
	"os"
)

func main() {
	reader := bufio.NewReader(os.Stdin)
	var n int
	fmt.Fscan(reader, &n)
	best := 0
	for i := 0; i < n; i++ {
		var v int
		fmt.Fscan(reader, &v)
		if v > best {
			best = v
		}
	}
	fmt.Println(best)
}
